#include "pactest/demand.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pactest;
using testsupport::Gen;

namespace {

AidsParams make(Vec alpha, Vec beta, Mat gamma) { return {std::move(alpha), std::move(beta), std::move(gamma)}; }

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

bool has_violation(const Validity& v, const std::string& needle) {
    return std::any_of(v.violations.begin(), v.violations.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("validate_params examples") {
    Mat g(2, 2);
    g << 0.1, -0.1, -0.1, 0.1;
    CHECK(validate_params(make(v2(0.5, 0.5), v2(0, 0), g)).ok);

    const Validity bad_alpha = validate_params(make(v2(0.6, 0.6), v2(0, 0), Mat::Zero(2, 2)));
    CHECK_FALSE(bad_alpha.ok);
    CHECK(has_violation(bad_alpha, "sum(alpha)"));
    CHECK(bad_alpha.violations.size() == 1);

    Mat asym(3, 3);
    asym << -0.09, 0.05, 0.04, 0.04, -0.04, 0.0, 0.05, -0.01, -0.04;
    // columns sum to 0 but rows of the transpose do not; gamma_12 = 0.05, gamma_21 = 0.04
    const Validity v = validate_params(make(Vec::Constant(3, 1.0 / 3), Vec::Zero(3), asym));
    CHECK_FALSE(v.ok);
    CHECK(has_violation(v, "asymmetric gamma"));
}

TEST_CASE("validate_params names every violated constraint") {
    Mat g(2, 2);
    g << 0.1, 0.0, 0.0, 0.1;
    const Validity v = validate_params(make(v2(0.6, 0.6), v2(0.1, 0.0), g));
    CHECK(has_violation(v, "sum(alpha)"));
    CHECK(has_violation(v, "sum(beta)"));
    CHECK(has_violation(v, "column 1"));
    CHECK(has_violation(v, "row 2"));
}

TEST_CASE("validate_params shape errors are structural") {
    CHECK_THROWS_AS(validate_params(make(v2(0.5, 0.5), Vec::Zero(3), Mat::Zero(2, 2))), DimensionError);
    CHECK_THROWS_AS(validate_params(make(v2(0.5, 0.5), v2(0, 0), Mat::Zero(3, 2))), DimensionError);
}

TEST_CASE("price_index examples") {
    const AidsParams half = make(v2(0.5, 0.5), v2(0, 0), Mat::Zero(2, 2));
    CHECK(price_index(half, v2(1, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    const double e = std::exp(1.0);
    CHECK(price_index(half, v2(e, e)) == doctest::Approx(e).epsilon(1e-14));
    const AidsParams corner = make(v2(1, 0), v2(0, 0), Mat::Zero(2, 2));
    CHECK(price_index(corner, v2(e * e, 1)) == doctest::Approx(e * e).epsilon(1e-14));
    CHECK_THROWS_AS(price_index(half, v2(0.0, 1.0)), DomainError);
    CHECK_THROWS_AS(price_index(half, v2(-1.0, 1.0)), DomainError);
}

TEST_CASE("demand examples") {
    const Vec x = demand(make(v2(0.5, 0.5), v2(0, 0), Mat::Zero(2, 2)), v2(1, 1), 2.0);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));

    const Vec y = demand(make(v2(0.3, 0.7), v2(0, 0), Mat::Zero(2, 2)), v2(1, 2), 10.0);
    CHECK(y[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("demand matches the complex-arithmetic oracle and exhausts the budget") {
    Gen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = gen.integer(2, 5);
        const Vec p = gen.prices(K);
        const double I = gen.uniform(0.5, 50.0);
        const AidsParams a = gen.admissible_at(K, p, I, 0.05, 0.05);
        const Vec x = demand(a, p, I);
        const Vec oracle = testsupport::aids_real(a, p, I);
        CHECK((x - oracle).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
        CHECK(std::abs(p.dot(x) - I) <= 1e-9 * I);
    }
}

TEST_CASE("demand is undefined outside the share range") {
    // beta large enough that a share goes negative at high income
    const AidsParams a = make(v2(0.1, 0.9), v2(-0.1, 0.1), Mat::Zero(2, 2));
    CHECK_THROWS_AS(demand(a, v2(1, 1), 1e6), DemandUndefined);
    try {
        demand(a, v2(1, 1), 1e6);
    } catch (const DemandUndefined& e) {
        CHECK(e.income() == 1e6);
        CHECK(e.prices().size() == 2);
    }
    CHECK_THROWS_AS(demand(a, v2(1, 1), 0.0), DomainError);
    CHECK_THROWS_AS(demand(a, Vec::Ones(3), 1.0), DimensionError);
}

TEST_CASE("sample_params class examples") {
    SamplingLaw law;
    const AidsParams h = sample_params(3, {ClassTag::homothetic, {}}, 5, law);
    CHECK(h.beta.isZero(0.0));

    const Partition g{{0}, {1, 2}};
    const AidsParams hws = sample_params(3, {ClassTag::homothetic_weakly_separable, g}, 5, law);
    CHECK(hws.beta.isZero(0.0));
    CHECK(hws.gamma(0, 1) == 0.0);
    CHECK(hws.gamma(0, 2) == 0.0);
    CHECK(hws.gamma(1, 0) == 0.0);
    CHECK(hws.gamma(2, 0) == 0.0);

    const AidsParams ws = sample_params(4, {ClassTag::weakly_separable, Partition{{0, 1}, {2, 3}}}, 9, law);
    CHECK(ws.gamma(0, 2) == 0.0);
    CHECK(ws.gamma(1, 3) == 0.0);
    CHECK_FALSE(ws.beta.isZero(0.0));

    const AidsParams u1 = sample_params(3, {ClassTag::unrestricted, {}}, 42, law);
    const AidsParams u2 = sample_params(3, {ClassTag::unrestricted, {}}, 42, law);
    CHECK(u1.alpha == u2.alpha);
    CHECK(u1.beta == u2.beta);
    CHECK(u1.gamma == u2.gamma);
    CHECK(params_hash(u1) == params_hash(u2));
    CHECK(params_hash(u1) != params_hash(sample_params(3, {ClassTag::unrestricted, {}}, 43, law)));
}

TEST_CASE("sample_params preconditions and failure") {
    CHECK_THROWS_AS(sample_params(1, {ClassTag::unrestricted, {}}, 1), DimensionError);
    CHECK_THROWS_AS(sample_params(3, {ClassTag::weakly_separable, Partition{{0}, {0, 1}}}, 1), PreconditionError);
    CHECK_THROWS_AS(sample_params(3, {ClassTag::weakly_separable, Partition{{0}, {}}}, 1), PreconditionError);
    // an enormous income makes every beta draw inadmissible
    SamplingLaw law;
    law.income = 1e300;
    law.max_retries = 20;
    law.beta_max = 0.5;
    CHECK_THROWS_AS(sample_params(2, {ClassTag::unrestricted, {}}, 1, law), SamplingFailure);
}

TEST_CASE("project_to_class lands in the class") {
    const AidsParams u = sample_params(3, {ClassTag::unrestricted, {}}, 3);
    const Partition g{{0}, {1, 2}};
    const AidsParams p = project_to_class(u, {ClassTag::homothetic_weakly_separable, g});
    CHECK(p.beta.isZero(0.0));
    CHECK(p.gamma(0, 1) == 0.0);
    CHECK(p.gamma(0, 2) == 0.0);
    CHECK(validate_params(p, 1e-12).ok);
    const AidsParams h = project_to_class(u, {ClassTag::homothetic, {}});
    CHECK(h.beta.isZero(0.0));
    CHECK(h.gamma == u.gamma);
}

TEST_CASE("generate_dataset examples") {
    const AidsParams a = make(v2(0.3, 0.7), v2(0.02, -0.02), Mat::Zero(2, 2));
    const Dataset d = generate_dataset(a, 60, PriceLaw{{}, 7}, 1.0);
    CHECK(d.size() == 60);
    CHECK(d.dim() == 2);
    for (const auto& ob : d.observations) {
        CHECK(std::abs(ob.prices.dot(ob.quantities) - ob.income) <= 1e-9 * ob.income);
        CHECK(ob.prices.minCoeff() >= 0.5);
        CHECK(ob.prices.maxCoeff() <= 2.0);
    }
    CHECK(d.label.find("seed=7") != std::string::npos);
    CHECK(d.label.find(params_hash(a)) != std::string::npos);
    CHECK_NOTHROW(d.validate());

    const Dataset zero_noise = generate_dataset(a, 60, PriceLaw{{}, 7}, 1.0, NoiseSpec{NoiseFamily::uniform, 0.0});
    for (std::size_t t = 0; t < d.size(); ++t) {
        CHECK(zero_noise.observations[t].prices == d.observations[t].prices);
        CHECK(zero_noise.observations[t].quantities == d.observations[t].quantities);
    }
    CHECK_THROWS_AS(generate_dataset(a, 0, PriceLaw{{}, 7}, 1.0), PreconditionError);
}

TEST_CASE("noise laws have mean zero and the requested variance") {
    const AidsParams a = make(v2(0.5, 0.5), v2(0, 0), Mat::Zero(2, 2));
    const Dataset clean = generate_dataset(a, 20000, PriceLaw{{}, 3}, 100.0);
    for (auto fam : {NoiseFamily::uniform, NoiseFamily::truncated_gaussian}) {
        const double V = 0.25;
        const Dataset noisy = generate_dataset(a, 20000, PriceLaw{{}, 3}, 100.0, NoiseSpec{fam, V});
        double sum = 0.0, sq = 0.0, maxabs = 0.0;
        std::size_t m = 0;
        for (std::size_t t = 0; t < clean.size(); ++t) {
            CHECK(noisy.observations[t].prices == clean.observations[t].prices);
            const Vec e = noisy.observations[t].quantities - clean.observations[t].quantities;
            sum += e.sum();
            sq += e.squaredNorm();
            maxabs = std::max(maxabs, e.cwiseAbs().maxCoeff());
            m += 2;
        }
        const double mean = sum / m, var = sq / m - mean * mean;
        CHECK(std::abs(mean) < 5.0 * std::sqrt(V / m));
        CHECK(var == doctest::Approx(V).epsilon(0.03));
        if (fam == NoiseFamily::uniform) CHECK(maxabs <= std::sqrt(3.0 * V) + 1e-12);
        if (fam == NoiseFamily::truncated_gaussian)
            CHECK(maxabs <= 2.0 * std::sqrt(V / 0.77374014980457563) + 1e-12);
    }
    CHECK_THROWS_AS(generate_dataset(a, 5, PriceLaw{{}, 3}, 1.0, NoiseSpec{NoiseFamily::uniform, -1.0}), DomainError);
}

TEST_CASE("noise clipping is recorded") {
    const AidsParams a = make(v2(0.5, 0.5), v2(0, 0), Mat::Zero(2, 2));
    const Dataset d = generate_dataset(a, 200, PriceLaw{{}, 3}, 0.01, NoiseSpec{NoiseFamily::uniform, 1.0});
    std::size_t zeros = 0;
    for (const auto& ob : d.observations) zeros += (ob.quantities.array() == 0.0).count();
    CHECK(zeros > 0);
    CHECK(d.label.find("clipped=" + std::to_string(zeros)) != std::string::npos);
}

TEST_CASE("Dataset::validate") {
    Dataset d;
    d.observations.push_back({v2(1, 1), v2(0.5, 0.5), 1.0});
    CHECK_NOTHROW(d.validate());
    d.observations.push_back({v2(1, 1), v2(0.6, 0.5), 1.0});
    CHECK_THROWS_AS(d.validate(), DomainError);
    CHECK_NOTHROW(d.validate(0.2));
    CHECK_NOTHROW(d.validate(-1.0));
    d.observations.push_back({Vec::Ones(3), Vec::Ones(3), 5.0});
    CHECK_THROWS_AS(d.validate(-1.0), DimensionError);
}

TEST_CASE("string round trips") {
    for (auto t : {ClassTag::unrestricted, ClassTag::homothetic, ClassTag::weakly_separable,
                   ClassTag::homothetic_weakly_separable})
        CHECK(class_tag_from_string(to_string(t)) == t);
    for (auto f : {NoiseFamily::none, NoiseFamily::uniform, NoiseFamily::truncated_gaussian})
        CHECK(noise_family_from_string(to_string(f)) == f);
    CHECK_THROWS_AS(class_tag_from_string("nope"), PreconditionError);
}

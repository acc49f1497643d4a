#include "pactest/calculus.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pactest;
using testsupport::Gen;
using testsupport::max_rel_err;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

AidsParams cobb_douglas(Vec alpha) {
    const auto K = alpha.size();
    return {std::move(alpha), Vec::Zero(K), Mat::Zero(K, K)};
}

// x_i = a_i I / p_i written directly, as a black box.
DemandOracle cd_black_box(Vec alpha) {
    return DemandOracle::black_box(static_cast<int>(alpha.size()), [alpha](const Vec& p, double I) {
        return Vec((alpha.array() * I / p.array()).matrix());
    });
}

}  // namespace

TEST_CASE("income derivatives: Cobb-Douglas by hand") {
    const Vec alpha = v2(0.3, 0.7);
    for (auto mode : {Differentiation::automatic, Differentiation::finite_difference}) {
        const Vec d = income_derivs(DemandOracle::aids(cobb_douglas(alpha)), v2(1, 2), 5.0, 1, mode);
        CHECK(d[0] == doctest::Approx(0.3).epsilon(1e-8));
        CHECK(d[1] == doctest::Approx(0.35).epsilon(1e-8));
    }
    const Vec d = income_derivs(cd_black_box(alpha), v2(1, 2), 5.0, 1);
    CHECK(d[0] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(d[1] == doctest::Approx(0.35).epsilon(1e-8));
}

TEST_CASE("second income derivative is exactly zero for beta = 0") {
    Gen gen(3);
    for (int t = 0; t < 20; ++t) {
        const Vec p = gen.prices(3);
        const AidsParams a = gen.admissible_at(3, p, 2.0, 0.05, 0.0, true);
        const Vec d2 = income_derivs(DemandOracle::aids(a), p, 2.0, 2);
        CHECK(d2.isZero(0.0));
    }
}

TEST_CASE("second income derivative matches beta / (I p)") {
    AidsParams a = cobb_douglas(v2(0.4, 0.6));
    a.beta = v2(0.1, -0.1);
    const Vec d2 = income_derivs(DemandOracle::aids(a), v2(1, 1), 1.0, 2);
    CHECK(d2[0] == doctest::Approx(0.1));
    CHECK(d2[1] == doctest::Approx(-0.1));
}

TEST_CASE("price Jacobian: Cobb-Douglas by hand") {
    const Vec alpha = v2(0.3, 0.7);
    const Vec p = v2(1.5, 0.8);
    const double I = 4.0;
    for (auto mode : {Differentiation::automatic, Differentiation::finite_difference}) {
        const Mat J = price_jacobian(DemandOracle::aids(cobb_douglas(alpha)), p, I, mode);
        CHECK(std::abs(J(0, 1)) < 1e-8);
        CHECK(std::abs(J(1, 0)) < 1e-8);
        CHECK(J(0, 0) == doctest::Approx(-0.3 * I / (p[0] * p[0])).epsilon(1e-7));
        CHECK(J(1, 1) == doctest::Approx(-0.7 * I / (p[1] * p[1])).epsilon(1e-7));
    }
}

TEST_CASE("Slutsky: Cobb-Douglas by hand") {
    const SlutskyMatrix s = slutsky(DemandOracle::aids(cobb_douglas(v2(0.5, 0.5))), v2(1, 1), 2.0);
    CHECK(s.S(0, 1) == doctest::Approx(0.5));
    CHECK(s.S(1, 0) == doctest::Approx(0.5));
    CHECK(s.S(0, 0) == doctest::Approx(-0.5));
    CHECK(s.income == 2.0);
    CHECK(s.prices == v2(1, 1));
}

TEST_CASE("analytic derivatives equal complex-step derivatives") {
    Gen gen(17);
    for (int t = 0; t < 100; ++t) {
        const int K = gen.integer(2, 5);
        const Vec p = gen.prices(K);
        const double I = gen.uniform(0.5, 20.0);
        const AidsParams a = gen.admissible_at(K, p, I, 0.05, 0.05);
        const auto o = DemandOracle::aids(a);
        CHECK(max_rel_err(income_derivs(o, p, I, 1), testsupport::cs_income(a, p, I)) < 1e-12);
        CHECK(max_rel_err(income_derivs(o, p, I, 2), testsupport::cs_income2(a, p, I)) < 1e-7);
        CHECK(max_rel_err(price_jacobian(o, p, I), testsupport::cs_jacobian(a, p, I)) < 1e-12);
        CHECK(max_rel_err(slutsky(o, p, I).S, testsupport::cs_slutsky(a, p, I)) < 1e-12);
    }
}

TEST_CASE("finite differences agree with the complex-step oracle") {
    Gen gen(19);
    for (int t = 0; t < 100; ++t) {
        const int K = gen.integer(2, 4);
        const Vec p = gen.prices(K);
        const double I = gen.uniform(0.5, 20.0);
        const AidsParams a = gen.admissible_at(K, p, I, 0.05, 0.05);
        const auto bb = DemandOracle::black_box(K, [a](const Vec& q, double m) { return testsupport::aids_real(a, q, m); });
        CHECK(max_rel_err(income_derivs(bb, p, I, 1), testsupport::cs_income(a, p, I)) < 1e-7);
        CHECK(max_rel_err(income_derivs(bb, p, I, 2), testsupport::cs_income2(a, p, I)) < 1e-6);
        CHECK(max_rel_err(price_jacobian(bb, p, I), testsupport::cs_jacobian(a, p, I)) < 1e-7);
    }
}

TEST_CASE("evaluation errors name the failing point") {
    const auto bad = DemandOracle::black_box(2, [](const Vec& p, double I) -> Vec {
        if (I > 1.0) throw std::runtime_error("boom");
        return p * I;
    });
    CHECK_THROWS_AS(income_derivs(bad, v2(1, 1), 1.0, 1), EvaluationError);
    try {
        income_derivs(bad, v2(1, 1), 1.0, 1);
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
        CHECK(std::string(e.what()).find("I = ") != std::string::npos);
    }
    CHECK_THROWS_AS(income_derivs(bad, v2(1, 1), 0.5, 3), PreconditionError);
}

TEST_CASE("oracle construction") {
    const auto o = DemandOracle::aids(cobb_douglas(v2(0.5, 0.5)));
    CHECK(o.kind() == OracleKind::analytic_aids);
    CHECK(o.dim() == 2);
    CHECK(o.aids_params() != nullptr);
    const auto b = cd_black_box(v2(0.5, 0.5));
    CHECK(b.kind() == OracleKind::black_box);
    CHECK(b.aids_params() == nullptr);
    CHECK_THROWS(DemandOracle::aids(AidsParams{v2(0.6, 0.6), v2(0, 0), Mat::Zero(2, 2)}));
}

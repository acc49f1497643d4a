#include "pactest/restrictions.hpp"

#include <algorithm>
#include <cmath>

namespace pactest {

namespace {

constexpr double kSingularTol = 1e-10;
constexpr double kBoundaryTol = 1e-10;

bool is_ratio_partition(const Partition& g) {
    auto g2 = g.g2;
    std::sort(g2.begin(), g2.end());
    return g.g1.size() == 1 && g.g1[0] == 0 && g2 == std::vector<int>{1, 2};
}

bool is_sign_tag(RestrictionTag tag) {
    return tag == RestrictionTag::gross_complement || tag == RestrictionTag::gross_substitute ||
           tag == RestrictionTag::net_complement || tag == RestrictionTag::net_substitute;
}

}  // namespace

void RestrictionKind::validate(int K) const {
    switch (tag) {
        case RestrictionTag::homothetic:
            if (K < 2) throw PreconditionError("homothetic restriction needs K >= 2");
            return;
        case RestrictionTag::weak_separable_ratio:
            if (K != 3 || !is_ratio_partition(groups)) {
                throw PreconditionError("weak_separable_ratio requires K = 3 with groups {1},{2,3}");
            }
            return;
        case RestrictionTag::weak_separable_homothetic:
            if (K < 3) throw PreconditionError("weak_separable_homothetic requires K >= 3");
            groups.validate(K);
            return;
        default:
            if (i == j || i < 0 || j < 0 || i >= K || j >= K) {
                throw PreconditionError("complementarity needs two distinct goods in range");
            }
    }
}

std::string to_string(RestrictionTag tag) {
    switch (tag) {
        case RestrictionTag::homothetic: return "homothetic";
        case RestrictionTag::weak_separable_ratio: return "weak_separable_ratio";
        case RestrictionTag::weak_separable_homothetic: return "weak_separable_homothetic";
        case RestrictionTag::gross_complement: return "gross_complement";
        case RestrictionTag::gross_substitute: return "gross_substitute";
        case RestrictionTag::net_complement: return "net_complement";
        case RestrictionTag::net_substitute: return "net_substitute";
    }
    return "?";
}

RestrictionTag restriction_tag_from_string(const std::string& name) {
    for (auto tag : {RestrictionTag::homothetic, RestrictionTag::weak_separable_ratio,
                     RestrictionTag::weak_separable_homothetic, RestrictionTag::gross_complement,
                     RestrictionTag::gross_substitute, RestrictionTag::net_complement,
                     RestrictionTag::net_substitute}) {
        if (to_string(tag) == name) return tag;
    }
    throw PreconditionError("unknown restriction kind '" + name + "'");
}

Vec r_homothetic(const DemandOracle& oracle, const Vec& prices, double income, HomotheticMode mode,
                 Differentiation diff) {
    if (mode == HomotheticMode::aids_beta) {
        const AidsParams* a = oracle.aids_params();
        if (a == nullptr) throw PreconditionError("aids_beta mode needs an analytic AIDS oracle");
        return -a->beta;
    }
    return income_derivs(oracle, prices, income, 2, diff);
}

double r_weak_separable(const DemandOracle& oracle, const Vec& prices, double income, const Partition& groups,
                        Differentiation diff) {
    if (oracle.dim() != 3 || !is_ratio_partition(groups)) {
        throw PreconditionError("r_weak_separable requires K = 3 with groups {1},{2,3}");
    }
    const Mat S = slutsky(oracle, prices, income, diff).S;
    const Vec dI = income_derivs(oracle, prices, income, 1, diff);
    if (std::abs(S(0, 2)) < kSingularTol || std::abs(dI[2]) < kSingularTol) {
        throw SingularRatio("singular ratio in weak separability restriction (|S13| or |dx3/dI| below 1e-10); "
                            "use weak_separable_homothetic for homothetic demand");
    }
    return S(0, 1) / S(0, 2) - dI[1] / dI[2];
}

double r_weak_separable_homothetic(const DemandOracle& oracle, const Vec& prices, double income,
                                   const Partition& groups, Differentiation diff) {
    if (oracle.dim() < 3) throw PreconditionError("r_weak_separable_homothetic requires K >= 3");
    groups.validate(oracle.dim());
    const Mat S = slutsky(oracle, prices, income, diff).S;
    const Vec dI = income_derivs(oracle, prices, income, 1, diff);
    double total = 0.0;
    for (int i : groups.g1)
        for (int j : groups.g2) total += std::abs(S(i, j) - income * dI[i] * dI[j]);
    return total / static_cast<double>(groups.g1.size() + groups.g2.size());
}

SignCheck r_complementarity(const DemandOracle& oracle, const Vec& prices, double income, RestrictionTag kind,
                            int i, int j, Differentiation diff) {
    if (!is_sign_tag(kind)) throw PreconditionError("r_complementarity: not a complementarity kind");
    const int K = oracle.dim();
    if (i == j || i < 0 || j < 0 || i >= K || j >= K) throw PreconditionError("r_complementarity: need i != j in range");

    const bool gross = kind == RestrictionTag::gross_complement || kind == RestrictionTag::gross_substitute;
    const bool complement = kind == RestrictionTag::gross_complement || kind == RestrictionTag::net_complement;
    const double d = gross ? price_jacobian(oracle, prices, income, diff)(i, j) : slutsky(oracle, prices, income, diff).S(i, j);

    SignCheck out;
    out.derivative = d;
    if (std::abs(d) <= kBoundaryTol) {
        out.boundary = true;
        out.value = 1;
        return out;
    }
    out.value = (complement ? d < 0.0 : d > 0.0) ? 0 : 1;
    return out;
}

Vec restriction_values(const DemandOracle& oracle, const RestrictionKind& kind, const Vec& prices, double income) {
    switch (kind.tag) {
        case RestrictionTag::homothetic:
            return r_homothetic(oracle, prices, income, kind.homothetic_mode, kind.differentiation);
        case RestrictionTag::weak_separable_ratio:
            return Vec::Constant(1, r_weak_separable(oracle, prices, income, kind.groups, kind.differentiation));
        case RestrictionTag::weak_separable_homothetic:
            return Vec::Constant(
                1, r_weak_separable_homothetic(oracle, prices, income, kind.groups, kind.differentiation));
        default:
            return Vec::Constant(
                1, r_complementarity(oracle, prices, income, kind.tag, kind.i, kind.j, kind.differentiation).value);
    }
}

PointError::PointError(std::size_t index, const std::string& what)
    : std::runtime_error("point " + std::to_string(index) + ": " + what), index_(index) {}

NormResult restriction_norm(const DemandOracle& oracle, const RestrictionKind& kind, std::span<const EvalPoint> points,
                            SkipPolicy policy) {
    if (points.empty()) throw PreconditionError("restriction_norm: no evaluation points");
    kind.validate(oracle.dim());
    NormResult out;
    double sum_sq = 0.0;
    std::size_t components = 0;
    for (std::size_t t = 0; t < points.size(); ++t) {
        Vec r;
        try {
            r = restriction_values(oracle, kind, points[t].prices, points[t].income);
        } catch (const SingularRatio& e) {
            if (policy == SkipPolicy::fail) throw PointError(t, e.what());
            ++out.skipped;
            continue;
        } catch (const EvaluationError& e) {
            if (policy == SkipPolicy::fail) throw PointError(t, e.what());
            ++out.skipped;
            continue;
        }
        sum_sq += r.squaredNorm();
        components += static_cast<std::size_t>(r.size());
        ++out.evaluated;
    }
    out.norm = components == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(components));
    return out;
}

}  // namespace pactest

#include "pactest/betweenness.hpp"

#include <algorithm>
#include <cmath>

namespace pactest {

void ClaimEconomy::validate() const {
    const int S = states();
    if (S < 2) throw DimensionError("claim economy needs at least two states");
    if (prices.size() != S) throw DimensionError("claim economy: prices and beliefs differ in length");
    if ((probs.array() <= 0.0).any()) throw DomainError("claim economy: beliefs must be positive");
    if (std::abs(probs.sum() - 1.0) > 1e-12) throw DomainError("claim economy: beliefs must sum to 1");
    if ((prices.array() <= 0.0).any()) throw DomainError("claim economy: prices must be positive");
    if (!(income > 0.0)) throw DomainError("claim economy: income must be positive");
}

Vec crra_eu_demand(const ClaimEconomy& economy, double rho) {
    economy.validate();
    if (!(rho > 0.0)) throw DomainError("crra_eu_demand: rho must be positive");
    const Vec weight = (economy.probs.array() / economy.prices.array()).pow(1.0 / rho).matrix();
    return weight * (economy.income / economy.prices.dot(weight));
}

ClaimDemandOracle crra_oracle(double rho) {
    if (!(rho > 0.0)) throw DomainError("crra_oracle: rho must be positive");
    return {ClaimOracleKind::crra_eu, [rho](const ClaimEconomy& e) { return crra_eu_demand(e, rho); }};
}

ClaimDemandOracle perturbed_oracle(ClaimDemandOracle base, int target, double amplitude, double frequency) {
    return {ClaimOracleKind::perturbed, [base = std::move(base), target, amplitude, frequency](const ClaimEconomy& e) {
                Vec x = base(e);
                for (int t = 0; t < x.size(); ++t) {
                    if (t != target) x[t] *= 1.0 + amplitude * std::sin(frequency * e.prices[t]);
                }
                return Vec(x * (e.income / e.prices.dot(x)));
            }};
}

double k_ratio(const ClaimEconomy& economy, int s) {
    economy.validate();
    if (s < 1 || s >= economy.states()) throw PreconditionError("k_ratio: state index must be in 1..S-1 (0-based)");
    return (economy.probs[0] / economy.probs[s]) * (economy.prices[s] / economy.prices[0]);
}

Vec betweenness_coordinates(const ClaimEconomy& economy, int s) {
    const int S = economy.states();
    Vec z(2 * S - 1);
    int k = 0;
    for (int t = 0; t < S; ++t)
        if (t != s) z[k++] = economy.prices[t];
    z[k++] = economy.income;
    for (int t = 1; t < S; ++t) z[k++] = economy.probs[t];
    return z;
}

ClaimEconomy economy_from_coordinates(const ClaimEconomy& base, int s, const Vec& z) {
    const int S = base.states();
    ClaimEconomy e = base;
    int k = 0;
    for (int t = 0; t < S; ++t)
        if (t != s) e.prices[t] = z[k++];
    e.income = z[k++];
    double rest = 0.0;
    for (int t = 1; t < S; ++t) {
        e.probs[t] = z[k++];
        rest += e.probs[t];
    }
    e.probs[0] = 1.0 - rest;
    return e;
}

BetweennessResult r_betweenness(const ClaimDemandOracle& oracle, const ClaimEconomy& economy, int s) {
    economy.validate();
    const int S = economy.states();
    if (S < 3) throw PreconditionError("r_betweenness: need at least three states");
    if (s < 2 || s >= S) throw PreconditionError("r_betweenness: target state must be in 2..S-1 (0-based)");

    const Vec z0 = betweenness_coordinates(economy, s);
    const auto n = z0.size();
    const double h = 1e-5 * (1.0 + z0.cwiseAbs().maxCoeff());

    // Pinned quantities: x_0, x_1, and log k_s.
    auto pinned = [&](const Vec& z) {
        const ClaimEconomy e = economy_from_coordinates(economy, s, z);
        const Vec x = oracle(e);
        Vec g(3);
        g << x[0], x[1], std::log(k_ratio(e, s));
        return g;
    };

    // fourth-order central stencil; the second-order one tilts the null space enough to show up
    // in x_s when demand is strongly curved (small rho)
    auto stencil = [h](const auto& f, const Vec& z, const Vec& dir) -> decltype(f(z)) {
        return (f(z - 2 * h * dir) - 8.0 * f(z - h * dir) + 8.0 * f(z + h * dir) - f(z + 2 * h * dir)) / (12.0 * h);
    };

    Mat J(3, n);
    for (Eigen::Index c = 0; c < n; ++c) J.col(c) = stencil(pinned, z0, Vec::Unit(n, c));

    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    const double cutoff = 1e-8 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++rank;
    if (rank >= n) throw NoAdmissibleDirection("r_betweenness: constraint Jacobian has full column rank");

    BetweennessResult out;
    out.basis = svd.matrixV().rightCols(n - rank);
    out.derivatives.resize(out.basis.cols());
    auto target = [&](const Vec& z) { return oracle(economy_from_coordinates(economy, s, z))[s]; };
    for (Eigen::Index c = 0; c < out.basis.cols(); ++c)
        out.derivatives[c] = stencil(target, z0, Vec(out.basis.col(c)));
    out.value = out.derivatives.cwiseAbs().maxCoeff();
    return out;
}

}  // namespace pactest

#pragma once

// Contingent-claim demand and the betweenness restriction.
// States are 0-based here: state 0 and state 1 play the roles of x_1 and x_2.

#include "pactest/types.hpp"

#include <functional>

namespace pactest {

/// Complete-market economy over S states.
struct ClaimEconomy {
    Vec probs;   // beliefs, positive, sum to 1
    Vec prices;  // state prices, positive
    double income = 1.0;

    int states() const { return static_cast<int>(probs.size()); }
    void validate() const;
};

enum class ClaimOracleKind { crra_eu, perturbed, black_box };

class ClaimDemandOracle {
public:
    using Fn = std::function<Vec(const ClaimEconomy&)>;

    ClaimDemandOracle(ClaimOracleKind kind, Fn fn) : kind_(kind), fn_(std::move(fn)) {}

    Vec operator()(const ClaimEconomy& economy) const { return fn_(economy); }
    ClaimOracleKind kind() const { return kind_; }

private:
    ClaimOracleKind kind_;
    Fn fn_;
};

/// CRRA expected-utility maximiser: x_s proportional to (pi_s / p_s)^(1/rho), exhausting income.
Vec crra_eu_demand(const ClaimEconomy& economy, double rho);

ClaimDemandOracle crra_oracle(double rho);

/// Every state t != target gets x_t *= 1 + amplitude sin(frequency p_t); the bundle is then
/// rescaled to the budget. Breaks x_target = f(x_0, x_1, k_target).
ClaimDemandOracle perturbed_oracle(ClaimDemandOracle base, int target, double amplitude = 0.05,
                                   double frequency = 3.0);

/// k_s = (pi_0 / pi_s)(p_s / p_0). Requires s >= 1.
double k_ratio(const ClaimEconomy& economy, int s);

class NoAdmissibleDirection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BetweennessResult {
    double value = 0.0;  // max |directional derivative of x_s| over the basis
    Mat basis;           // columns: orthonormal directions in the free coordinates
    Vec derivatives;     // per basis column
};

/// Maximum absolute directional derivative of x_s along directions that keep x_0, x_1 and
/// k_s fixed with p_s pinned. Free coordinates: prices except p_s, income, beliefs pi_1..pi_{S-1}
/// (pi_0 absorbs the difference). Requires S >= 3 and 2 <= s < S.
BetweennessResult r_betweenness(const ClaimDemandOracle& oracle, const ClaimEconomy& economy, int s);

/// Free-coordinate vector of `economy` for target state s, and its inverse.
Vec betweenness_coordinates(const ClaimEconomy& economy, int s);
ClaimEconomy economy_from_coordinates(const ClaimEconomy& base, int s, const Vec& z);

}  // namespace pactest

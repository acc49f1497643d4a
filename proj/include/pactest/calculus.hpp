#pragma once

// Demand calculus: income derivatives, price Jacobians and the Slutsky matrix.
// AIDS oracles take closed-form derivatives; black-box oracles use central differences.

#include "pactest/demand.hpp"

#include <functional>
#include <optional>

namespace pactest {

enum class OracleKind { analytic_aids, black_box };

/// Deterministic demand x(p, I) of dimension K.
class DemandOracle {
public:
    using Fn = std::function<Vec(const Vec& prices, double income)>;

    static DemandOracle aids(AidsParams params);
    static DemandOracle black_box(int K, Fn fn);

    Vec operator()(const Vec& prices, double income) const;
    int dim() const { return dim_; }
    OracleKind kind() const { return kind_; }
    /// AIDS parameters for analytic oracles, nullptr otherwise.
    const AidsParams* aids_params() const { return params_ ? &*params_ : nullptr; }

private:
    DemandOracle() = default;

    int dim_ = 0;
    OracleKind kind_ = OracleKind::black_box;
    std::optional<AidsParams> params_;
    Fn fn_;
};

/// Oracle evaluation failed somewhere inside a difference stencil.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `automatic` differentiates AIDS oracles analytically; `finite_difference` forces the stencil path.
enum class Differentiation { automatic, finite_difference };

/// dx/dI (order 1) or d2x/dI2 (order 2).
/// Black-box steps: h = max(1e-5 I, 1e-7) for order 1; 5-point stencil with h = max(1e-3 I, 1e-5) for order 2.
Vec income_derivs(const DemandOracle& oracle, const Vec& prices, double income, int order,
                  Differentiation mode = Differentiation::automatic);

/// J(i, j) = dx_i / dp_j. Black-box step h_j = 1e-5 p_j.
Mat price_jacobian(const DemandOracle& oracle, const Vec& prices, double income,
                   Differentiation mode = Differentiation::automatic);

struct SlutskyMatrix {
    Mat S;
    Vec prices;
    double income = 0.0;
};

/// S(i, j) = dx_i/dp_j + x_j dx_i/dI.
SlutskyMatrix slutsky(const DemandOracle& oracle, const Vec& prices, double income,
                      Differentiation mode = Differentiation::automatic);

}  // namespace pactest

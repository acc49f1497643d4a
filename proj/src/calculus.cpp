#include "pactest/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pactest {

DemandOracle DemandOracle::aids(AidsParams params) {
    const auto validity = validate_params(params, 1e-9);
    if (!validity.ok) throw PreconditionError("DemandOracle::aids: invalid parameters: " + validity.violations.front());
    DemandOracle o;
    o.dim_ = params.dim();
    o.kind_ = OracleKind::analytic_aids;
    o.params_ = std::move(params);
    return o;
}

DemandOracle DemandOracle::black_box(int K, Fn fn) {
    if (K < 2) throw DimensionError("DemandOracle::black_box: K must be at least 2");
    if (!fn) throw PreconditionError("DemandOracle::black_box: empty function");
    DemandOracle o;
    o.dim_ = K;
    o.kind_ = OracleKind::black_box;
    o.fn_ = std::move(fn);
    return o;
}

Vec DemandOracle::operator()(const Vec& prices, double income) const {
    if (prices.size() != dim_) throw DimensionError("oracle called with wrong price dimension");
    if (params_) return demand(*params_, prices, income);
    Vec x = fn_(prices, income);
    if (x.size() != dim_) throw DimensionError("black-box oracle returned wrong dimension");
    return x;
}

namespace {

Vec eval_at(const DemandOracle& oracle, const Vec& p, double income) {
    try {
        return oracle(p, income);
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << "demand oracle undefined at p = (" << p.transpose() << "), I = " << income << ": " << e.what();
        throw EvaluationError(os.str());
    }
}

bool use_analytic(const DemandOracle& oracle, Differentiation mode) {
    return mode == Differentiation::automatic && oracle.kind() == OracleKind::analytic_aids;
}

}  // namespace

Vec income_derivs(const DemandOracle& oracle, const Vec& prices, double income, int order, Differentiation mode) {
    if (order != 1 && order != 2) throw PreconditionError("income_derivs: order must be 1 or 2");
    if (use_analytic(oracle, mode)) {
        const AidsParams& a = *oracle.aids_params();
        eval_at(oracle, prices, income);  // admissibility at the point itself
        if (order == 2) return (a.beta.array() / (income * prices.array())).matrix();
        const Vec w = budget_shares(a, prices, income);
        return ((w + a.beta).array() / prices.array()).matrix();
    }
    if (order == 1) {
        const double h = std::max(1e-5 * income, 1e-7);
        return (eval_at(oracle, prices, income + h) - eval_at(oracle, prices, income - h)) / (2.0 * h);
    }
    const double h = std::max(1e-3 * income, 1e-5);
    const Vec f0 = eval_at(oracle, prices, income);
    const Vec fp1 = eval_at(oracle, prices, income + h);
    const Vec fm1 = eval_at(oracle, prices, income - h);
    const Vec fp2 = eval_at(oracle, prices, income + 2.0 * h);
    const Vec fm2 = eval_at(oracle, prices, income - 2.0 * h);
    return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
}

Mat price_jacobian(const DemandOracle& oracle, const Vec& prices, double income, Differentiation mode) {
    const int K = oracle.dim();
    if (prices.size() != K) throw DimensionError("price_jacobian: price dimension mismatch");
    if (use_analytic(oracle, mode)) {
        const AidsParams& a = *oracle.aids_params();
        eval_at(oracle, prices, income);
        const Vec lp = prices.array().log().matrix();
        const Vec w = budget_shares(a, prices, income);
        const Vec dlogP = a.alpha + 0.5 * (a.gamma + a.gamma.transpose()) * lp;
        Mat J(K, K);
        for (int i = 0; i < K; ++i) {
            for (int j = 0; j < K; ++j) {
                const double dw = (a.gamma(i, j) - a.beta[i] * dlogP[j]) / prices[j];
                J(i, j) = income / prices[i] * dw;
            }
            J(i, i) -= w[i] * income / (prices[i] * prices[i]);
        }
        return J;
    }
    Mat J(K, K);
    for (int j = 0; j < K; ++j) {
        const double h = 1e-5 * prices[j];
        Vec up = prices, down = prices;
        up[j] += h;
        down[j] -= h;
        J.col(j) = (eval_at(oracle, up, income) - eval_at(oracle, down, income)) / (2.0 * h);
    }
    return J;
}

SlutskyMatrix slutsky(const DemandOracle& oracle, const Vec& prices, double income, Differentiation mode) {
    const Vec x = eval_at(oracle, prices, income);
    const Mat J = price_jacobian(oracle, prices, income, mode);
    const Vec dI = income_derivs(oracle, prices, income, 1, mode);
    return {J + dI * x.transpose(), prices, income};
}

}  // namespace pactest

#include "pactest/learner.hpp"

#include <cmath>
#include <limits>

namespace pactest {

namespace {

struct Layout {
    int K;
    int m;  // free equations, K - 1

    int alpha(int i) const { return i; }
    int beta(int i) const { return m + i; }
    int gamma(int a, int b) const {
        if (a > b) std::swap(a, b);
        // row-major upper triangle of an m x m matrix
        return 2 * m + a * m - a * (a - 1) / 2 + (b - a);
    }
    int size() const { return 2 * m + m * (m + 1) / 2; }
};

AidsParams unpack(const Layout& L, const Vec& theta) {
    AidsParams p;
    const int K = L.K, m = L.m;
    p.alpha.resize(K);
    p.beta.resize(K);
    p.gamma = Mat::Zero(K, K);
    for (int i = 0; i < m; ++i) {
        p.alpha[i] = theta[L.alpha(i)];
        p.beta[i] = theta[L.beta(i)];
        for (int j = 0; j < m; ++j) p.gamma(i, j) = theta[L.gamma(i, j)];
    }
    p.alpha[K - 1] = 1.0 - p.alpha.head(m).sum();
    p.beta[K - 1] = -p.beta.head(m).sum();
    for (int i = 0; i < m; ++i) {
        const double s = p.gamma.row(i).head(m).sum();
        p.gamma(i, K - 1) = -s;
        p.gamma(K - 1, i) = -s;
    }
    p.gamma(K - 1, K - 1) = p.gamma.topLeftCorner(m, m).sum();
    return p;
}

}  // namespace

FitResult fit_aids(const Dataset& data, std::size_t n_use, const FitOptions& opts) {
    data.validate(-1.0);
    const std::size_t n = n_use == 0 ? data.size() : std::min(n_use, data.size());
    const int K = data.dim();
    const Layout L{K, K - 1};
    const int P = L.size();
    const auto rows = static_cast<Eigen::Index>(n) * L.m;
    if (rows < P) {
        throw PreconditionError("fit_aids: " + std::to_string(n) + " observations cannot identify " +
                                std::to_string(P) + " parameters");
    }

    Mat lp(n, K);
    Vec log_income(n);
    Mat shares(n, K);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& ob = data.observations[t];
        lp.row(t) = ob.prices.array().log().matrix().transpose();
        log_income[t] = std::log(ob.income);
        shares.row(t) = (ob.prices.array() * ob.quantities.array() / ob.income).matrix().transpose();
    }

    // Stone-type start: mean shares, no price effects.
    AidsParams current;
    current.alpha = shares.colwise().mean().transpose();
    current.alpha /= current.alpha.sum();
    current.beta = Vec::Zero(K);
    current.gamma = Mat::Zero(K, K);

    Vec y(rows);
    for (std::size_t t = 0; t < n; ++t)
        for (int i = 0; i < L.m; ++i) y[static_cast<Eigen::Index>(t) * L.m + i] = shares(t, i);

    FitResult result;
    Vec theta_prev = Vec::Constant(P, std::numeric_limits<double>::infinity());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Mat X = Mat::Zero(rows, P);
        for (std::size_t t = 0; t < n; ++t) {
            const Vec lpt = lp.row(t).transpose();
            const double log_p_index = current.alpha.dot(lpt) + 0.5 * lpt.dot(current.gamma * lpt);
            const double real_income = log_income[t] - log_p_index;
            for (int i = 0; i < L.m; ++i) {
                const auto r = static_cast<Eigen::Index>(t) * L.m + i;
                X(r, L.alpha(i)) = 1.0;
                X(r, L.beta(i)) = real_income;
                for (int j = 0; j < L.m; ++j) X(r, L.gamma(i, j)) += lpt[j] - lpt[K - 1];
            }
        }
        Eigen::ColPivHouseholderQR<Mat> qr(X);
        if (qr.rank() < P) {
            throw PreconditionError("fit_aids: price variation too small to identify the AIDS parameters");
        }
        const Vec theta = qr.solve(y);
        current = unpack(L, theta);
        result.iterations = it;
        result.rms_share_residual = std::sqrt((X * theta - y).squaredNorm() / static_cast<double>(rows));
        const double step = (theta - theta_prev).cwiseAbs().maxCoeff();
        theta_prev = theta;
        if (step < opts.tolerance) break;
    }
    result.params = current;
    return result;
}

}  // namespace pactest

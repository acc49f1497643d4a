#pragma once

// Independent oracles and generators for the test suites. Nothing here calls the library's
// demand or derivative code.

#include "pactest/demand.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace testsupport {

using pactest::AidsParams;
using pactest::Mat;
using pactest::Vec;
using cplx = std::complex<double>;

/// AIDS quantities evaluated in complex arithmetic, written from the textbook formulas.
inline std::vector<cplx> aids_complex(const AidsParams& a, const std::vector<cplx>& p, cplx I) {
    const std::size_t K = p.size();
    std::vector<cplx> lp(K);
    for (std::size_t k = 0; k < K; ++k) lp[k] = std::log(p[k]);
    cplx logP = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        logP += a.alpha[k] * lp[k];
        for (std::size_t j = 0; j < K; ++j) logP += 0.5 * a.gamma(k, j) * lp[k] * lp[j];
    }
    std::vector<cplx> x(K);
    for (std::size_t i = 0; i < K; ++i) {
        cplx w = a.alpha[i] + a.beta[i] * (std::log(I) - logP);
        for (std::size_t j = 0; j < K; ++j) w += a.gamma(i, j) * lp[j];
        x[i] = w * I / p[i];
    }
    return x;
}

inline Vec aids_real(const AidsParams& a, const Vec& p, double I) {
    std::vector<cplx> pc(p.data(), p.data() + p.size());
    const auto x = aids_complex(a, pc, I);
    Vec out(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) out[k] = x[k].real();
    return out;
}

constexpr double kCs = 1e-20;  // complex-step size

/// dx/dI by complex step (exact to rounding).
inline Vec cs_income(const AidsParams& a, const Vec& p, double I) {
    std::vector<cplx> pc(p.data(), p.data() + p.size());
    const auto x = aids_complex(a, pc, cplx(I, kCs));
    Vec out(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) out[k] = x[k].imag() / kCs;
    return out;
}

/// d2x/dI2: central difference of the complex-step first derivative.
inline Vec cs_income2(const AidsParams& a, const Vec& p, double I) {
    const double h = 1e-3 * I;
    return (cs_income(a, p, I + h) - cs_income(a, p, I - h)) / (2.0 * h);
}

/// J(i, j) = dx_i/dp_j by complex step.
inline Mat cs_jacobian(const AidsParams& a, const Vec& p, double I) {
    const auto K = p.size();
    Mat J(K, K);
    for (Eigen::Index j = 0; j < K; ++j) {
        std::vector<cplx> pc(p.data(), p.data() + K);
        pc[j] += cplx(0.0, kCs);
        const auto x = aids_complex(a, pc, I);
        for (Eigen::Index i = 0; i < K; ++i) J(i, j) = x[i].imag() / kCs;
    }
    return J;
}

inline Mat cs_slutsky(const AidsParams& a, const Vec& p, double I) {
    const Vec x = aids_real(a, p, I);
    const Vec dI = cs_income(a, p, I);
    return cs_jacobian(a, p, I) + dI * x.transpose();
}

/// Hand-rolled generator for valid AIDS parameters: gamma is a random nonnegative combination
/// of (e_i - e_j)(e_i - e_j)^T with random sign, which is symmetric with zero row sums.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    AidsParams params(int K, double gamma_scale, double beta_scale, bool homothetic = false) {
        AidsParams a;
        a.alpha = Vec(K);
        for (int k = 0; k < K; ++k) a.alpha[k] = uniform(0.2, 1.0);
        a.alpha /= a.alpha.sum();
        a.beta = Vec::Zero(K);
        if (!homothetic) {
            for (int k = 0; k < K; ++k) a.beta[k] = uniform(-beta_scale, beta_scale);
            a.beta.array() -= a.beta.mean();
        }
        a.gamma = Mat::Zero(K, K);
        for (int i = 0; i < K; ++i)
            for (int j = i + 1; j < K; ++j) {
                const double c = uniform(-gamma_scale, gamma_scale);
                a.gamma(i, i) -= c;
                a.gamma(j, j) -= c;
                a.gamma(i, j) += c;
                a.gamma(j, i) += c;
            }
        return a;
    }

    Vec prices(int K, double lo = 0.5, double hi = 2.0) {
        Vec p(K);
        for (int k = 0; k < K; ++k) p[k] = uniform(lo, hi);
        return p;
    }

    /// Params whose shares stay strictly inside (0, 1) at the sampled point.
    AidsParams admissible_at(int K, const Vec& p, double I, double gamma_scale, double beta_scale,
                             bool homothetic = false) {
        for (;;) {
            AidsParams a = params(K, gamma_scale, beta_scale, homothetic);
            const Vec x = aids_real(a, p, I);
            const Vec w = (x.array() * p.array() / I).matrix();
            if ((w.array() > 0.02).all() && (w.array() < 0.98).all()) return a;
        }
    }
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double max_rel_err(const Mat& a, const Mat& b) {
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testsupport

#include "pactest/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

namespace pactest {

namespace {

void check_shapes(const AidsParams& params) {
    const auto K = params.alpha.size();
    if (K < 2) throw DimensionError("AIDS needs at least two goods");
    if (params.beta.size() != K) throw DimensionError("beta length differs from alpha length");
    if (params.gamma.rows() != static_cast<Eigen::Index>(K) || params.gamma.cols() != static_cast<Eigen::Index>(K)) {
        throw DimensionError("gamma must be K x K");
    }
}

Vec log_prices(const Vec& prices) {
    if ((prices.array() <= 0.0).any() || !prices.allFinite()) {
        throw DomainError("prices must be strictly positive and finite");
    }
    return prices.array().log().matrix();
}

std::string fmt_index(int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

// Double-centre a symmetric block: rows and columns then sum to zero.
Mat double_centre(const Mat& block) {
    const auto n = block.rows();
    Mat centre = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / static_cast<double>(n));
    return centre * block * centre;
}

Mat separable_gamma(const Mat& sym, const Partition& groups) {
    Mat out = Mat::Zero(sym.rows(), sym.cols());
    for (const auto* g : {&groups.g1, &groups.g2}) {
        const auto n = static_cast<Eigen::Index>(g->size());
        Mat block(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) block(a, b) = sym((*g)[a], (*g)[b]);
        Mat centred = double_centre(block);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) out((*g)[a], (*g)[b]) = centred(a, b);
    }
    return out;
}

bool is_separable(ClassTag tag) {
    return tag == ClassTag::weakly_separable || tag == ClassTag::homothetic_weakly_separable;
}

bool is_homothetic(ClassTag tag) {
    return tag == ClassTag::homothetic || tag == ClassTag::homothetic_weakly_separable;
}

}  // namespace

Validity validate_params(const AidsParams& params, double tol) {
    check_shapes(params);
    const int K = params.dim();
    Validity v;
    auto fail = [&v](std::string msg) {
        v.ok = false;
        v.violations.push_back(std::move(msg));
    };
    if (!params.alpha.allFinite() || !params.beta.allFinite() || !params.gamma.allFinite()) {
        fail("non-finite parameter");
    }
    if (std::abs(params.alpha.sum() - 1.0) > tol) fail("sum(alpha) != 1");
    if (std::abs(params.beta.sum()) > tol) fail("sum(beta) != 0");
    for (int j = 0; j < K; ++j) {
        if (std::abs(params.gamma.col(j).sum()) > tol) fail("gamma column " + std::to_string(j + 1) + " does not sum to 0");
    }
    for (int i = 0; i < K; ++i) {
        if (std::abs(params.gamma.row(i).sum()) > tol) fail("gamma row " + std::to_string(i + 1) + " does not sum to 0");
    }
    for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
            if (std::abs(params.gamma(i, j) - params.gamma(j, i)) > tol) fail("asymmetric gamma at " + fmt_index(i, j));
        }
    }
    return v;
}

double price_index(const AidsParams& params, const Vec& prices) {
    check_shapes(params);
    if (prices.size() != params.alpha.size()) throw DimensionError("price vector length differs from K");
    const Vec lp = log_prices(prices);
    return std::exp(params.alpha.dot(lp) + 0.5 * lp.dot(params.gamma * lp));
}

Vec budget_shares(const AidsParams& params, const Vec& prices, double income) {
    if (!(income > 0.0) || !std::isfinite(income)) throw DomainError("income must be positive");
    const double log_real_income = std::log(income) - std::log(price_index(params, prices));
    const Vec lp = prices.array().log().matrix();
    return params.alpha + params.gamma * lp + params.beta * log_real_income;
}

DemandUndefined::DemandUndefined(const std::string& what, Vec prices, double income)
    : std::runtime_error(what), prices_(std::move(prices)), income_(income) {}

Vec demand(const AidsParams& params, const Vec& prices, double income) {
    const Vec w = budget_shares(params, prices, income);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0 || w[i] > 1.0) {
            std::ostringstream os;
            os << "demand undefined at this point: share " << i + 1 << " = " << w[i] << " at p = ("
               << prices.transpose() << "), I = " << income;
            throw DemandUndefined(os.str(), prices, income);
        }
    }
    return (w.array() * income / prices.array()).matrix();
}

bool shares_admissible(const AidsParams& params, const std::vector<EvalPoint>& points) {
    for (const auto& pt : points) {
        const Vec w = budget_shares(params, pt.prices, pt.income);
        if ((w.array() < 0.0).any() || (w.array() > 1.0).any() || !w.allFinite()) return false;
    }
    return true;
}

void Partition::validate(int K) const {
    if (g1.empty() || g2.empty()) throw PreconditionError("partition groups must both be nonempty");
    std::set<int> seen;
    for (const auto* g : {&g1, &g2}) {
        for (int i : *g) {
            if (i < 0 || i >= K) throw PreconditionError("partition index out of range");
            if (!seen.insert(i).second) throw PreconditionError("partition groups overlap");
        }
    }
    if (static_cast<int>(seen.size()) != K) throw PreconditionError("partition does not cover every good");
}

std::string to_string(ClassTag tag) {
    switch (tag) {
        case ClassTag::unrestricted: return "unrestricted";
        case ClassTag::homothetic: return "homothetic";
        case ClassTag::weakly_separable: return "weakly_separable";
        case ClassTag::homothetic_weakly_separable: return "homothetic_weakly_separable";
    }
    return "?";
}

ClassTag class_tag_from_string(const std::string& name) {
    for (auto tag : {ClassTag::unrestricted, ClassTag::homothetic, ClassTag::weakly_separable,
                     ClassTag::homothetic_weakly_separable}) {
        if (to_string(tag) == name) return tag;
    }
    throw PreconditionError("unknown class tag '" + name + "'");
}

std::vector<EvalPoint> admissibility_points(int K, const SamplingLaw& law) {
    law.box.validate();
    std::vector<EvalPoint> pts;
    if (K <= 12) {
        for (unsigned mask = 0; mask < (1u << K); ++mask) {
            Vec p(K);
            for (int k = 0; k < K; ++k) p[k] = (mask >> k) & 1u ? law.box.hi : law.box.lo;
            pts.push_back({p, law.income});
        }
    }
    pts.push_back({Vec::Constant(K, std::sqrt(law.box.lo * law.box.hi)), law.income});
    auto extra = draw_points(K, static_cast<std::size_t>(std::max(0, law.check_points)), law.box, law.income,
                             derive_seed(0x5eed, static_cast<std::uint64_t>(K)));
    pts.insert(pts.end(), extra.begin(), extra.end());
    return pts;
}

AidsParams sample_params(int K, const ClassSpec& cls, std::uint64_t seed, const SamplingLaw& law) {
    if (K < 2) throw DimensionError("sample_params: K must be at least 2");
    if (is_separable(cls.tag)) cls.groups.validate(K);
    const auto check = admissibility_points(K, law);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gdist(-law.gamma_halfwidth, law.gamma_halfwidth);
    std::uniform_real_distribution<double> bdist(-law.beta_max, law.beta_max);

    for (int attempt = 0; attempt < law.max_retries; ++attempt) {
        AidsParams p;
        p.alpha.resize(K);
        for (int i = 0; i < K; ++i) p.alpha[i] = unit(rng);
        p.alpha /= p.alpha.sum();

        Mat raw(K, K);
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) raw(i, j) = gdist(rng);
        const Mat sym = 0.5 * (raw + raw.transpose());
        p.gamma = is_separable(cls.tag) ? separable_gamma(sym, cls.groups) : double_centre(sym);

        p.beta = Vec::Zero(K);
        if (!is_homothetic(cls.tag)) {
            for (int i = 0; i < K; ++i) p.beta[i] = bdist(rng);
            p.beta.array() -= p.beta.mean();
        }
        // Exact adding-up after floating-point centring.
        p.alpha[K - 1] = 1.0 - p.alpha.head(K - 1).sum();
        p.beta[K - 1] = -p.beta.head(K - 1).sum();
        p.gamma = 0.5 * (p.gamma + p.gamma.transpose()).eval();

        if (shares_admissible(p, check)) return p;
    }
    std::ostringstream os;
    os << "sample_params: no admissible draw for class " << to_string(cls.tag) << " after " << law.max_retries
       << " attempts (K=" << K << ", box=[" << law.box.lo << "," << law.box.hi << "], income=" << law.income
       << ", beta_max=" << law.beta_max << ", gamma_halfwidth=" << law.gamma_halfwidth << ")";
    throw SamplingFailure(os.str());
}

AidsParams project_to_class(const AidsParams& params, const ClassSpec& cls) {
    check_shapes(params);
    AidsParams out = params;
    if (is_homothetic(cls.tag)) out.beta.setZero();
    if (is_separable(cls.tag)) {
        cls.groups.validate(params.dim());
        out.gamma = separable_gamma(0.5 * (params.gamma + params.gamma.transpose()), cls.groups);
    }
    return out;
}

std::string params_hash(const AidsParams& params) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](double x) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &x, sizeof x);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    };
    for (Eigen::Index i = 0; i < params.alpha.size(); ++i) feed(params.alpha[i]);
    for (Eigen::Index i = 0; i < params.beta.size(); ++i) feed(params.beta[i]);
    for (Eigen::Index i = 0; i < params.gamma.size(); ++i) feed(params.gamma.data()[i]);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int Dataset::dim() const {
    return observations.empty() ? 0 : static_cast<int>(observations.front().prices.size());
}

void Dataset::validate(double budget_rel_tol) const {
    const int K = dim();
    for (std::size_t t = 0; t < observations.size(); ++t) {
        const auto& ob = observations[t];
        const std::string where = "observation " + std::to_string(t + 1) + ": ";
        if (ob.prices.size() != K || ob.quantities.size() != K) throw DimensionError(where + "dimension mismatch");
        if (K < 2) throw DimensionError(where + "K must be at least 2");
        if ((ob.prices.array() <= 0.0).any() || !ob.prices.allFinite()) throw DomainError(where + "nonpositive price");
        if (!(ob.income > 0.0) || !std::isfinite(ob.income)) throw DomainError(where + "nonpositive income");
        if ((ob.quantities.array() < 0.0).any() || !ob.quantities.allFinite()) {
            throw DomainError(where + "negative or non-finite quantity");
        }
        if (budget_rel_tol >= 0.0 && ob.prices.dot(ob.quantities) > ob.income * (1.0 + budget_rel_tol)) {
            throw DomainError(where + "spending exceeds income");
        }
    }
}

NoiseFamily noise_family_from_string(const std::string& name) {
    if (name == "none") return NoiseFamily::none;
    if (name == "uniform") return NoiseFamily::uniform;
    if (name == "truncated-gaussian" || name == "truncated_gaussian") return NoiseFamily::truncated_gaussian;
    throw PreconditionError("unknown noise family '" + name + "'");
}

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::none: return "none";
        case NoiseFamily::uniform: return "uniform";
        case NoiseFamily::truncated_gaussian: return "truncated-gaussian";
    }
    return "?";
}

namespace {

// Variance of a standard normal truncated to [-2, 2].
constexpr double kTruncatedVarianceAt2 = 0.77374014980457563;

class NoiseSampler {
public:
    NoiseSampler(const NoiseSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
        if (spec.variance < 0.0) throw DomainError("noise variance must be nonnegative");
    }

    double operator()() {
        if (spec_.family == NoiseFamily::none || spec_.variance == 0.0) return 0.0;
        if (spec_.family == NoiseFamily::uniform) {
            const double a = std::sqrt(3.0 * spec_.variance);
            return std::uniform_real_distribution<double>(-a, a)(rng_);
        }
        const double sigma = std::sqrt(spec_.variance / kTruncatedVarianceAt2);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (;;) {
            const double z = normal(rng_);
            if (std::abs(z) <= 2.0) return sigma * z;
        }
    }

private:
    NoiseSpec spec_;
    std::mt19937_64 rng_;
};

}  // namespace

Dataset generate_dataset(const AidsParams& params, std::size_t n, const PriceLaw& law, double income,
                         const NoiseSpec& noise, int max_redraws) {
    if (n < 1) throw PreconditionError("generate_dataset: n must be at least 1");
    law.box.validate();
    const int K = params.dim();
    check_shapes(params);

    std::mt19937_64 price_rng(derive_seed(law.seed, 1));
    std::uniform_real_distribution<double> unif(law.box.lo, law.box.hi);
    NoiseSampler eta(noise, derive_seed(law.seed, 2));

    Dataset ds;
    ds.observations.reserve(n);
    int redraws = 0;
    std::size_t clipped = 0;
    while (ds.observations.size() < n) {
        Vec p(K);
        for (int k = 0; k < K; ++k) p[k] = unif(price_rng);
        Vec x;
        try {
            x = demand(params, p, income);
        } catch (const DemandUndefined& e) {
            if (++redraws > max_redraws) {
                throw DemandUndefined(std::string("generate_dataset: redraw budget exhausted; last failure: ") + e.what(),
                                      e.prices(), e.income());
            }
            continue;
        }
        for (int k = 0; k < K; ++k) {
            x[k] += eta();
            if (x[k] < 0.0) {
                x[k] = 0.0;
                ++clipped;
            }
        }
        ds.observations.push_back({p, x, income});
    }
    std::ostringstream label;
    label << "simulated seed=" << law.seed << " params=" << params_hash(params) << " n=" << n
          << " noise=" << to_string(noise.family) << ":" << format_double(noise.variance) << " clipped=" << clipped
          << " redraws=" << redraws;
    ds.label = label.str();
    return ds;
}

}  // namespace pactest

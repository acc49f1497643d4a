#include "pactest/learnability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pactest {

void LearnSpec::validate() const {
    if (!(L >= 0.0)) throw DomainError("LearnSpec: L must be nonnegative");
    if (!(scale_C > 0.0)) throw DomainError("LearnSpec: scale constant must be positive");
    if (K < 1) throw DimensionError("LearnSpec: K must be positive");
}

double fat_shattering(double L, int K, double eps) {
    if (!(eps > 0.0)) throw DomainError("fat_shattering: eps must be positive");
    if (!(L >= 0.0)) throw DomainError("fat_shattering: L must be nonnegative");
    return std::pow(L / eps, K);
}

std::size_t sample_size(double eps, double delta, const LearnSpec& spec) {
    spec.validate();
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("sample_size: eps must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("sample_size: delta must lie in (0, 1)");
    const double log_inv_eps = std::log(1.0 / eps);
    const double bound = spec.scale_C / (eps * eps) *
                         (log_inv_eps * log_inv_eps * fat_shattering(spec.L, spec.K, eps) + std::log(1.0 / delta));
    constexpr double kCap = 1e18;
    if (!std::isfinite(bound) || bound >= kCap) return static_cast<std::size_t>(kCap);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bound)));
}

double aids_lipschitz(double beta_max, double income_min) {
    if (!(income_min > 0.0)) throw DomainError("aids_lipschitz: income must be positive");
    return std::abs(beta_max) / income_min;
}

namespace {

// Demand of `oracle` stacked over points (T*K values).
Vec stacked_demand(const DemandOracle& oracle, std::span<const EvalPoint> points) {
    const int K = oracle.dim();
    Vec out(static_cast<Eigen::Index>(points.size()) * K);
    for (std::size_t t = 0; t < points.size(); ++t) {
        try {
            out.segment(static_cast<Eigen::Index>(t) * K, K) = oracle(points[t].prices, points[t].income);
        } catch (const std::exception& e) {
            throw PointError(t, e.what());
        }
    }
    return out;
}

double rms(const Vec& a, const Vec& b) { return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size())); }

}  // namespace

double erf_distance(const DemandOracle& a, const DemandOracle& b, std::span<const EvalPoint> points) {
    if (a.dim() != b.dim()) throw DimensionError("erf_distance: oracles differ in dimension");
    if (points.empty()) throw PreconditionError("erf_distance: no points");
    return rms(stacked_demand(a, points), stacked_demand(b, points));
}

std::string to_string(GammaVariant v) { return v == GammaVariant::literal ? "literal" : "max-min"; }

GammaVariant gamma_variant_from_string(const std::string& name) {
    if (name == "literal") return GammaVariant::literal;
    if (name == "max-min" || name == "max_min") return GammaVariant::max_min;
    throw PreconditionError("unknown gamma variant '" + name + "'");
}

double GammaTable::operator()(double norm) const {
    std::vector<const GammaRow*> finite;
    for (const auto& r : rows)
        if (std::isfinite(r.eps)) finite.push_back(&r);
    if (finite.empty()) {
        if (rows.empty()) throw PreconditionError("GammaTable: empty table");
        return rows.back().gamma;
    }
    if (norm <= finite.front()->eps) return finite.front()->gamma;
    for (std::size_t k = 1; k < finite.size(); ++k) {
        const GammaRow& lo = *finite[k - 1];
        const GammaRow& hi = *finite[k];
        if (norm <= hi.eps) {
            if (hi.eps == lo.eps) return hi.gamma;
            return lo.gamma + (hi.gamma - lo.gamma) * (norm - lo.eps) / (hi.eps - lo.eps);
        }
    }
    if (finite.size() == 1) return finite.front()->gamma;
    const GammaRow& lo = *finite[finite.size() - 2];
    const GammaRow& hi = *finite.back();
    const double slope = hi.eps == lo.eps ? 0.0 : (hi.gamma - lo.gamma) / (hi.eps - lo.eps);
    return hi.gamma + slope * (norm - hi.eps);
}

namespace {

AidsParams draw_member(int K, const ClassSpec& cls, std::uint64_t seed, std::uint64_t stream, std::size_t index,
                       const SamplingLaw& law, std::span<const EvalPoint> points) {
    constexpr int kRedraws = 200;
    const std::vector<EvalPoint> pts(points.begin(), points.end());
    for (int r = 0; r < kRedraws; ++r) {
        AidsParams p = sample_params(K, cls, derive_seed(seed, stream, index * kRedraws + r), law);
        if (shares_admissible(p, pts)) return p;
    }
    throw SamplingFailure("estimate_gamma: no " + to_string(cls.tag) + " draw admissible on the point grid");
}

}  // namespace

GammaTable estimate_gamma(const GammaSettings& s) {
    if (s.pairs < 1) throw PreconditionError("estimate_gamma: need at least one pair");
    s.kind.validate(s.K);
    for (double e : s.eps_grid)
        if (!(e >= 0.0)) throw DomainError("estimate_gamma: eps grid must be nonnegative");

    const std::vector<EvalPoint> points =
        s.points.empty() ? draw_points(s.K, s.grid_points, s.law.box, s.law.income, derive_seed(s.seed, 10)) : s.points;
    if (points.empty()) throw PreconditionError("estimate_gamma: empty point grid");

    const ClassSpec unrestricted{ClassTag::unrestricted, {}};
    const std::size_t S = s.pairs;
    std::vector<AidsParams> ms(S);
    std::vector<Vec> dem_m(S), dem_c(S);
    std::vector<double> norm_m(S), dist(S);
    std::vector<std::string> warnings;

    for (std::size_t i = 0; i < S; ++i) {
        ms[i] = draw_member(s.K, unrestricted, s.seed, 20, i, s.law, points);
        const AidsParams c = draw_member(s.K, s.cls, s.seed, 30, i, s.law, points);
        const auto om = DemandOracle::aids(ms[i]);
        dem_m[i] = stacked_demand(om, points);
        dem_c[i] = stacked_demand(DemandOracle::aids(c), points);
        const NormResult nr = restriction_norm(om, s.kind, points, SkipPolicy::skip_and_count);
        norm_m[i] = nr.evaluated == 0 ? std::numeric_limits<double>::infinity() : nr.norm;
    }

    std::size_t projections_used = 0;
    for (std::size_t i = 0; i < S; ++i) {
        if (s.variant == GammaVariant::literal) {
            dist[i] = rms(dem_c[i], dem_m[i]);
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < S; ++j) best = std::min(best, rms(dem_c[j], dem_m[i]));
        // The class projection is a C candidate whenever it is admissible on the grid.
        const AidsParams proj = project_to_class(ms[i], s.cls);
        if (shares_admissible(proj, points)) {
            const double d = rms(stacked_demand(DemandOracle::aids(proj), points), dem_m[i]);
            if (d < best) ++projections_used;
            best = std::min(best, d);
        }
        dist[i] = best;
    }

    std::vector<double> grid = s.eps_grid;
    if (grid.empty()) {
        grid.push_back(0.0);
        for (double n : norm_m)
            if (std::isfinite(n)) grid.push_back(n);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norm_m[a] < norm_m[b]; });

    GammaTable table;
    std::size_t idx = 0;
    double running = 0.0;
    for (double eps : grid) {
        while (idx < S && norm_m[order[idx]] <= eps) running = std::max(running, dist[order[idx++]]);
        table.rows.push_back({eps, running, idx});
        if (idx == 0) warnings.push_back("empty A at eps=" + format_double(eps) + "; gamma set to 0");
    }

    auto& prov = table.provenance;
    prov.push_back("class=" + to_string(s.cls.tag));
    prov.push_back("restriction=" + to_string(s.kind.tag));
    prov.push_back("K=" + std::to_string(s.K));
    prov.push_back("pairs=" + std::to_string(S));
    prov.push_back("grid_points=" + std::to_string(points.size()) + (s.points.empty() ? " (box)" : " (explicit)"));
    prov.push_back("seed=" + std::to_string(s.seed));
    prov.push_back("variant=" + to_string(s.variant));
    prov.push_back("box=" + format_double(s.law.box.lo) + "," + format_double(s.law.box.hi));
    prov.push_back("income=" + format_double(s.law.income));
    prov.push_back("beta_max=" + format_double(s.law.beta_max));
    prov.push_back("gamma_halfwidth=" + format_double(s.law.gamma_halfwidth));
    if (s.variant == GammaVariant::max_min) prov.push_back("projection_nearest=" + std::to_string(projections_used));
    table.warnings = std::move(warnings);
    return table;
}

}  // namespace pactest

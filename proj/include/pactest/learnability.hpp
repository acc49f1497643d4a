#pragma once

// Sample complexity and the gamma modulus linking restriction norms to distances from the class.

#include "pactest/restrictions.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pactest {

struct LearnSpec {
    double L = 0.0;        // income-Lipschitz constant
    int K = 2;             // goods
    double scale_C = 20.0; // constant in front of the bound

    void validate() const;
};

/// (L / eps)^K.
double fat_shattering(double L, int K, double eps);

/// ceil(C / eps^2 * (ln^2(1/eps) fat(eps) + ln(1/delta))), at least 1.
std::size_t sample_size(double eps, double delta, const LearnSpec& spec);

/// Income-Lipschitz constant of AIDS demand with |beta_k| <= beta_max at income >= income_min.
double aids_lipschitz(double beta_max, double income_min);

/// RMS distance between two demand functions over the points (all goods, all points).
double erf_distance(const DemandOracle& a, const DemandOracle& b, std::span<const EvalPoint> points);

enum class GammaVariant { literal, max_min };

std::string to_string(GammaVariant v);
GammaVariant gamma_variant_from_string(const std::string& name);

struct GammaRow {
    double eps = 0.0;
    double gamma = 0.0;
    std::size_t n_in_A = 0;
};

/// gamma(eps) tabulated on an increasing eps grid, with provenance lines.
struct GammaTable {
    std::vector<GammaRow> rows;
    std::vector<std::string> provenance;
    std::vector<std::string> warnings;

    /// Piecewise-linear interpolation; flat below the first row, linear extrapolation
    /// (last segment's slope) above the last finite row.
    double operator()(double norm) const;
};

struct GammaSettings {
    ClassSpec cls;                 // class C
    RestrictionKind kind;          // restriction whose norm filters A
    int K = 2;
    std::size_t pairs = 500;       // S pairs
    std::size_t grid_points = 200; // T evaluation points per pair
    std::uint64_t seed = 1;
    GammaVariant variant = GammaVariant::max_min;
    SamplingLaw law;               // box and income for sampling and for the point grid
    /// Explicit point grid (e.g. an empirical price distribution); drawn from law.box when empty.
    std::vector<EvalPoint> points;
    /// Explicit eps grid. Empty: 0 followed by every sampled M-norm (exact breakpoints).
    std::vector<double> eps_grid;
};

/// Monte-Carlo estimate of gamma. Samples `pairs` M-members (unrestricted AIDS) and `pairs`
/// C-members; A(eps) is the set of M-members whose restriction norm is <= eps.
///   literal: gamma(eps) = max over A of erf(C_i, M_i) for the i-th independent pair.
///   max_min: gamma(eps) = max over A of min over {C samples, class projection of M} of erf.
GammaTable estimate_gamma(const GammaSettings& settings);

}  // namespace pactest

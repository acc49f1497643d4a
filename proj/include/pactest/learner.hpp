#pragma once

#include "pactest/demand.hpp"

namespace pactest {

struct FitOptions {
    int max_iterations = 50;     // price-index fixed-point iterations
    double tolerance = 1e-13;    // stop when parameters move less than this (max abs)
};

struct FitResult {
    AidsParams params;
    int iterations = 0;
    double rms_share_residual = 0.0;
};

/// Least-squares projection of observed budget shares onto the AIDS family, with adding-up,
/// homogeneity and symmetry imposed by construction. The translog index is iterated from a
/// Stone-index start. Uses the first `n_use` observations (all when n_use == 0).
///
/// This is the candidate demand that dataset-mode tests evaluate restrictions on.
FitResult fit_aids(const Dataset& data, std::size_t n_use = 0, const FitOptions& opts = {});

}  // namespace pactest

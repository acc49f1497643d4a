#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pactest {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Inputs of inconsistent shape (vector lengths, matrix sizes, K < 2, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value outside the mathematical domain of an operation (nonpositive price, eps <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Violated precondition that is neither a shape nor a domain problem.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed price box [lo, hi]^K used to draw prices.
struct PriceBox {
    double lo = 0.5;
    double hi = 2.0;

    void validate() const;
};

/// A (prices, income) evaluation point.
struct EvalPoint {
    Vec prices;
    double income = 1.0;
};

/// Derive an independent 64-bit seed for stream `stream`, item `index` of a base seed.
/// splitmix64 finaliser; stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

/// Draw `n` points uniformly from box^K at fixed income.
std::vector<EvalPoint> draw_points(int K, std::size_t n, const PriceBox& box, double income,
                                   std::uint64_t seed);

/// Fixed-width decimal rendering with enough digits for an exact round trip.
std::string format_double(double x);

}  // namespace pactest

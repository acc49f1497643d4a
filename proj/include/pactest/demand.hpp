#pragma once

// AIDS demand family: parameters, evaluation, sampling, and dataset generation.

#include "pactest/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pactest {

/// One AIDS preference: intercept shares alpha, income coefficients beta, price matrix gamma.
struct AidsParams {
    Vec alpha;
    Vec beta;
    Mat gamma;

    int dim() const { return static_cast<int>(alpha.size()); }
};

struct Validity {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks adding-up, homogeneity and symmetry of `params` at tolerance `tol`.
/// Throws DimensionError when alpha/beta/gamma shapes disagree (that is not a constraint violation).
Validity validate_params(const AidsParams& params, double tol = 1e-12);

/// Translog price index P(p) = exp(sum a_k log p_k + 1/2 sum_jk g_kj log p_k log p_j).
double price_index(const AidsParams& params, const Vec& prices);

/// Budget shares w_i = a_i + sum_j g_ij log p_j + b_i log(I / P). No admissibility check.
Vec budget_shares(const AidsParams& params, const Vec& prices, double income);

/// Thrown when some budget share leaves [0, 1]; the AIDS approximation is undefined there.
class DemandUndefined : public std::runtime_error {
public:
    DemandUndefined(const std::string& what, Vec prices, double income);
    const Vec& prices() const { return prices_; }
    double income() const { return income_; }

private:
    Vec prices_;
    double income_;
};

/// Marshallian demand x_i = w_i I / p_i.
Vec demand(const AidsParams& params, const Vec& prices, double income);

/// True when every share is inside [0, 1] at every point.
bool shares_admissible(const AidsParams& params, const std::vector<EvalPoint>& points);

/// A partition of goods into two groups (0-based indices).
struct Partition {
    std::vector<int> g1;
    std::vector<int> g2;

    /// Throws PreconditionError unless g1, g2 are nonempty, disjoint and cover 0..K-1.
    void validate(int K) const;
};

enum class ClassTag { unrestricted, homothetic, weakly_separable, homothetic_weakly_separable };

struct ClassSpec {
    ClassTag tag = ClassTag::unrestricted;
    Partition groups;  // used by the separable tags only
};

std::string to_string(ClassTag tag);
ClassTag class_tag_from_string(const std::string& name);

/// Distributional choices behind sample_params.
struct SamplingLaw {
    PriceBox box;
    double income = 1.0;
    double gamma_halfwidth = 0.1;  // raw gamma entries ~ U[-h, h] before projection
    double beta_max = 0.1;         // beta_i ~ U[-beta_max, beta_max], centred
    int max_retries = 2000;
    int check_points = 64;  // random box points (besides corners) used for admissibility
};

class SamplingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Draw AIDS parameters in the requested class, admissible on `law.box` at `law.income`.
AidsParams sample_params(int K, const ClassSpec& cls, std::uint64_t seed, const SamplingLaw& law = {});

/// Map params to the nearest member of `cls` in parameter space: beta -> 0 for homothetic
/// classes, gamma -> within-group double-centred blocks for separable classes.
AidsParams project_to_class(const AidsParams& params, const ClassSpec& cls);

/// Points where sample_params checks share admissibility: box corners, centre, and
/// `law.check_points` seeded interior draws.
std::vector<EvalPoint> admissibility_points(int K, const SamplingLaw& law);

/// Hex digest of the parameter bytes (FNV-1a), used in dataset labels.
std::string params_hash(const AidsParams& params);

// --- datasets ---------------------------------------------------------------

struct Observation {
    Vec prices;
    Vec quantities;
    double income = 1.0;
};

struct Dataset {
    std::vector<Observation> observations;
    std::string label;

    int dim() const;
    std::size_t size() const { return observations.size(); }
    /// Checks shared dimension K >= 2, positive prices and income, nonnegative quantities, and
    /// p.x <= I (1 + budget_rel_tol). A negative tolerance skips the budget check.
    void validate(double budget_rel_tol = 1e-9) const;
};

enum class NoiseFamily { none, uniform, truncated_gaussian };

/// Additive i.i.d. measurement error on quantities: mean zero, variance `variance`.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::none;
    double variance = 0.0;
};

NoiseFamily noise_family_from_string(const std::string& name);
std::string to_string(NoiseFamily family);

struct PriceLaw {
    PriceBox box;
    std::uint64_t seed = 0;
};

/// n observations at i.i.d. uniform prices on the box. Draws where demand is undefined
/// are redrawn up to `max_redraws` times in total.
Dataset generate_dataset(const AidsParams& params, std::size_t n, const PriceLaw& law, double income,
                         const NoiseSpec& noise = {}, int max_redraws = 10000);

}  // namespace pactest

#pragma once

// Functional restrictions on consumer demand: each is identically zero on its class.

#include "pactest/calculus.hpp"

#include <span>
#include <string>

namespace pactest {

enum class RestrictionTag {
    homothetic,
    weak_separable_ratio,
    weak_separable_homothetic,
    gross_complement,
    gross_substitute,
    net_complement,
    net_substitute,
};

/// `derivative` evaluates d2x/dI2; `aids_beta` returns -beta for analytic AIDS oracles.
enum class HomotheticMode { derivative, aids_beta };

struct RestrictionKind {
    RestrictionTag tag = RestrictionTag::homothetic;
    Partition groups;      // separability kinds
    int i = 0, j = 1;      // complementarity kinds (0-based goods)
    HomotheticMode homothetic_mode = HomotheticMode::derivative;
    Differentiation differentiation = Differentiation::automatic;

    /// Throws PreconditionError when the kind is inconsistent with K goods.
    void validate(int K) const;
};

std::string to_string(RestrictionTag tag);
RestrictionTag restriction_tag_from_string(const std::string& name);

/// Singular denominator in the separability ratio.
class SingularRatio : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// d2x/dI2 componentwise, or -beta in aids_beta mode (analytic AIDS oracles only).
Vec r_homothetic(const DemandOracle& oracle, const Vec& prices, double income,
                 HomotheticMode mode = HomotheticMode::derivative,
                 Differentiation diff = Differentiation::automatic);

/// Three goods, groups {1},{2,3}: S12/S13 - (dx2/dI)/(dx3/dI).
double r_weak_separable(const DemandOracle& oracle, const Vec& prices, double income, const Partition& groups,
                        Differentiation diff = Differentiation::automatic);

/// (1/(|g1|+|g2|)) sum_{i in g1, j in g2} |S_ij - I (dx_i/dI)(dx_j/dI)|.
/// The Goldman-Uzawa residual with the homothetic multiplier K = I; zero on homothetic
/// weakly separable demand.
double r_weak_separable_homothetic(const DemandOracle& oracle, const Vec& prices, double income,
                                   const Partition& groups, Differentiation diff = Differentiation::automatic);

struct SignCheck {
    int value = 1;          // 0 when the strict sign condition holds, 1 otherwise
    bool boundary = false;  // |derivative| <= 1e-10
    double derivative = 0.0;
};

/// F indicators on dx_i/dp_j (gross) or S_ij (net). Complements need a negative sign,
/// substitutes a positive one.
SignCheck r_complementarity(const DemandOracle& oracle, const Vec& prices, double income, RestrictionTag kind,
                            int i, int j, Differentiation diff = Differentiation::automatic);

/// All components of the restriction at one point (K values for homothetic, one otherwise).
Vec restriction_values(const DemandOracle& oracle, const RestrictionKind& kind, const Vec& prices, double income);

enum class SkipPolicy { fail, skip_and_count };

struct NormResult {
    double norm = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// A point evaluation failed; `index` is the 0-based point.
class PointError : public std::runtime_error {
public:
    PointError(std::size_t index, const std::string& what);
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Root mean square of every restriction component over every point.
NormResult restriction_norm(const DemandOracle& oracle, const RestrictionKind& kind,
                            std::span<const EvalPoint> points, SkipPolicy policy = SkipPolicy::fail);

}  // namespace pactest

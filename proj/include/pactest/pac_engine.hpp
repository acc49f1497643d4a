#pragma once

// The iterative PAC test: schedule (eps_k, delta_k), sample size, statistic, decision.

#include "pactest/learnability.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pactest {

struct TestSchedule {
    double eps0 = 1.0;
    double delta0 = 0.05;
    double decay = 3.0;  // eps_{k+1} = eps_k / decay, same for delta
    int max_iterations = 8;
    double scale_C = 20.0;
    std::optional<double> lipschitz;  // L in the sample-size bound; default beta_max / income
    std::size_t max_points = 200000;  // iterations needing more points end the test
    PriceBox box;
    double income = 1.0;
    std::uint64_t seed = 1;
    bool reuse_points = false;  // oracle subjects: nested point sets instead of fresh draws
    SkipPolicy skip = SkipPolicy::skip_and_count;
    GammaSettings gamma;               // cls/kind/K/box/income are filled in by run_test
    std::optional<GammaTable> table;   // precomputed gamma table; estimated when absent

    void validate() const;
    double eps(int k) const;    // k = 1, 2, ...
    double delta(int k) const;
    double resolved_lipschitz() const;
};

enum class Verdict { reject, not_rejected_within_budget, not_rejected_data_exhausted };

std::string to_string(Verdict v);

struct IterationRow {
    int k = 0;
    double eps = 0.0;
    double delta = 0.0;
    std::size_t n = 0;
    double norm = 0.0;
    double T = 0.0;
    std::size_t skipped = 0;
    bool rejected = false;
};

struct TestReport {
    std::vector<IterationRow> rows;
    Verdict verdict = Verdict::not_rejected_within_budget;
    double gamma_at_zero = 0.0;
    RestrictionKind kind;            // kind actually used (after any fallback)
    std::vector<std::string> config; // key=value lines, seeds included
    std::vector<std::string> notes;
    GammaTable table;

    std::optional<int> rejected_at() const;
};

class InconclusiveTest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Class whose restriction `kind` is zero on; complementarity kinds have none (unrestricted).
ClassSpec class_for(const RestrictionKind& kind);

/// Throws std::logic_error unless the report rejects exactly at the first row with T > eps.
void audit(const TestReport& report);

/// Oracle subject: fresh uniform prices on the box at every iteration.
TestReport run_test(const DemandOracle& subject, const RestrictionKind& kind, const TestSchedule& schedule);

/// Dataset subject: fit AIDS to the first n observations and evaluate at their prices and
/// incomes; stops with data exhausted once n exceeds the dataset size.
TestReport run_test(const Dataset& subject, const RestrictionKind& kind, const TestSchedule& schedule);

/// Gamma table for `kind` at the schedule's box and income (identity for sign kinds).
GammaTable gamma_for(const RestrictionKind& kind, int K, const TestSchedule& schedule,
                     const std::vector<EvalPoint>& points = {});

struct TrialDesign {
    enum class Mode { oracle, dataset } mode = Mode::oracle;
    std::size_t dataset_rows = 1000;  // dataset mode only
    NoiseSpec noise;                  // dataset mode only
    unsigned threads = 0;             // 0: hardware concurrency
};

struct RejectionCurve {
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double rate = 0.0;
    /// by_iteration[k-1]: fraction of trials rejected at or before iteration k.
    std::vector<double> by_iteration;
    std::vector<std::optional<int>> rejected_at;  // per trial
};

/// Fraction of freshly sampled in-class subjects that the test rejects.
RejectionCurve empirical_size(const ClassSpec& cls, int K, const RestrictionKind& kind, const TestSchedule& schedule,
                              std::size_t n_trials, std::uint64_t seed, const TrialDesign& design = {},
                              const SamplingLaw& law = {});

/// Rejection rate against a fixed (usually off-class) subject over independent price/noise draws.
RejectionCurve empirical_power(const AidsParams& subject, const RestrictionKind& kind, const TestSchedule& schedule,
                               std::size_t n_trials, std::uint64_t seed, const TrialDesign& design = {});

}  // namespace pactest

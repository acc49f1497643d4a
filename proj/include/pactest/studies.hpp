#pragma once

// The two AIDS simulation studies: income effects against homotheticity, cross-group price
// effects against homothetic weak separability.

#include "pactest/pac_engine.hpp"

#include <string>
#include <vector>

namespace pactest {

enum class Study { homotheticity, weak_separability };

std::string to_string(Study s);
Study study_from_string(const std::string& name);

/// Homotheticity: K=2, alpha=(0.1, 0.9), gamma=0, beta=(d, -d).
/// Weak separability: K=3, alpha=1/3, beta=0, gamma = d [[-2,1,1],[1,-1,0],[1,0,-1]].
AidsParams study_subject(Study s, double deviation);
RestrictionKind study_kind(Study s);
/// Default schedule; income 2500 (homotheticity) or 1e6 (weak separability).
TestSchedule study_schedule(Study s);
std::vector<double> default_deviations();

/// Published decision row for one column (eps, delta, n, T_n), for side-by-side printing.
struct ReferenceRow {
    double eps, delta;
    std::size_t n;
    double T;
};
std::optional<ReferenceRow> reference_row(Study s, double deviation);

struct StudyCell {
    double deviation = 0.0;
    TestReport report;
};

/// One oracle-mode run_test per deviation, in parallel; the gamma table is estimated once and
/// shared. Cell c uses seed derive_seed(schedule.seed, 500, c). Results are in grid order.
std::vector<StudyCell> run_study(Study s, const std::vector<double>& deviations, const TestSchedule& schedule,
                                 unsigned threads = 0);

}  // namespace pactest

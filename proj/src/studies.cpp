#include "pactest/studies.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace pactest {

std::string to_string(Study s) { return s == Study::homotheticity ? "homotheticity" : "weak-separability"; }

Study study_from_string(const std::string& name) {
    if (name == "homotheticity") return Study::homotheticity;
    if (name == "weak-separability" || name == "weak_separability") return Study::weak_separability;
    throw PreconditionError("unknown study '" + name + "' (homotheticity | weak-separability)");
}

AidsParams study_subject(Study s, double d) {
    AidsParams p;
    if (s == Study::homotheticity) {
        p.alpha = Vec(2);
        p.alpha << 0.1, 0.9;
        p.beta = Vec(2);
        p.beta << d, -d;
        p.gamma = Mat::Zero(2, 2);
        return p;
    }
    p.alpha = Vec::Constant(3, 1.0 / 3.0);
    p.beta = Vec::Zero(3);
    p.gamma = Mat(3, 3);
    p.gamma << -2, 1, 1, 1, -1, 0, 1, 0, -1;
    p.gamma *= d;
    return p;
}

RestrictionKind study_kind(Study s) {
    RestrictionKind k;
    if (s == Study::homotheticity) {
        k.tag = RestrictionTag::homothetic;
    } else {
        k.tag = RestrictionTag::weak_separable_homothetic;
        k.groups = Partition{{0}, {1, 2}};
    }
    return k;
}

TestSchedule study_schedule(Study s) {
    TestSchedule sch;
    sch.income = s == Study::homotheticity ? 2500.0 : 1e6;
    return sch;
}

std::vector<double> default_deviations() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}; }

std::optional<ReferenceRow> reference_row(Study s, double d) {
    static const double devs[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    static const ReferenceRow homo[] = {
        {1.0, 0.05, 60, 8.84}, {1.0, 0.05, 60, 7.97}, {1.0, 0.05, 60, 7.71}, {1.0, 0.05, 60, 5.80}, {0.33, 0.016, 100, 0.41}};
    static const ReferenceRow ws[] = {
        {1.0, 0.05, 60, 19.31}, {1.0, 0.05, 60, 19.31}, {1.0, 0.05, 60, 19.31}, {1.0, 0.05, 60, 19.30}, {1.0, 0.05, 60, 17.54}};
    for (int c = 0; c < 5; ++c) {
        if (std::abs(d - devs[c]) <= 1e-9 * devs[c]) return s == Study::homotheticity ? homo[c] : ws[c];
    }
    return std::nullopt;
}

std::vector<StudyCell> run_study(Study s, const std::vector<double>& deviations, const TestSchedule& schedule,
                                 unsigned threads) {
    if (deviations.empty()) throw PreconditionError("run_study: empty deviation grid");
    const RestrictionKind kind = study_kind(s);
    const int K = s == Study::homotheticity ? 2 : 3;
    TestSchedule sch = schedule;
    sch.validate();
    sch.table = gamma_for(kind, K, schedule);

    std::vector<StudyCell> cells(deviations.size());
    std::vector<std::exception_ptr> errors(deviations.size());
    auto cell = [&](std::size_t c) {
        try {
            TestSchedule local = sch;
            local.seed = derive_seed(schedule.seed, 500, c);
            cells[c] = {deviations[c], run_test(DemandOracle::aids(study_subject(s, deviations[c])), kind, local)};
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    const unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers && w < deviations.size(); ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < deviations.size(); c += workers) cell(c);
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return cells;
}

}  // namespace pactest

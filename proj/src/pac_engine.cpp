#include "pactest/pac_engine.hpp"

#include "pactest/learner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace pactest {

void TestSchedule::validate() const {
    if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw DomainError("schedule: eps0 must be positive");
    if (!(delta0 > 0.0 && delta0 < 1.0)) throw DomainError("schedule: delta0 must lie in (0, 1)");
    if (!(decay > 1.0)) throw DomainError("schedule: decay must exceed 1 so both sequences decrease");
    if (max_iterations < 1) throw PreconditionError("schedule: max_iterations must be at least 1");
    if (!(scale_C > 0.0)) throw DomainError("schedule: scale constant must be positive");
    if (lipschitz && !(*lipschitz >= 0.0)) throw DomainError("schedule: lipschitz must be nonnegative");
    if (max_points < 1) throw PreconditionError("schedule: max_points must be at least 1");
    if (!(income > 0.0)) throw DomainError("schedule: income must be positive");
    box.validate();
}

double TestSchedule::eps(int k) const { return eps0 / std::pow(decay, k - 1); }
double TestSchedule::delta(int k) const { return delta0 / std::pow(decay, k - 1); }

double TestSchedule::resolved_lipschitz() const {
    return lipschitz ? *lipschitz : aids_lipschitz(gamma.law.beta_max, income);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::reject: return "reject";
        case Verdict::not_rejected_within_budget: return "not-rejected-within-budget";
        case Verdict::not_rejected_data_exhausted: return "not-rejected-data-exhausted";
    }
    return "?";
}

std::optional<int> TestReport::rejected_at() const {
    for (const auto& r : rows)
        if (r.rejected) return r.k;
    return std::nullopt;
}

ClassSpec class_for(const RestrictionKind& kind) {
    switch (kind.tag) {
        case RestrictionTag::homothetic: return {ClassTag::homothetic, {}};
        case RestrictionTag::weak_separable_ratio: return {ClassTag::weakly_separable, kind.groups};
        case RestrictionTag::weak_separable_homothetic: return {ClassTag::homothetic_weakly_separable, kind.groups};
        default: return {ClassTag::unrestricted, {}};
    }
}

void audit(const TestReport& report) {
    bool seen = false;
    for (const auto& r : report.rows) {
        if (seen) throw std::logic_error("audit: iteration after a rejection");
        if (r.rejected != (r.T > r.eps)) throw std::logic_error("audit: decision at k=" + std::to_string(r.k) +
                                                                " disagrees with T > eps");
        seen = r.rejected;
    }
    if (seen != (report.verdict == Verdict::reject)) throw std::logic_error("audit: verdict disagrees with rows");
}

namespace {

bool is_sign_kind(RestrictionTag tag) {
    return tag == RestrictionTag::gross_complement || tag == RestrictionTag::gross_substitute ||
           tag == RestrictionTag::net_complement || tag == RestrictionTag::net_substitute;
}

std::string groups_string(const Partition& g) {
    std::string s;
    for (int i : g.g1) s += (s.empty() ? "" : " ") + std::to_string(i + 1);
    s += " |";
    for (int i : g.g2) s += " " + std::to_string(i + 1);
    return s;
}

std::vector<std::string> schedule_config(const TestSchedule& s, const RestrictionKind& kind, int K) {
    std::vector<std::string> c{
        "kind=" + to_string(kind.tag),
        "K=" + std::to_string(K),
        "eps0=" + format_double(s.eps0),
        "delta0=" + format_double(s.delta0),
        "decay=" + format_double(s.decay),
        "max_iterations=" + std::to_string(s.max_iterations),
        "scale_C=" + format_double(s.scale_C),
        "lipschitz=" + format_double(s.resolved_lipschitz()),
        "max_points=" + std::to_string(s.max_points),
        "box=" + format_double(s.box.lo) + "," + format_double(s.box.hi),
        "income=" + format_double(s.income),
        "seed=" + std::to_string(s.seed),
        "reuse_points=" + std::string(s.reuse_points ? "true" : "false"),
        "skip=" + std::string(s.skip == SkipPolicy::fail ? "fail" : "skip-and-count"),
        "differentiation=" + std::string(kind.differentiation == Differentiation::automatic ? "automatic"
                                                                                          : "finite-difference"),
    };
    if (kind.tag == RestrictionTag::weak_separable_ratio || kind.tag == RestrictionTag::weak_separable_homothetic)
        c.push_back("groups=" + groups_string(kind.groups));
    if (is_sign_kind(kind.tag)) c.push_back("goods=" + std::to_string(kind.i + 1) + "," + std::to_string(kind.j + 1));
    if (kind.tag == RestrictionTag::homothetic)
        c.push_back(std::string("homothetic_mode=") +
                    (kind.homothetic_mode == HomotheticMode::derivative ? "derivative" : "aids-beta"));
    return c;
}

// Evaluates the restriction norm for iteration k on n points.
using Evaluator = std::function<NormResult(const RestrictionKind&, std::size_t n, int k)>;
using TableMaker = std::function<GammaTable(const RestrictionKind&)>;

TestReport run_loop(RestrictionKind kind, int K, const TestSchedule& sch, const TableMaker& make_table,
                    const Evaluator& eval, std::optional<std::size_t> data_size, std::vector<std::string> config) {
    TestReport rep;
    rep.kind = kind;
    rep.table = make_table(kind);
    rep.config = std::move(config);
    rep.verdict = Verdict::not_rejected_within_budget;
    const LearnSpec spec{sch.resolved_lipschitz(), K, sch.scale_C};

    for (int k = 1; k <= sch.max_iterations; ++k) {
        IterationRow row;
        row.k = k;
        row.eps = sch.eps(k);
        row.delta = sch.delta(k);
        row.n = sample_size(row.eps, row.delta, spec);
        if (data_size && row.n > *data_size) {
            rep.verdict = Verdict::not_rejected_data_exhausted;
            rep.notes.push_back("data exhausted: iteration " + std::to_string(k) + " needs n=" +
                                std::to_string(row.n) + " > " + std::to_string(*data_size) + " observations");
            break;
        }
        if (row.n > sch.max_points) {
            rep.notes.push_back("point budget: iteration " + std::to_string(k) + " needs n=" + std::to_string(row.n) +
                                " > max_points=" + std::to_string(sch.max_points));
            break;
        }
        NormResult nr = eval(rep.kind, row.n, k);
        if (nr.evaluated == 0 && rep.kind.tag == RestrictionTag::weak_separable_ratio) {
            rep.kind.tag = RestrictionTag::weak_separable_homothetic;
            rep.notes.push_back("weak_separable_ratio singular at every point; fell back to weak_separable_homothetic");
            rep.table = make_table(rep.kind);
            nr = eval(rep.kind, row.n, k);
        }
        if (nr.evaluated == 0) {
            throw InconclusiveTest("iteration " + std::to_string(k) + ": restriction undefined at all " +
                                   std::to_string(row.n) + " points");
        }
        row.norm = nr.norm;
        row.skipped = nr.skipped;
        row.T = rep.table(nr.norm);
        row.rejected = row.T > row.eps;
        rep.rows.push_back(row);
        if (row.rejected) {
            rep.verdict = Verdict::reject;
            break;
        }
    }
    if (rep.rows.empty() && rep.verdict == Verdict::not_rejected_within_budget)
        rep.notes.push_back("no iteration fit within the point budget");
    rep.gamma_at_zero = rep.table(0.0);
    for (const auto& line : rep.table.provenance) rep.config.push_back("gamma." + line);
    audit(rep);
    return rep;
}

}  // namespace

GammaTable gamma_for(const RestrictionKind& kind, int K, const TestSchedule& schedule,
                     const std::vector<EvalPoint>& points) {
    if (schedule.table) return *schedule.table;
    if (is_sign_kind(kind.tag)) {
        GammaTable t;
        t.rows = {{0.0, 0.0, 0}, {1.0, 1.0, 0}};
        t.provenance = {"identity (sign restriction: statistic is the RMS violation indicator)"};
        return t;
    }
    GammaSettings g = schedule.gamma;
    g.cls = class_for(kind);
    g.kind = kind;
    g.K = K;
    g.law.box = schedule.box;
    g.law.income = schedule.income;
    if (!points.empty()) g.points = points;
    return estimate_gamma(g);
}

TestReport run_test(const DemandOracle& subject, const RestrictionKind& kind, const TestSchedule& schedule) {
    schedule.validate();
    const int K = subject.dim();
    kind.validate(K);
    auto config = schedule_config(schedule, kind, K);
    if (const AidsParams* p = subject.aids_params())
        config.push_back("subject=aids params=" + params_hash(*p));
    else
        config.push_back("subject=black-box");

    const Evaluator eval = [&](const RestrictionKind& kd, std::size_t n, int k) {
        const std::uint64_t s = derive_seed(schedule.seed, 100, schedule.reuse_points ? 0 : k);
        const auto pts = draw_points(K, n, schedule.box, schedule.income, s);
        return restriction_norm(subject, kd, pts, schedule.skip);
    };
    const TableMaker tables = [&](const RestrictionKind& kd) { return gamma_for(kd, K, schedule); };
    return run_loop(kind, K, schedule, tables, eval, std::nullopt, std::move(config));
}

TestReport run_test(const Dataset& subject, const RestrictionKind& kind, const TestSchedule& schedule) {
    schedule.validate();
    if (subject.size() < 1) throw PreconditionError("run_test: dataset has no observations");
    subject.validate(-1.0);
    const int K = subject.dim();
    kind.validate(K);
    auto config = schedule_config(schedule, kind, K);
    config.push_back("subject=dataset rows=" + std::to_string(subject.size()));
    if (!subject.label.empty()) config.push_back("subject.label=" + subject.label);

    std::vector<EvalPoint> observed(subject.size());
    for (std::size_t t = 0; t < subject.size(); ++t)
        observed[t] = {subject.observations[t].prices, subject.observations[t].income};

    const Evaluator eval = [&](const RestrictionKind& kd, std::size_t n, int) {
        const FitResult fit = fit_aids(subject, n);
        const auto oracle = DemandOracle::aids(fit.params);
        return restriction_norm(oracle, kd, std::span<const EvalPoint>(observed.data(), n), schedule.skip);
    };
    const TableMaker tables = [&](const RestrictionKind& kd) {
        const std::size_t m = std::min(observed.size(), schedule.gamma.grid_points);
        return gamma_for(kd, K, schedule, std::vector<EvalPoint>(observed.begin(), observed.begin() + m));
    };
    return run_loop(kind, K, schedule, tables, eval, subject.size(), std::move(config));
}

namespace {

RejectionCurve run_trials(std::size_t n_trials, int max_iterations, unsigned threads,
                          const std::function<std::optional<int>(std::size_t)>& trial) {
    if (n_trials < 1) throw PreconditionError("need at least one trial");
    RejectionCurve out;
    out.trials = n_trials;
    out.rejected_at.resize(n_trials);

    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_trials));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto work = [&] {
        for (std::size_t i; (i = next++) < n_trials;) {
            try {
                out.rejected_at[i] = trial(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    out.by_iteration.assign(static_cast<std::size_t>(max_iterations), 0.0);
    for (const auto& r : out.rejected_at) {
        if (!r) continue;
        ++out.rejections;
        for (int k = *r; k <= max_iterations; ++k) out.by_iteration[k - 1] += 1.0;
    }
    for (double& v : out.by_iteration) v /= static_cast<double>(n_trials);
    out.rate = static_cast<double>(out.rejections) / static_cast<double>(n_trials);
    return out;
}

std::optional<int> one_trial(const AidsParams& params, const RestrictionKind& kind, const TestSchedule& sch,
                             std::uint64_t trial_seed, const TrialDesign& design) {
    if (design.mode == TrialDesign::Mode::oracle) return run_test(DemandOracle::aids(params), kind, sch).rejected_at();
    const Dataset data = generate_dataset(params, design.dataset_rows, PriceLaw{sch.box, derive_seed(trial_seed, 1)},
                                          sch.income, design.noise);
    return run_test(data, kind, sch).rejected_at();
}

}  // namespace

RejectionCurve empirical_size(const ClassSpec& cls, int K, const RestrictionKind& kind, const TestSchedule& schedule,
                              std::size_t n_trials, std::uint64_t seed, const TrialDesign& design,
                              const SamplingLaw& law) {
    if (n_trials < 1) throw PreconditionError("empirical_size: need at least one trial");
    schedule.validate();
    TestSchedule sch = schedule;
    sch.table = gamma_for(kind, K, schedule);
    SamplingLaw subject_law = law;
    subject_law.box = schedule.box;
    subject_law.income = schedule.income;
    return run_trials(n_trials, sch.max_iterations, design.threads, [&](std::size_t i) {
        TestSchedule s = sch;
        s.seed = derive_seed(seed, 300, i);
        const AidsParams params = sample_params(K, cls, derive_seed(seed, 200, i), subject_law);
        return one_trial(params, kind, s, derive_seed(seed, 400, i), design);
    });
}

RejectionCurve empirical_power(const AidsParams& subject, const RestrictionKind& kind, const TestSchedule& schedule,
                               std::size_t n_trials, std::uint64_t seed, const TrialDesign& design) {
    if (n_trials < 1) throw PreconditionError("empirical_power: need at least one trial");
    schedule.validate();
    TestSchedule sch = schedule;
    sch.table = gamma_for(kind, subject.dim(), schedule);
    return run_trials(n_trials, sch.max_iterations, design.threads, [&](std::size_t i) {
        TestSchedule s = sch;
        s.seed = derive_seed(seed, 300, i);
        return one_trial(subject, kind, s, derive_seed(seed, 400, i), design);
    });
}

}  // namespace pactest

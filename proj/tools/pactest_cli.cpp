// pactest: simulate the AIDS studies, test CSV datasets, tabulate gamma, generate datasets.
//
// Exit codes: 0 not rejected / success, 2 rejected, 1 error or inconclusive.

#include "pactest/io.hpp"
#include "pactest/learner.hpp"
#include "pactest/studies.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace pactest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRejected = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScheduleFlags {
    double eps0 = 1.0, delta0 = 0.05, decay = 3.0, scale_C = 20.0;
    int max_iterations = 8;
    std::size_t max_points = 200000;
    double box_lo = 0.5, box_hi = 2.0;
    double income = 0.0;  // 0: command default
    std::uint64_t seed = 1;
    bool reuse_points = false;
    std::string skip = "skip-and-count";
    std::size_t pairs = 500, grid_points = 200;
    std::uint64_t gamma_seed = 1;
    std::string gamma_variant = "max-min";
    double beta_max = 0.1, gamma_halfwidth = 0.1;
    std::string gamma_table;  // precomputed table CSV

    void add_to(CLI::App* app) {
        app->add_option("--eps0", eps0, "first tolerance eps_1");
        app->add_option("--delta0", delta0, "first confidence delta_1");
        app->add_option("--decay", decay, "eps and delta divide by this each iteration");
        app->add_option("--max-iterations", max_iterations);
        app->add_option("--scale-C", scale_C, "constant in the sample-size bound");
        app->add_option("--max-points", max_points, "largest n an iteration may use");
        app->add_option("--box-lo", box_lo);
        app->add_option("--box-hi", box_hi);
        app->add_option("--income", income, "income (0: command default)");
        app->add_option("--seed", seed, "seed for price draws");
        app->add_flag("--reuse-points", reuse_points, "nested point sets across iterations");
        app->add_option("--skip", skip, "fail | skip-and-count")->check(CLI::IsMember({"fail", "skip-and-count"}));
        app->add_option("--pairs", pairs, "gamma: sampled pairs");
        app->add_option("--grid-points", grid_points, "gamma: evaluation points");
        app->add_option("--gamma-seed", gamma_seed);
        app->add_option("--gamma-variant", gamma_variant, "max-min | literal")
            ->check(CLI::IsMember({"max-min", "literal"}));
        app->add_option("--beta-max", beta_max, "gamma: M-law bound on |beta|");
        app->add_option("--gamma-halfwidth", gamma_halfwidth, "gamma: raw gamma entry half-width");
        app->add_option("--gamma-table", gamma_table, "precomputed gamma table CSV");
    }

    TestSchedule build(double default_income) const {
        TestSchedule s;
        s.eps0 = eps0;
        s.delta0 = delta0;
        s.decay = decay;
        s.max_iterations = max_iterations;
        s.scale_C = scale_C;
        s.max_points = max_points;
        s.box = {box_lo, box_hi};
        s.income = income > 0.0 ? income : default_income;
        s.seed = seed;
        s.reuse_points = reuse_points;
        s.skip = skip == "fail" ? SkipPolicy::fail : SkipPolicy::skip_and_count;
        s.gamma.pairs = pairs;
        s.gamma.grid_points = grid_points;
        s.gamma.seed = gamma_seed;
        s.gamma.variant = gamma_variant_from_string(gamma_variant);
        s.gamma.law.beta_max = beta_max;
        s.gamma.law.gamma_halfwidth = gamma_halfwidth;
        if (!gamma_table.empty()) {
            std::ifstream in(gamma_table);
            if (!in) throw UsageError("cannot open gamma table '" + gamma_table + "'");
            s.table = read_gamma_csv(in);
        }
        s.validate();
        return s;
    }
};

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--" + key + ": cannot parse '" + item + "'");
        }
    }
    return out;
}

// "1|2,3" -> {0},{1,2}
Partition parse_groups(const std::string& text) {
    const auto bar = text.find('|');
    if (bar == std::string::npos) throw UsageError("--groups: expected 'a,b|c,d'");
    auto side = [&](const std::string& s) {
        std::vector<int> g;
        for (double v : parse_list(s, "groups")) {
            if (v != std::floor(v) || v < 1) throw UsageError("--groups: goods are 1-based integers");
            g.push_back(static_cast<int>(v) - 1);
        }
        return g;
    };
    return {side(text.substr(0, bar)), side(text.substr(bar + 1))};
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto key = line.substr(0, eq), value = line.substr(eq + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t") + 1);
        kv[key] = value;
    }
    return kv;
}

// Resolved key=value lines for every option of `sub` (flags and defaults alike).
std::vector<std::string> resolved_config(const CLI::App* sub) {
    std::vector<std::string> out{"command=" + sub->get_name()};
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0].rfind("help", 0) == 0) continue;
        std::string value;
        if (opt->get_expected_min() == 0) {
            value = opt->as<bool>() ? "true" : "false";
        } else if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        out.push_back(opt->get_lnames()[0] + "=" + value);
    }
    return out;
}

fs::path output_path(const std::string& out_dir, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return p;
    std::string dir = out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("PACTEST_OUTPUT_DIR");
        dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return fs::path(dir) / p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
    return os;
}

RestrictionKind kind_from_flags(const std::string& kind, const std::string& groups, const std::string& goods,
                                const std::string& homothetic_mode, const std::string& differentiation) {
    RestrictionKind k;
    try {
        k.tag = restriction_tag_from_string(kind);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--kind: ") + e.what());
    }
    if (!groups.empty()) k.groups = parse_groups(groups);
    if (!goods.empty()) {
        const auto g = parse_list(goods, "goods");
        if (g.size() != 2) throw UsageError("--goods: expected two 1-based goods 'i,j'");
        k.i = static_cast<int>(g[0]) - 1;
        k.j = static_cast<int>(g[1]) - 1;
    }
    k.homothetic_mode = homothetic_mode == "aids-beta" ? HomotheticMode::aids_beta : HomotheticMode::derivative;
    k.differentiation =
        differentiation == "finite-difference" ? Differentiation::finite_difference : Differentiation::automatic;
    return k;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Columns = deviations; rows = eps_k, delta_k, n, T_n, decision of the deciding (last) iteration.
std::string study_table(Study s, const std::vector<StudyCell>& cells) {
    std::ostringstream os;
    char buf[64];
    auto row = [&](const std::string& label, auto&& cellfn) {
        std::snprintf(buf, sizeof buf, "%-22s", label.c_str());
        os << buf;
        for (const auto& c : cells) {
            std::snprintf(buf, sizeof buf, " %11s", cellfn(c).c_str());
            os << buf;
        }
        os << '\n';
    };
    const bool homo = s == Study::homotheticity;
    row(homo ? "beta" : "gamma_1j", [](const StudyCell& c) { return fmt("%.0e", c.deviation); });
    auto last = [](const StudyCell& c) -> const IterationRow* {
        return c.report.rows.empty() ? nullptr : &c.report.rows.back();
    };
    row("eps_k", [&](const StudyCell& c) { return last(c) ? fmt("%.4g", last(c)->eps) : "-"; });
    row("delta_k", [&](const StudyCell& c) { return last(c) ? fmt("%.4g", last(c)->delta) : "-"; });
    row("n(eps_k,delta_k)", [&](const StudyCell& c) { return last(c) ? std::to_string(last(c)->n) : "-"; });
    row("T_n", [&](const StudyCell& c) { return last(c) ? fmt("%.4g", last(c)->T) : "-"; });
    row("decision", [&](const StudyCell& c) { return to_string(c.report.verdict).substr(0, 11); });
    const bool any_ref = std::any_of(cells.begin(), cells.end(),
                                     [&](const StudyCell& c) { return reference_row(s, c.deviation).has_value(); });
    if (any_ref) {
        os << "published reference:\n";
        auto ref = [&](const StudyCell& c, auto&& f) -> std::string {
            const auto r = reference_row(s, c.deviation);
            return r ? f(*r) : "-";
        };
        row("  eps_k", [&](const StudyCell& c) { return ref(c, [](const ReferenceRow& r) { return fmt("%.4g", r.eps); }); });
        row("  delta_k",
            [&](const StudyCell& c) { return ref(c, [](const ReferenceRow& r) { return fmt("%.4g", r.delta); }); });
        row("  n(eps_k,delta_k)",
            [&](const StudyCell& c) { return ref(c, [](const ReferenceRow& r) { return std::to_string(r.n); }); });
        row("  T_n", [&](const StudyCell& c) { return ref(c, [](const ReferenceRow& r) { return fmt("%.4g", r.T); }); });
        for (const auto& c : cells) {
            const auto r = reference_row(s, c.deviation);
            if (!r || c.report.rows.empty()) continue;
            // Iteration whose eps is closest to the published one.
            const IterationRow* near = &c.report.rows.front();
            for (const auto& it : c.report.rows)
                if (std::abs(std::log(it.eps / r->eps)) < std::abs(std::log(near->eps / r->eps))) near = &it;
            if (near->n != r->n) {
                os << "note: at " << fmt("%.0e", c.deviation) << " the published row (eps=" << fmt("%.4g", r->eps)
                   << ", delta=" << fmt("%.4g", r->delta) << ", n=" << r->n << ", T_n=" << fmt("%.4g", r->T)
                   << ") does not follow from the sample-size bound, which gives n=" << near->n
                   << " at (eps=" << fmt("%.4g", near->eps) << ", delta=" << fmt("%.4g", near->delta)
                   << "); computed T_n=" << fmt("%.4g", near->T) << " there\n";
            }
        }
    }
    return os.str();
}

int cmd_simulate(const CLI::App* sub, const std::string& study_name, const std::string& grid_text,
                 const ScheduleFlags& flags, const std::string& out_dir, unsigned threads) {
    const Study study = study_from_string(study_name);
    const bool given = sub->get_option("--grid")->count() > 0;
    const auto grid = given ? parse_list(grid_text, "grid") : default_deviations();
    if (grid.empty()) throw UsageError("--grid: empty deviation grid");
    const TestSchedule sch = flags.build(study_schedule(study).income);
    const auto cells = run_study(study, grid, sch, threads);

    const auto header = resolved_config(sub);
    const std::string base = "simulate_" + to_string(study);
    {
        auto os = open_out(output_path(out_dir, base + ".csv"));
        for (const auto& h : header) os << "# " << h << '\n';
        for (const auto& line : cells.front().report.config)
            if (line.rfind("gamma.", 0) == 0) os << "# " << line << '\n';
        for (const auto& c : cells) {
            if (const auto r = reference_row(study, c.deviation)) {
                os << "# reference deviation=" << format_double(c.deviation) << " eps=" << format_double(r->eps)
                   << " delta=" << format_double(r->delta) << " n=" << r->n << " T_n=" << format_double(r->T) << '\n';
            }
        }
        os << "deviation,seed,k,eps,delta,n,restriction_norm,T_n,decision,verdict\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& rep = cells[c].report;
            const std::uint64_t seed = derive_seed(sch.seed, 500, c);
            for (const auto& r : rep.rows) {
                os << format_double(cells[c].deviation) << ',' << seed << ',' << r.k << ',' << format_double(r.eps)
                   << ',' << format_double(r.delta) << ',' << r.n << ',' << format_double(r.norm) << ','
                   << format_double(r.T) << ',' << (r.rejected ? "reject" : "continue") << ','
                   << to_string(rep.verdict) << '\n';
            }
        }
    }
    const std::string table = study_table(study, cells);
    {
        auto os = open_out(output_path(out_dir, base + ".txt"));
        os << table << '\n';
        for (const auto& c : cells) os << "deviation " << format_double(c.deviation) << '\n'
                                       << format_report_table(c.report) << '\n';
    }
    std::cout << table;
    std::cout << "gamma(0) = " << format_double(cells.front().report.gamma_at_zero) << '\n';
    std::cout << "wrote " << output_path(out_dir, base + ".csv").string() << '\n';
    return kExitOk;
}

int cmd_test(const CLI::App* sub, const std::string& data_path, const RestrictionKind& kind, double budget_tol,
             const ScheduleFlags& flags, const std::string& out_dir, const std::string& report_name) {
    std::ifstream in(data_path);
    if (!in) throw UsageError("cannot open dataset '" + data_path + "'");
    const Dataset data = read_dataset_csv(in);
    data.validate(budget_tol);
    const int K = data.dim();
    try {
        kind.validate(K);
    } catch (const PreconditionError& e) {
        throw UsageError(std::string("restriction does not fit K=") + std::to_string(K) + ": " + e.what());
    }
    std::vector<double> incomes;
    for (const auto& ob : data.observations) incomes.push_back(ob.income);
    std::nth_element(incomes.begin(), incomes.begin() + incomes.size() / 2, incomes.end());
    const TestSchedule sch = flags.build(incomes[incomes.size() / 2]);

    const TestReport rep = run_test(data, kind, sch);
    const auto path = output_path(out_dir, report_name);
    auto os = open_out(path);
    write_report_csv(os, rep, resolved_config(sub));
    std::cout << format_report_table(rep);
    std::cout << "gamma(0) = " << format_double(rep.gamma_at_zero) << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return rep.verdict == Verdict::reject ? kExitRejected : kExitOk;
}

int cmd_gamma(const CLI::App* sub, const std::string& class_name, int K, const std::string& groups,
              const std::string& eps_grid, const ScheduleFlags& flags, const std::string& out_dir,
              const std::string& out_name) {
    ClassSpec cls;
    try {
        cls.tag = class_tag_from_string(class_name);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--class: ") + e.what());
    }
    RestrictionKind kind;
    switch (cls.tag) {
        case ClassTag::homothetic: kind.tag = RestrictionTag::homothetic; break;
        case ClassTag::weakly_separable: kind.tag = RestrictionTag::weak_separable_ratio; break;
        case ClassTag::homothetic_weakly_separable: kind.tag = RestrictionTag::weak_separable_homothetic; break;
        default: throw UsageError("--class: gamma needs a restricted class");
    }
    if (cls.tag != ClassTag::homothetic) {
        cls.groups = groups.empty() ? Partition{{0}, {1, 2}} : parse_groups(groups);
        kind.groups = cls.groups;
    }
    const TestSchedule sch = flags.build(1.0);
    GammaSettings g = sch.gamma;
    g.cls = cls;
    g.kind = kind;
    g.K = K;
    g.law.box = sch.box;
    g.law.income = sch.income;
    g.eps_grid = parse_list(eps_grid, "eps-grid");
    const GammaTable table = estimate_gamma(g);

    const auto path = output_path(out_dir, out_name.empty() ? "gamma_" + to_string(cls.tag) + ".csv" : out_name);
    auto os = open_out(path);
    write_gamma_csv(os, table, resolved_config(sub));
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << table.rows.size() << " rows, gamma(0) = " << format_double(table(0.0)) << "\nwrote " << path.string()
              << '\n';
    return kExitOk;
}

int cmd_generate(const CLI::App* sub, const std::string& study_name, double deviation, const std::string& class_name,
                 int K, std::size_t rows, const std::string& noise_family, double noise_variance, double income,
                 std::uint64_t seed, std::uint64_t param_seed, double box_lo, double box_hi, const std::string& out_dir,
                 const std::string& out_name) {
    AidsParams params;
    double inc = income;
    if (!class_name.empty()) {
        ClassSpec cls{class_tag_from_string(class_name), {}};
        if (cls.tag == ClassTag::weakly_separable || cls.tag == ClassTag::homothetic_weakly_separable)
            cls.groups = Partition{{0}, {1, 2}};
        SamplingLaw law;
        law.box = {box_lo, box_hi};
        law.income = inc > 0.0 ? inc : 1.0;
        params = sample_params(K, cls, param_seed, law);
        inc = law.income;
    } else {
        const Study study = study_from_string(study_name);
        params = study_subject(study, deviation);
        if (!(inc > 0.0)) inc = study_schedule(study).income;
    }
    if (rows < 1) throw UsageError("--rows must be at least 1");
    const NoiseSpec noise{noise_family_from_string(noise_family), noise_variance};
    const Dataset data = generate_dataset(params, rows, PriceLaw{{box_lo, box_hi}, seed}, inc, noise);
    const auto path = output_path(out_dir, out_name);
    auto os = open_out(path);
    write_dataset_csv(os, data, resolved_config(sub));
    std::cout << "wrote " << data.size() << " observations to " << path.string() << '\n';
    return kExitOk;
}

// Moves `--config X` / `--config=X` out of argv; inserts config `command=` when no subcommand given.
std::map<std::string, std::string> preload_config(std::vector<std::string>& args,
                                                  const std::vector<std::string>& commands) {
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
        } else {
            continue;
        }
        kv = read_config(path);
        break;
    }
    const bool has_command = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
        return std::find(commands.begin(), commands.end(), a) != commands.end();
    });
    if (!has_command) {
        if (auto it = kv.find("command"); it != kv.end()) args.insert(args.begin() + 1, it->second);
    }
    kv.erase("command");
    return kv;
}

void apply_config(CLI::App* sub, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("config: unknown key '" + key + "' for command " + sub->get_name());
        }
        if (opt->count() > 0) continue;  // flags win
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config: bad value for '" + key + "': " + e.what());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAC tests of consumer-choice data against preference classes"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_help_all_flag("--help-all");
    std::string config_path;
    app.add_option("--config", config_path, "key=value file; command-line flags override it");

    std::string out_dir;
    unsigned threads = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "output directory (default: $PACTEST_OUTPUT_DIR or .)");
        sub->add_option("--threads", threads, "worker threads (0: all cores)");
    };

    // simulate
    ScheduleFlags sim_flags;
    std::string sim_study = "homotheticity", sim_grid;
    auto* sim = app.add_subcommand("simulate", "run a simulation study over a deviation grid");
    sim->add_option("--study", sim_study, "homotheticity | weak-separability");
    sim->add_option("--grid", sim_grid, "comma-separated deviations (default 1e-1..1e-5)");
    sim_flags.add_to(sim);
    add_common(sim);

    // test
    ScheduleFlags test_flags;
    std::string data_path, kind = "homothetic", groups, goods, hmode = "derivative", diff = "automatic",
                               report_name = "test_report.csv";
    double budget_tol = 0.05;
    auto* test = app.add_subcommand("test", "test a CSV dataset");
    test->add_option("--data", data_path, "dataset CSV")->required();
    test->add_option("--kind", kind, "restriction kind");
    test->add_option("--groups", groups, "goods partition, 1-based, e.g. '1|2,3'");
    test->add_option("--goods", goods, "complementarity goods 'i,j', 1-based");
    test->add_option("--homothetic-mode", hmode)->check(CLI::IsMember({"derivative", "aids-beta"}));
    test->add_option("--differentiation", diff)->check(CLI::IsMember({"automatic", "finite-difference"}));
    test->add_option("--budget-tol", budget_tol, "relative tolerance on p.x <= I (negative: skip)");
    test->add_option("--report", report_name, "report file name");
    test_flags.add_to(test);
    add_common(test);

    // gamma
    ScheduleFlags gamma_flags;
    std::string gamma_class = "homothetic", gamma_groups, eps_grid, gamma_out;
    int gamma_K = 2;
    auto* gam = app.add_subcommand("gamma", "tabulate gamma for a class");
    gam->add_option("--class", gamma_class, "homothetic | weakly_separable | homothetic_weakly_separable");
    gam->add_option("--K", gamma_K, "goods");
    gam->add_option("--groups", gamma_groups, "goods partition, 1-based (default '1|2,3')");
    gam->add_option("--eps-grid", eps_grid, "comma-separated eps values, 'inf' allowed (default: sampled norms)");
    gam->add_option("--out", gamma_out, "output file name");
    gamma_flags.add_to(gam);
    add_common(gam);

    // generate
    std::string gen_study = "homotheticity", gen_class, noise = "none", gen_out = "dataset.csv";
    double deviation = 0.0, noise_var = 0.0, gen_income = 0.0, gen_lo = 0.5, gen_hi = 2.0;
    int gen_K = 2;
    std::size_t rows = 60;
    std::uint64_t gen_seed = 1, param_seed = 1;
    auto* gen = app.add_subcommand("generate", "write a simulated dataset CSV");
    gen->add_option("--study", gen_study, "study whose DGP to use");
    gen->add_option("--deviation", deviation, "beta (homotheticity) or gamma_1j (weak-separability)");
    gen->add_option("--class", gen_class, "draw random parameters from this class instead");
    gen->add_option("--K", gen_K, "goods (with --class)");
    gen->add_option("--param-seed", param_seed, "seed for --class parameters");
    gen->add_option("--rows", rows);
    gen->add_option("--noise", noise, "none | uniform | truncated-gaussian");
    gen->add_option("--noise-variance", noise_var);
    gen->add_option("--income", gen_income, "income (0: study default)");
    gen->add_option("--seed", gen_seed, "price seed");
    gen->add_option("--box-lo", gen_lo);
    gen->add_option("--box-hi", gen_hi);
    gen->add_option("--out", gen_out, "output file name");
    add_common(gen);

    std::vector<std::string> args(argv, argv + argc);
    try {
        const auto kv = preload_config(args, {"simulate", "test", "gamma", "generate"});
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(std::move(rev));
        CLI::App* sub = app.get_subcommands().front();
        apply_config(sub, kv);

        if (sub == sim) return cmd_simulate(sim, sim_study, sim_grid, sim_flags, out_dir, threads);
        if (sub == test) {
            const auto k = kind_from_flags(kind, groups, goods, hmode, diff);
            return cmd_test(test, data_path, k, budget_tol, test_flags, out_dir, report_name);
        }
        if (sub == gam) return cmd_gamma(gam, gamma_class, gamma_K, gamma_groups, eps_grid, gamma_flags, out_dir, gamma_out);
        return cmd_generate(gen, gen_study, deviation, gen_class, gen_K, rows, noise, noise_var, gen_income, gen_seed,
                            param_seed, gen_lo, gen_hi, out_dir, gen_out);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitError;
    } catch (const InconclusiveTest& e) {
        std::cerr << "inconclusive: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}

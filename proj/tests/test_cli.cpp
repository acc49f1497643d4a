// Drives the pactest executable end to end; PACTEST_CLI is its path.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Workdir {
    fs::path dir;
    Workdir() {
        dir = fs::temp_directory_path() / ("pactest_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        ::setenv("PACTEST_OUTPUT_DIR", dir.c_str(), 1);
    }
    ~Workdir() { fs::remove_all(dir); }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args) {
    const std::string cmd = std::string(PACTEST_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("test subcommand exit codes") {
    Workdir w;
    REQUIRE(run("generate --study homotheticity --deviation 0 --rows 1000 --out null.csv") == 0);
    CHECK(run("test --data " + (w / "null.csv").string() + " --kind homothetic --pairs 100 --report null_report.csv") == 0);
    const std::string report = slurp(w / "null_report.csv");
    CHECK(contains(report, "# verdict=not-rejected"));
    CHECK(contains(report, "# seed="));

    REQUIRE(run("generate --study homotheticity --deviation 0.1 --rows 100 --out off.csv") == 0);
    CHECK(run("test --data " + (w / "off.csv").string() + " --kind homothetic --pairs 100 --report off_report.csv") == 2);
    CHECK(contains(slurp(w / "off_report.csv"), "# verdict=reject"));

    REQUIRE(run("generate --study homotheticity --deviation 0.1 --rows 3 --out tiny.csv") == 0);
    CHECK(run("test --data " + (w / "tiny.csv").string() + " --kind homothetic --pairs 50 --report tiny_report.csv") == 0);
    CHECK(contains(slurp(w / "tiny_report.csv"), "data exhausted"));

    write(w / "bad.csv", "t,p_1,p_2,x_1,x_2,income\n1,1,1,0.5,0.5,1\n2,1,1,oops,0.5,1\n");
    CHECK(run("test --data " + (w / "bad.csv").string() + " --kind homothetic") == 1);
    // weak separability needs three goods
    CHECK(run("test --data " + (w / "null.csv").string() + " --kind weak_separable_homothetic --groups '1|2'") == 1);
    CHECK(run("test --data " + (w / "missing.csv").string() + " --kind homothetic") == 1);
    CHECK(run("test --kind homothetic") == 1);
}

TEST_CASE("config files: flags win, unknown keys are usage errors") {
    Workdir w;
    write(w / "gen.cfg", "command=generate\nstudy=homotheticity\ndeviation=0.1\nrows=40\nseed=5\nout=cfg.csv\n");
    REQUIRE(run("--config " + (w / "gen.cfg").string()) == 0);
    const std::string a = slurp(w / "cfg.csv");
    CHECK(contains(a, "# seed=5\n"));
    CHECK(contains(a, "# rows=40\n"));

    REQUIRE(run("generate --config " + (w / "gen.cfg").string() + " --seed 7") == 0);
    const std::string b = slurp(w / "cfg.csv");
    CHECK(contains(b, "# seed=7\n"));
    CHECK(contains(b, "# deviation=0.1\n"));

    write(w / "bad.cfg", "command=generate\nbogus=1\n");
    CHECK(run("--config " + (w / "bad.cfg").string()) == 1);
    CHECK(run("simulate --grid ''") == 1);
    CHECK(run("simulate --study nonsense") == 1);
    CHECK(run("frobnicate") == 1);
}

TEST_CASE("gamma subcommand: sentinel row and byte-identical reruns") {
    Workdir w;
    REQUIRE(run("gamma --class homothetic --K 2 --pairs 60 --eps-grid inf --out inf.csv") == 0);
    const std::string t = slurp(w / "inf.csv");
    CHECK(contains(t, "eps,gamma,n_pairs_in_A\ninf,"));
    CHECK(contains(t, ",60\n"));

    REQUIRE(run("gamma --class homothetic --K 2 --pairs 60") == 0);
    const std::string first = slurp(w / "gamma_homothetic.csv");
    REQUIRE(run("gamma --class homothetic --K 2 --pairs 60") == 0);
    CHECK(slurp(w / "gamma_homothetic.csv") == first);
    CHECK(contains(first, "# pairs=60\n"));
}

TEST_CASE("simulate subcommand is reproducible") {
    Workdir w;
    REQUIRE(run("simulate --study weak-separability --grid 0.1,0.001 --pairs 100") == 0);
    const std::string csv = slurp(w / "simulate_weak-separability.csv");
    const std::string txt = slurp(w / "simulate_weak-separability.txt");
    CHECK(contains(csv, "deviation,seed,k,eps,delta,n,restriction_norm,T_n,decision,verdict\n"));
    CHECK(contains(csv, ",reject,reject"));
    CHECK(contains(txt, "reject"));
    REQUIRE(run("simulate --study weak-separability --grid 0.1,0.001 --pairs 100 --threads 1") == 0);
    const std::string again = slurp(w / "simulate_weak-separability.csv");
    // only the threads line may differ
    auto strip = [](const std::string& s) {
        std::istringstream in(s);
        std::string line, out;
        while (std::getline(in, line))
            if (line.rfind("# threads=", 0) != 0) out += line + "\n";
        return out;
    };
    CHECK(strip(again) == strip(csv));
}

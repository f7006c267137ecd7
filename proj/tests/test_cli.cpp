#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sglm/panel_io.hpp"
#include "sglm/simulate.hpp"

namespace fs = std::filesystem;
using namespace sglm;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("sglm_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

const Scratch& scratch() {
    static Scratch s;
    return s;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run sglm_cli(const std::string& args) {
    const std::string out = scratch()("stdout.txt"), err = scratch()("stderr.txt");
    const std::string cmd = std::string("\"") + SGLM_CLI_PATH + "\" " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out), slurp(err)};
}

std::string summary_value(const std::string& path, const std::string& key) {
    std::istringstream in(slurp(path));
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ",", 0) == 0) return line.substr(key.size() + 1);
    return {};
}

}  // namespace

TEST_CASE("cli simulate") {
    const auto p = scratch()("sim.csv");
    const Run r = sglm_cli("simulate --family poisson --m 120 --q 20 --seed 7 --output " + p);
    REQUIRE(r.code == 0);
    CHECK(r.out == "seed=7\n");
    const io::PanelData panel = io::panel_from_table(io::read_table_file(p));
    CHECK(panel.x.cols() == 1);
    CHECK(panel.y.cols() == 20);
    CHECK(panel.y.rows() == 120);

    SUBCASE("rerun is byte-identical") {
        const auto p2 = scratch()("sim2.csv");
        REQUIRE(sglm_cli("simulate --family poisson --m 120 --q 20 --seed 7 --output " + p2).code == 0);
        CHECK(slurp(p) == slurp(p2));
    }
    SUBCASE("matches the library generator") {
        SimConfig c;
        c.seed = 7;
        const SimTruth t = simulate::generate(c);
        CHECK(panel.y == t.y);
        CHECK(panel.x.col(0) == t.x);
    }
    SUBCASE("usage errors") {
        const Run bad = sglm_cli("simulate --q 1 --output " + scratch()("x.csv"));
        CHECK(bad.code == 64);
        CHECK(bad.err.rfind("error: usage:", 0) == 0);
        const Run fam = sglm_cli("simulate --family weibull --output " + scratch()("x.csv"));
        CHECK(fam.code == 1);
        CHECK(fam.err.rfind("error: config:", 0) == 0);
    }
}

TEST_CASE("cli config precedence") {
    const auto cfg = scratch()("cfg.toml");
    std::ofstream(cfg) << "[simulate]\nfamily=\"gaussian\"\nseed=5\nm=30\n";
    const auto p = scratch()("cfg_out.csv");
    const Run r = sglm_cli("--config " + cfg + " simulate --seed 9 --output " + p);
    REQUIRE(r.code == 0);
    const io::Table t = io::read_table_file(p);
    auto has = [&](const std::string& c) {
        return std::find(t.comments.begin(), t.comments.end(), c) != t.comments.end();
    };
    CHECK(has("family=gaussian"));  // file over default
    CHECK(has("seed=9"));           // flag over file
    CHECK(has("m=30"));
    CHECK(has("q=20"));             // default
    CHECK(t.data.rows() == 30);
}

TEST_CASE("cli denoise") {
    const auto p = scratch()("den_in.csv");
    REQUIRE(sglm_cli("simulate --seed 11 --output " + p).code == 0);
    std::string first_columns;
    for (const char* est : {"glm", "half_sibling", "three_quarter", "sglm"}) {
        CAPTURE(est);
        const auto out = scratch()(std::string("den_") + est + ".csv");
        const Run r = sglm_cli("denoise --estimator " + std::string(est) + " --input " + p + " --output " + out);
        REQUIRE(r.code == 0);
        const io::Table t = io::read_table_file(out);
        std::string cols;
        for (const auto& c : t.columns) cols += c + ";";
        if (first_columns.empty()) first_columns = cols;
        CHECK(cols == first_columns);
        CHECK(t.data.rows() == 120);
        const auto summary = scratch()(std::string("den_") + est + ".summary.csv");
        CHECK(!summary_value(summary, "mse").empty());
        CHECK(!summary_value(summary, "bias").empty());
        if (std::string(est) != "glm") CHECK(!summary_value(summary, "noise_corr").empty());
    }
    CHECK(first_columns == "obs;noise_hat;z_hat;mu_hat;");

    SUBCASE("no shared noise") {
        const auto in = scratch()("wn0.csv");
        REQUIRE(sglm_cli("simulate --m 2000 --q 6 --seed 3 --wn-fixed 0 --output " + in).code == 0);
        const auto out = scratch()("wn0_out.csv");
        REQUIRE(sglm_cli("denoise --input " + in + " --output " + out).code == 0);
        const double rho = std::stod(summary_value(scratch()("wn0_out.summary.csv"), "noise_corr"));
        CHECK(rho >= -0.1);
        CHECK(rho <= 0.1);
    }
    SUBCASE("errors") {
        const auto bad = scratch()("bad.csv");
        std::ofstream(bad) << "x_a,y_a,y_b\n1,2,3\n3,zz,1\n";
        const Run r = sglm_cli("denoise --input " + bad + " --output " + scratch()("bad_out.csv"));
        CHECK(r.code == 1);
        CHECK(r.err.rfind("error: parse:", 0) == 0);
        CHECK(r.err.find("row 2") != std::string::npos);
        CHECK(r.err.find("y_a") != std::string::npos);

        const auto zero = scratch()("zero.csv");
        std::ofstream(zero) << "x_a,y_a,y_dead\n-1,1,0\n0,2,0\n1,4,0\n2,3,0\n";
        const Run z = sglm_cli("denoise --input " + zero + " --output " + scratch()("zero_out.csv"));
        CHECK(z.code == 1);
        CHECK(z.err.rfind("error: series_fit:", 0) == 0);
        CHECK(z.err.find("dead") != std::string::npos);
    }
}

TEST_CASE("cli residuals") {
    SUBCASE("gaussian fisher equals raw") {
        const auto in = scratch()("gauss.csv");
        REQUIRE(sglm_cli("simulate --family gaussian --q 3 --seed 2 --output " + in).code == 0);
        const auto out = scratch()("gauss_res.csv");
        REQUIRE(sglm_cli("residuals --family gaussian --input " + in + " --output " + out).code == 0);
        const io::Table t = io::read_table_file(out);
        for (const char* s : {"s1", "s2", "s3"}) {
            const auto raw = t.data.col(t.column_index(std::string(s) + "_raw"));
            const auto fisher = t.data.col(t.column_index(std::string(s) + "_fisher"));
            CHECK((raw - fisher).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("saturated fit gives zero residuals") {
        const auto in = scratch()("sat.csv");
        std::ofstream(in) << "y_a,y_b\n3,5\n";
        const auto out = scratch()("sat_res.csv");
        REQUIRE(sglm_cli("residuals --input " + in + " --output " + out).code == 0);
        const io::Table t = io::read_table_file(out);
        CHECK(t.data.rightCols(t.data.cols() - 1).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("unknown proxy column") {
        const auto in = scratch()("prox.csv");
        REQUIRE(sglm_cli("simulate --q 2 --output " + in).code == 0);
        const Run r = sglm_cli("residuals --proxy-column moon --input " + in + " --output " + scratch()("p.csv"));
        CHECK(r.code == 1);
        CHECK(r.err.rfind("error: config:", 0) == 0);
    }
}

TEST_CASE("cli fit") {
    const auto in = scratch()("fit_in.csv");
    REQUIRE(sglm_cli("simulate --q 3 --seed 4 --output " + in).code == 0);
    const auto out = scratch()("fit_out.csv");
    REQUIRE(sglm_cli("fit --input " + in + " --output " + out).code == 0);
    const std::string text = slurp(out);
    CHECK(text.find("series,term,estimate,std_error,model_std_error,converged,iterations,loglik\n") !=
          std::string::npos);
    CHECK(text.find("s3,x,") != std::string::npos);
}

TEST_CASE("cli benchmark") {
    const std::string common =
        "benchmark --replicates 6 --q-grid 2,4 --estimator glm,sglm,3qs --residual fisher,raw --seed 13 ";
    const auto a = scratch()("bench_a.csv"), b = scratch()("bench_b.csv"), c = scratch()("bench_c.csv");
    REQUIRE(sglm_cli(common + "--jobs 1 --output " + a).code == 0);
    REQUIRE(sglm_cli(common + "--jobs 1 --output " + b).code == 0);
    const Run r = sglm_cli(common + "--jobs 3 --output " + c);
    REQUIRE(r.code == 0);
    CHECK(r.err.find("cell q=2 glm") != std::string::npos);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    // the jobs count is echoed in no header, so files match across it
    CHECK(text == slurp(c));
    CHECK(text.find("family,q,estimator,residual,metric,mean,se,n,n_failed\n") != std::string::npos);
    CHECK(text.find("poisson,4,sglm,raw,mse,") != std::string::npos);
    CHECK(text.find("poisson,4,three_quarter,none,noise_corr,") != std::string::npos);
    // 2 q x (glm + 2 sglm + 3qs) x 4 metrics, plus the header
    std::istringstream ss(text);
    std::string line;
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 1 + 2 * 4 * 4);

    const Run bad = sglm_cli("benchmark --q-grid 1,2 --output " + scratch()("bench_bad.csv"));
    CHECK(bad.code == 64);
}

// Known deviation: on simulated Poisson panels the 1/mu scaling makes the
// fisher residual noisier where counts are low, and its mean |corr| with the
// shared noise comes out below the raw residual's (about 0.26 vs 0.30 at the
// defaults). Kept as an expected failure so a change in behaviour shows up.
TEST_CASE("cli residuals: fisher tracks the proxy at least as well as raw" * doctest::should_fail()) {
    double fisher = 0.0, raw = 0.0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const auto in = scratch()("mc.csv");
        const auto out = scratch()("mc_res.csv");
        REQUIRE(sglm_cli("simulate --q 2 --seed " + std::to_string(500 + rep) + " --output " + in).code == 0);
        REQUIRE(sglm_cli("residuals --proxy-column truth_noise --input " + in + " --output " + out).code == 0);
        const auto rows = slurp(scratch()("mc_res.proxy.csv"));
        std::istringstream ss(rows);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.rfind("s1,", 0) != 0) continue;
            const auto c1 = line.find(',', 3);
            const std::string kind = line.substr(3, c1 - 3);
            const double v = std::abs(std::stod(line.substr(c1 + 1)));
            if (kind == "fisher") fisher += v;
            if (kind == "raw") raw += v;
        }
    }
    CHECK(fisher / reps >= raw / reps);
}

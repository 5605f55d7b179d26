#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "pbrg/cli.hpp"

using namespace pbrg;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "n_points = 64\n"
    "alpha = 1.5\n"
    "equation = full\n"
    "init = cos1\n"
    "amplitude = 0.1\n"
    "t_end = 0.2\n";

ErrorCode parse_code(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config parsed without error");
    return ErrorCode::IoError;
}

std::string parse_message(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("pbrg_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(PBRG_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Field random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(g.n());
    for (int j = 0; j < g.n(); ++j) v(j) = nd(rng);
    return Field::from_real_values(g, v);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal config takes the defaults") {
    const RunConfig c = parse_config_text(kMinimal);
    CHECK(c.sim.n_points == 64);
    CHECK(c.sim.alpha == 1.5);
    CHECK(c.sim.equation == Equation::Full);
    CHECK(c.sim.init == InitialCondition::Cos1);
    CHECK(c.sim.cutoff.big_b == 8.0);
    CHECK(c.sim.cutoff.little_b == 2.0);
    CHECK(c.sim.dt == 0.0);
    CHECK(c.sim.seed == 0);
    CHECK(c.sim.samples == 10);
    CHECK(c.sim.dealias);
    CHECK_FALSE(c.sim.adaptive);
    CHECK(c.exp.s == 2.0);
    CHECK(c.exp.epsilon == 0.05);
    CHECK(c.exp.j_max == 8);
    CHECK(c.exp.scan_grids == std::vector<int>{512, 1024});
    CHECK(c.suite_params().seed == calib::kVerificationSeed);
    CHECK(parse_config_text(std::string(kMinimal) + "seed = 4\n").suite_params().seed == 4);

    const RunConfig p = parse_config_text(std::string(kMinimal) + "scan_alphas = 1.2, 1.9\nadaptive = true\n");
    CHECK(p.exp.scan_alphas == std::vector<double>{1.2, 1.9});
    CHECK(p.sim.adaptive);
}

TEST_CASE("config errors") {
    std::string bad_alpha = kMinimal;
    bad_alpha.replace(bad_alpha.find("1.5"), 3, "0.5");
    CHECK(parse_code(bad_alpha) == ErrorCode::InvalidValue);
    CHECK(parse_message(bad_alpha).find("alpha") != std::string::npos);

    const std::string dup = std::string(kMinimal) + "# again\nalpha = 2\n";
    CHECK(parse_code(dup) == ErrorCode::DuplicateKey);
    const std::string msg = parse_message(dup);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 8") != std::string::npos);

    CHECK(parse_code(std::string(kMinimal) + "gamma = 1\n") == ErrorCode::UnknownKey);
    CHECK(parse_message(std::string(kMinimal) + "gamma = 1\n").find("line 7") != std::string::npos);
    CHECK(parse_code(std::string(kMinimal) + "samples = many\n") == ErrorCode::TypeError);
    CHECK(parse_code(std::string(kMinimal) + "dealias = 2\n") == ErrorCode::TypeError);
    CHECK(parse_code(std::string(kMinimal) + "just text\n") == ErrorCode::TypeError);
    CHECK(parse_code(std::string(kMinimal) + "dt = -1\n") == ErrorCode::InvalidValue);
    CHECK(parse_code(std::string(kMinimal) + "n_points = 63\n") == ErrorCode::DuplicateKey);

    std::string missing = kMinimal;
    missing.erase(missing.find("t_end"));
    CHECK(parse_code(missing) == ErrorCode::MissingRequired);
    CHECK(parse_message(missing).find("t_end") != std::string::npos);
}

TEST_CASE("config hash ignores order, spacing and comments") {
    const std::string shuffled =
        "# shuffled\n"
        "t_end=0.2\n"
        "  amplitude   = 0.1   # comment\n"
        "init = cos1\n\n"
        "equation=full\n"
        "alpha =1.5\n"
        "n_points= 64\n";
    const RunConfig a = parse_config_text(kMinimal), b = parse_config_text(shuffled);
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(parse_config_text(std::string(kMinimal) + "seed = 1\n").hash() != a.hash());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(255) == "0x00000000000000ff");
}

TEST_CASE("snapshots round trip bit for bit") {
    const Grid g(64);
    const Field u = random_field(g, 9);
    const LoadedField lf = decode_field(encode_field(u, 1.75, 0.5));
    CHECK(lf.alpha == 1.75);
    CHECK(lf.t == 0.5);
    CHECK(lf.field.max_coef_diff(u) == 0.0);

    MatrixXc m(g.n(), g.n());
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) m(i, j) = cplx(nd(rng), nd(rng));
    Symbol a = Symbol::zero(g);
    a.coeffs() = m;
    const LoadedSymbol ls = decode_symbol(encode_symbol(a, 2.0, 1.0));
    CHECK((ls.symbol.coeffs() - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK(decode_header(encode_symbol(a, 2.0, 1.0)).kind == SnapshotKind::Symbol);

    const std::string bytes = encode_field(u, 1.75, 0.5);
    auto code_of = [](const std::string& b) {
        try {
            decode_field(b);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    std::string bad = bytes;
    bad[0] = 'Q';
    CHECK(code_of(bad) == ErrorCode::BadMagic);
    std::string ver = bytes;
    ver[4] = 2;
    CHECK(code_of(ver) == ErrorCode::VersionMismatch);
    CHECK(code_of(bytes.substr(0, bytes.size() - 3)) == ErrorCode::TruncatedPayload);
    CHECK(code_of(bytes.substr(0, 10)) == ErrorCode::TruncatedPayload);
    CHECK(code_of(bytes + "x") != ErrorCode::IoError);
    CHECK(code_of(encode_symbol(a, 2.0, 1.0)) == ErrorCode::BadMagic);
}

TEST_CASE("trajectory files") {
    const fs::path dir = scratch_dir("traj");
    SimConfig c;
    c.n_points = 64;
    c.alpha = 1.5;
    c.amplitude = 0.1;
    c.t_end = 0.3;
    c.samples = 2;
    const Trajectory tr = run(c);
    REQUIRE(tr.states.size() == 3);
    const std::vector<fs::path> files = save_trajectory(dir, "traj", tr, c.alpha);
    CHECK(files.size() == 4);
    CHECK(files.front().filename() == "traj_index.pbrg");
    for (const fs::path& f : files) CHECK(fs::exists(f));

    const LoadedTrajectory back = load_trajectory(files.front());
    CHECK(back.alpha == c.alpha);
    REQUIRE(back.states.size() == 3);
    for (size_t k = 0; k < 3; ++k) {
        CHECK(back.times[k] == tr.times[k]);
        const DiagnosticsRecord d0 = diagnostics(tr.states[k], c.alpha, {2.0});
        const DiagnosticsRecord d1 = diagnostics(back.states[k], c.alpha, {2.0});
        CHECK(std::abs(d1.mass - d0.mass) <= 1e-12);
        CHECK(std::abs(d1.hamiltonian - d0.hamiltonian) <= 1e-12);
        CHECK(std::abs(d1.sobolev_norms.at(2.0) - d0.sobolev_norms.at(2.0)) <= 1e-12);
    }
    const std::vector<TrajectoryIndexEntry> idx = decode_trajectory_index(read_file(files.front()));
    CHECK(idx.size() == 3);
    CHECK(idx[1].file == "traj_0001.pbrg");
    fs::remove_all(dir);
}

TEST_CASE("csv and failure records") {
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CsvTable t({"a", "b"});
    t.add_numbers({1.0, 2.5});
    CHECK(t.str() == "a,b\n1,2.5\n");
    CHECK_THROWS_AS(t.add({"x"}), Error);
    const std::string rec = failure_record(check_le("demo", 2.0, 1.0));
    CHECK(rec.find("\"name\":\"demo\"") != std::string::npos);
    CHECK(rec.find('\n') == std::string::npos);
    RunManifest m;
    m.config_hash = 1;
    m.outputs = {"x.csv"};
    CHECK(m.to_json().find("\"config_hash\": \"0x0000000000000001\"") != std::string::npos);
}

TEST_CASE("command line tool") {
    const fs::path dir = scratch_dir("tool");
    {
        std::ofstream(dir / "gauge.cfg") << "n_points = 64\nalpha = 1.5\nequation = paralinear\ninit = cos1\n"
                                            "amplitude = 0.01\nt_end = 0.1\nB = 8\n";
        std::ofstream(dir / "sim.cfg") << kMinimal << "samples = 4\n";
        std::ofstream(dir / "bad.cfg") << kMinimal << "gamma = 2\n";
    }
    const std::string d = dir.string();
    CHECK(run_tool("verify-gauge -c " + d + "/gauge.cfg -o " + d + "/g") == 0);
    CHECK(fs::exists(dir / "g" / "manifest.json"));
    CHECK(run_tool("transmogrify -c " + d + "/gauge.cfg") == 2);
    CHECK(run_tool("simulate") == 2);
    CHECK(run_tool("simulate -c " + d + "/bad.cfg -o " + d + "/bad") == 1);

    REQUIRE(run_tool("simulate -c " + d + "/sim.cfg -o " + d + "/s1") == 0);
    REQUIRE(run_tool("simulate -c " + d + "/sim.cfg -o " + d + "/s2") == 0);
    const std::string csv1 = read_file(dir / "s1" / "simulate.csv");
    CHECK(csv1 == read_file(dir / "s2" / "simulate.csv"));
    CHECK(csv1.rfind("t,mass,hamiltonian,H2,lipschitz,weak_criterion,sup\n", 0) == 0);
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 6);
    CHECK(read_file(dir / "s1" / "final.pbrg") == read_file(dir / "s2" / "final.pbrg"));
    CHECK(fs::exists(dir / "s1" / "trajectory_index.pbrg"));
    const std::string manifest = read_file(dir / "s1" / "manifest.json");
    CHECK(manifest.find(hex64(parse_config(dir / "sim.cfg").hash())) != std::string::npos);
    CHECK(manifest.find("simulate.csv") != std::string::npos);
    fs::remove_all(dir);
}

}

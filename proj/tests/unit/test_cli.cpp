#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/runner.hpp"
#include "cqed/table.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace cqed;
using namespace cqed::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cqed_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_sim(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(CQED_SIM_PATH) + " " + args + " >" + (log.string() + ".out") +
                            " 2>" + log.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_ensemble() {
    return parse_config(R"(
[experiment]
kind = ensemble
[time]
t_max = 1
samples = 11
[crystal]
atom_count = 11
lattice_constant = lambda/4
[ensemble]
configs = 5
seed = 3
)");
}

}  // namespace

TEST_CASE("parse_config: empty text yields the documented defaults") {
    const ExperimentConfig c = parse_config("");
    CHECK(c == ExperimentConfig{});
    CHECK(c.cavity_length == kLength);
    CHECK(c.cutoff_frequency == kCutoff);
    CHECK(c.transition_frequency == kOmegaA);
    CHECK(c.coupling_squared == 0.5);
    CHECK(mode_basis(c).mode_count() == 400);
    CHECK(resonant_wavelength(c) == doctest::Approx(kLambdaA).epsilon(1e-15));
    CHECK(c.lattice_constant == doctest::Approx(kLambdaA / 4.0).epsilon(1e-15));
}

TEST_CASE("parse_config: sections, comments and lambda / L lengths") {
    const ExperimentConfig c = parse_config(R"(
# emitter near the left mirror
[experiment]
kind = sweep       ; inline comment
[atom]
position = lambda/8
coupling = 0.5
[sweep]
positions = lambda/2, 3*lambda/4, L/2, +lambda/16, 0.25
)");
    CHECK(c.kind == ExperimentKind::sweep);
    CHECK(c.position == doctest::Approx(kLambdaA / 8.0).epsilon(1e-15));
    CHECK(c.coupling_squared == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(c.sweep_positions.size() == 5);
    CHECK(c.sweep_positions[0] == doctest::Approx(kLambdaA / 2.0).epsilon(1e-15));
    CHECK(c.sweep_positions[1] == doctest::Approx(0.75 * kLambdaA).epsilon(1e-15));
    CHECK(c.sweep_positions[2] == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(c.sweep_positions[3] == doctest::Approx(kLambdaA / 16.0).epsilon(1e-15));
    CHECK(c.sweep_positions[4] == 0.25);
    CHECK(c.sweep_offsets.empty());
    const ExperimentConfig o = parse_config("[sweep]\noffsets = 0, -lambda/16, 2*L/100\n");
    REQUIRE(o.sweep_offsets.size() == 3);
    CHECK(o.sweep_offsets[1] == doctest::Approx(-kLambdaA / 16.0).epsilon(1e-15));
    CHECK(o.sweep_offsets[2] == doctest::Approx(2.0 * kLambdaA).epsilon(1e-15));
}

TEST_CASE("parse_config: ensemble kind defaults to random placement") {
    CHECK(parse_config("[experiment]\nkind = ensemble\n").placement == Placement::random_per_cell);
    CHECK(parse_config("", ExperimentKind::ensemble).placement == Placement::random_per_cell);
    CHECK(parse_config("[experiment]\nkind = crystal\n").placement == Placement::regular);
}

TEST_CASE("parse_config: errors carry the line and the key") {
    const auto expect = [](std::string_view text, int line, const std::string& key) {
        try {
            parse_config(text);
            FAIL("accepted: " << text);
        } catch (const ConfigError& e) {
            CHECK(e.line() == line);
            CHECK(e.key() == key);
        }
    };
    expect("[cavity]\nlength = 6\nwidth = 3\n", 3, "cavity.width");
    expect("[cavity]\nlength = 6\nlength = 7\n", 3, "cavity.length");
    expect("[nowhere]\nx = 1\n", 1, "nowhere");
    expect("length = 6\n", 1, "length");
    expect("[atom]\ncoupling = 0.5\ncoupling_squared = 0.25\n", 2, "atom.coupling");
    expect("[time]\nsamples = many\n", 2, "time.samples");
    expect("[time]\nsamples = -3\n", 2, "time.samples");
    expect("[crystal]\nlattice_constant = lambda/0\n", 2, "crystal.lattice_constant");
    expect("[backend]\nmethod = euler\n", 2, "backend.method");
}

TEST_CASE("parse_config: a subcommand that disagrees with the file is an error") {
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = decay\n", ExperimentKind::ensemble), ConfigError);
    CHECK(parse_config("[experiment]\nkind = decay\n", ExperimentKind::decay).kind == ExperimentKind::decay);
}

TEST_CASE("validate: physical constraints on the resolved config") {
    ExperimentConfig c;
    c.position = 0.0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.position = kLength;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.cutoff_frequency = 0.1;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.samples = 1;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.kind = ExperimentKind::crystal;
    c.crystal_atoms = 100;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = ExperimentConfig{};
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("serialize_config: round trip is exact") {
    ExperimentConfig c = small_ensemble();
    c.position = kPi + 1.0 / 3.0;
    c.sweep_offsets = {0.0, kLambdaA / 16.0, -0.1};
    c.readout_times = {0.8, 2.5};
    c.frame = Frame::lab;
    c.backend = Backend::rk;
    c.output_dir = "some/dir";
    const ExperimentConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("load_config: missing files are I/O errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/cqed.ini"), IoError);
}

TEST_CASE("format_number and Table: 17 significant digits, tab separated") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::stod(format_number(kPi)) == kPi);
    Table t({"t", "P_e"});
    t.meta("kind", "decay");
    t.meta("gamma", 0.5);
    t.add_row({0.0, 1.0});
    t.add_row({0.25, 1.0 / 3.0});
    CHECK(t.row_count() == 2);
    CHECK(t.render() == "# kind = decay\n# gamma = 0.5\nt\tP_e\n0\t1\n0.25\t0.33333333333333331\n");
    CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
}

TEST_CASE("write_file_atomic: creates parents, leaves no temp file") {
    const fs::path dir = scratch("atomic");
    write_file_atomic(dir / "a" / "b.txt", "hello\n");
    CHECK(slurp(dir / "a" / "b.txt") == "hello\n");
    CHECK_FALSE(fs::exists(dir / "a" / "b.txt.tmp"));
    CHECK_THROWS_AS(write_file_atomic(dir / "a" / "b.txt" / "c.txt", "x"), IoError);
}

TEST_CASE("run_experiment: ensemble output is byte identical across runs and thread counts") {
    const fs::path dir = scratch("ensemble");
    ExperimentConfig c = small_ensemble();
    const RunResult a = run_experiment(c, dir / "a");
    const RunResult b = run_experiment(c, dir / "b");
    c.threads = 3;
    const RunResult p = run_experiment(c, dir / "p");
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].filename() == b.files[i].filename());
        if (a.files[i].filename() != "manifest.txt") {
            CHECK(slurp(a.files[i]) == slurp(b.files[i]));
        }
    }
    CHECK(slurp(dir / "a" / "ensemble.tsv") == slurp(dir / "p" / "ensemble.tsv"));
    CHECK(slurp(dir / "a" / "seeds.tsv") == slurp(dir / "p" / "seeds.tsv"));
    CHECK(a.files.back().filename() == "manifest.txt");
}

TEST_CASE("run_experiment: the manifest reloads to the same config and data") {
    const fs::path dir = scratch("manifest");
    ExperimentConfig c;
    c.kind = ExperimentKind::decay;
    c.t_max = 1.0;
    c.samples = 21;
    c.position = 1.3;
    run_experiment(c, dir / "first");
    const ExperimentConfig again = load_config(dir / "first" / "manifest.txt");
    CHECK(again.position == c.position);
    CHECK(again.samples == c.samples);
    run_experiment(again, dir / "second");
    CHECK(slurp(dir / "first" / "decay.tsv") == slurp(dir / "second" / "decay.tsv"));
}

TEST_CASE("figure ids and parts") {
    CHECK(figure_ids() == std::vector<std::string>{"1", "2", "3", "4", "5", "6", "7", "7b", "8"});
    for (const auto& id : figure_ids()) {
        const auto parts = figure_parts(id);
        CHECK_FALSE(parts.empty());
        for (const auto& p : parts) {
            CHECK(p.config.output_dir.rfind("fig" + id + "/", 0) == 0);
            CHECK_NOTHROW(validate(p.config));
        }
    }
    CHECK_THROWS_AS(figure_parts("9"), ValidationError);
}

TEST_CASE("cqed_sim: exit codes and structured errors") {
    const fs::path dir = scratch("sim");
    const fs::path log = dir / "stderr.txt";

    CHECK(run_sim("--version", log) == 0);
    CHECK(slurp(log.string() + ".out").find(std::string(version())) != std::string::npos);

    const fs::path cfg = dir / "decay.ini";
    write_file_atomic(cfg, "[time]\nt_max = 0.5\nsamples = 11\n");
    CHECK(run_sim("decay --config " + cfg.string() + " --out " + (dir / "run").string(), log) == 0);
    CHECK(fs::exists(dir / "run" / "decay.tsv"));
    CHECK(fs::exists(dir / "run" / "manifest.txt"));

    write_file_atomic(cfg, "[atom]\nposition = 0\n");
    CHECK(run_sim("decay --config " + cfg.string() + " --out " + (dir / "bad").string(), log) == 2);
    CHECK(slurp(log).find("\"status\":\"error\"") != std::string::npos);

    write_file_atomic(cfg, "[time]\nt_max = 1\nspeed = 3\n");
    CHECK(run_sim("decay --config " + cfg.string(), log) == 2);
    const std::string err = slurp(log);
    CHECK(err.find("\"line\":3") != std::string::npos);
    CHECK(err.find("\"key\":\"time.speed\"") != std::string::npos);

    CHECK(run_sim("decay --config " + (dir / "missing.ini").string(), log) == 4);
    CHECK(run_sim("bogus", log) == 2);
    CHECK(run_sim("reproduce-figure 42", log) == 2);
    CHECK(run_sim("reproduce-figure 1 --config " + cfg.string(), log) == 2);
    CHECK(run_sim("ensemble --threads 0", log) == 2);

    write_file_atomic(cfg, "[time]\nt_max = 0.5\nsamples = 11\n");
    CHECK(run_sim("decay --backend rk --config " + cfg.string() + " --out " + (dir / "rk").string(), log) == 0);
    write_file_atomic(cfg, "[time]\nt_max = 0.5\nsamples = 11\n[backend]\nmethod = rk\nrk_step = 0.1\n");
    CHECK(run_sim("decay --config " + cfg.string() + " --out " + (dir / "unstable").string(), log) == 3);
    CHECK(slurp(log).find("\"category\":\"numerical\"") != std::string::npos);
}

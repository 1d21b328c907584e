#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "koopman/cli.hpp"
#include "koopman/config.hpp"
#include "koopman/errors.hpp"

using namespace koopman;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("experiment1 preset pins the expected parameters") {
    const ExperimentConfig cfg = preset("experiment1");
    CHECK(cfg.system.n == 3);
    REQUIRE(cfg.system.vector_field.size() == 3);
    CHECK(cfg.system.vector_field[0][0].coeff == -1.9796);
    CHECK(cfg.system.vector_field[0][1].alpha == std::vector<int>{0, 1, 1});
    CHECK(cfg.system.vector_field[1][1].coeff == 1.475);
    CHECK(cfg.system.vector_field[2][1].coeff == 0.853);
    CHECK(cfg.output.components[1][0].kind == "cos");
    CHECK(cfg.output.components[1][0].variable == 1);
    CHECK(cfg.observer.degree == 4);
    CHECK(cfg.observer.beta == -2.0);
    CHECK(cfg.observer.targets == std::vector<double>{-2.0, -2.1, -2.2});
    CHECK(cfg.observer.x0 == std::vector<double>{0.45, 0.8, 0.4});
    CHECK(cfg.observer.xhat0 == std::vector<double>{0.9, 0.5, -0.67});

    const ExperimentConfig lz = preset("lorenz");
    CHECK(lz.observer.degree == 6);
    CHECK(lz.observer.beta == -1.5);
    CHECK(lz.baseline.targets == std::vector<double>{-1.5, -1.6, -1.5291});
    CHECK(lz.flags.skip_invariance_check);

    CHECK_THROWS_AS((void)preset("nope"), ValidationError);
}

TEST_CASE("presets round-trip through emit/parse") {
    for (const std::string& name : preset_names()) {
        const ExperimentConfig cfg = preset(name);
        const ExperimentConfig back = parse_config(emit_config(cfg));
        CHECK(back == cfg);
    }
}

TEST_CASE("validation collects every error with field paths") {
    const std::string bad = R"({
      "system": {"name": "broken", "n": 3, "vector_field": []},
      "output": {"components": [[{"kind": "monomial", "coeff": 1.0, "alpha": [1, 0, 0]}]]},
      "observer": {"degree": 4, "beta": 1.0, "targets": [-2.0],
                   "x0": [0.1, 0.1, 0.1], "xhat0": [0.1, 0.1, 0.1]},
      "baseline": {"targets": [-2.0, -2.1, -2.2]}
    })";
    try {
        (void)parse_config(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("system.vector_field") != std::string::npos);
        CHECK(msg.find("components") != std::string::npos);
        CHECK(msg.find("observer.beta") != std::string::npos);
        CHECK(msg.find("2 errors") != std::string::npos);
    }
}

TEST_CASE("parse rejects malformed documents and values") {
    CHECK_THROWS_AS((void)parse_config("not json"), ValidationError);
    CHECK_THROWS_AS((void)parse_config("[1,2,3]"), ValidationError);

    // x0 outside the open polydisc
    ExperimentConfig cfg = preset("experiment1");
    std::string text = emit_config(cfg);
    const std::string needle = "\"x0\": [\n      0.45,";
    const auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.replace(at, needle.size(), "\"x0\": [\n      1.45,");
    CHECK_THROWS_AS((void)parse_config(text), ValidationError);

    // unknown fields are named
    try {
        (void)parse_config(R"({"bogus": 1})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("cli: presets subcommands") {
    CHECK(run_cli({"presets", "list"}) == 0);
    CHECK(run_cli({"presets", "show", "experiment1"}) == 0);
    CHECK(run_cli({"presets", "show", "nope"}) == 2);
}

TEST_CASE("cli: exit codes by failure stage") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "koopman_cli_test";
    fs::create_directories(dir);

    // validation error: malformed config file
    {
        std::ofstream out(dir / "bad.json");
        out << "{\"system\": 3}";
    }
    CHECK(run_cli({"check", "--config", (dir / "bad.json").string()}) == 2);
    CHECK(run_cli({"check", "--config", (dir / "missing.json").string()}) == 2);
    CHECK(run_cli({"check"}) == 2);

    // assumption violation: resonant eigenvalues
    {
        std::ofstream out(dir / "resonant.json");
        out << R"({
          "system": {"name": "resonant", "n": 2,
                     "vector_field": [[{"coeff": -1.0, "alpha": [1, 0]}],
                                      [{"coeff": -2.0, "alpha": [0, 1]}]]},
          "output": {"components": [[{"kind": "monomial", "coeff": 1.0, "alpha": [1, 0]}],
                                     [{"kind": "monomial", "coeff": 1.0, "alpha": [0, 1]}]]},
          "observer": {"degree": 2, "beta": -2.5, "targets": [-3.0, -3.1, -3.2],
                       "x0": [0.3, 0.3], "xhat0": [0.1, 0.1], "t_end": 1.0, "dt": 0.001},
          "baseline": {"targets": [-3.0, -3.1]}
        })";
    }
    CHECK(run_cli({"check", "--config", (dir / "resonant.json").string()}) == 3);

    // synthesis failure: unobservable unstable mode (degree-2-only output)
    {
        std::ofstream out(dir / "unobservable.json");
        out << R"({
          "system": {"name": "unobservable", "n": 1,
                     "vector_field": [[{"coeff": -1.0, "alpha": [1]}]]},
          "output": {"components": [[{"kind": "monomial", "coeff": 1.0, "alpha": [2]}]]},
          "observer": {"degree": 3, "beta": -1.5, "targets": [-2.0],
                       "x0": [0.4], "xhat0": [0.1], "t_end": 1.0, "dt": 0.001},
          "baseline": {"targets": [-2.0]}
        })";
    }
    CHECK(run_cli({"run", "--config", (dir / "unobservable.json").string(),
                   "--out", (dir / "unobs_out").string()}) == 4);

    // simulation failure: horizon too short to fit a rate
    {
        std::ofstream out(dir / "shorthorizon.json");
        out << R"({
          "system": {"name": "short", "n": 1,
                     "vector_field": [[{"coeff": -1.0, "alpha": [1]}]]},
          "output": {"components": [[{"kind": "monomial", "coeff": 1.0, "alpha": [1]}]]},
          "observer": {"degree": 2, "beta": -1.5, "targets": [-2.0],
                       "x0": [0.4], "xhat0": [0.1], "t_end": 0.005, "dt": 0.001},
          "baseline": {"targets": [-2.0]}
        })";
    }
    CHECK(run_cli({"run", "--config", (dir / "shorthorizon.json").string(),
                   "--out", (dir / "short_out").string()}) == 5);

    fs::remove_all(dir);
}

TEST_CASE("cli: experiment1 run reports the expected structure") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "koopman_exp1_out";
    fs::remove_all(dir);
    CHECK(run_cli({"run", "--preset", "experiment1", "--out", dir.string()}) == 0);
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"N_beta\": 3") != std::string::npos);
    CHECK(summary.find("\"N_d\": 34") != std::string::npos);
    CHECK(summary.find("\"d\": 4") != std::string::npos);

    // spectrum.csv has one row per basis position
    const std::string spectrum = slurp(dir / "spectrum.csv");
    CHECK(std::count(spectrum.begin(), spectrum.end(), '\n') == 35);  // header + 34 modes
    fs::remove_all(dir);
}

TEST_CASE("cli: lorenz check reports the skipped invariance verdict") {
    CHECK(run_cli({"check", "--preset", "lorenz"}) == 0);
    const ExperimentResult res = check_experiment(preset("lorenz"));
    CHECK(res.invariance.skipped);
    CHECK_FALSE(res.invariance.checked);
    CHECK(!res.warnings.empty());
}

TEST_CASE("cli: run writes deterministic artifacts") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "koopman_det_test";
    fs::remove_all(dir);

    // a small fast config: 1-d contraction
    const std::string quick = R"({
      "system": {"name": "quick", "n": 1,
                 "vector_field": [[{"coeff": -1.0, "alpha": [1]}, {"coeff": 0.3, "alpha": [2]}]]},
      "output": {"components": [[{"kind": "monomial", "coeff": 1.0, "alpha": [1]}]]},
      "observer": {"degree": 3, "beta": -2.5, "targets": [-3.0, -2.6],
                   "x0": [0.4], "xhat0": [-0.2], "t_end": 3.0, "dt": 0.001},
      "baseline": {"targets": [-3.0]},
      "seed": 7
    })";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "quick.json");
        out << quick;
    }
    CHECK(run_cli({"run", "--config", (dir / "quick.json").string(), "--out", (dir / "a").string()}) == 0);
    CHECK(run_cli({"run", "--config", (dir / "quick.json").string(), "--out", (dir / "b").string()}) == 0);

    for (const char* name : {"trajectory.csv", "summary.json", "spectrum.csv"}) {
        CAPTURE(name);
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }

    const std::string header = slurp(dir / "a" / "trajectory.csv").substr(0, 200);
    CHECK(header.rfind("t,x1,y1,xk_hat1,xb_hat1,err_koopman,err_baseline\n", 0) == 0);
    fs::remove_all(dir);
}

#include "koopman/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "koopman/errors.hpp"

namespace koopman {

namespace {

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

nlohmann::ordered_json poles_json(const std::vector<Complex>& poles) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Complex& p : poles) arr.push_back({p.real(), p.imag()});
    return arr;
}

}  // namespace

std::string trajectory_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= res.n; ++i) os << ",x" << i;
    for (int i = 1; i <= res.m; ++i) os << ",y" << i;
    for (int i = 1; i <= res.n; ++i) os << ",xk_hat" << i;
    for (int i = 1; i <= res.n; ++i) os << ",xb_hat" << i;
    os << ",err_koopman,err_baseline\n";
    for (std::size_t k = 0; k < res.t.size(); ++k) {
        os << fmt(res.t[k]);
        for (int i = 0; i < res.n; ++i) os << "," << fmt(res.x[k](i));
        for (int i = 0; i < res.m; ++i) os << "," << fmt(res.y[k](i));
        for (int i = 0; i < res.n; ++i) os << "," << fmt(res.xhat_koopman[k](i));
        for (int i = 0; i < res.n; ++i) os << "," << fmt(res.xhat_baseline[k](i));
        os << "," << fmt(res.err_koopman[k]) << "," << fmt(res.err_baseline[k]) << "\n";
    }
    return os.str();
}

std::string summary_json(const ExperimentResult& res, const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["system"] = config.system.name;
    j["dimensions"] = {{"n", res.n}, {"m", res.m}, {"d", res.d}, {"N_d", res.n_d}, {"N_beta", res.n_beta}};
    j["beta"] = res.beta;
    j["dt"] = res.dt;
    j["t_end"] = res.t_end;
    j["seed"] = config.seed;
    j["rates"]["koopman"] = {{"gamma", res.rate_koopman.gamma},
                             {"residual", res.rate_koopman.residual},
                             {"underflowed", res.rate_koopman.underflowed}};
    j["rates"]["baseline"] = {{"gamma", res.rate_baseline.gamma},
                              {"residual", res.rate_baseline.residual},
                              {"underflowed", res.rate_baseline.underflowed}};
    auto component_rates = [](const std::vector<RateFit>& rates) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const RateFit& r : rates) {
            arr.push_back({{"gamma", r.gamma}, {"residual", r.residual}, {"underflowed", r.underflowed}});
        }
        return arr;
    };
    j["rates"]["koopman_components"] = component_rates(res.rate_koopman_components);
    j["rates"]["baseline_components"] = component_rates(res.rate_baseline_components);
    j["criteria"] = {{"pao", res.criteria.pao},
                     {"detectability", res.criteria.detectability},
                     {"convergence", res.criteria.convergence},
                     {"tol", res.criteria.tol}};
    j["nonresonance"] = {{"passed", res.nonresonance.passed},
                         {"margin", res.nonresonance.margin},
                         {"tol", res.nonresonance.tol}};
    j["invariance"] = {{"checked", res.invariance.checked},
                       {"passed", res.invariance.passed},
                       {"skipped", res.invariance.skipped},
                       {"note", res.invariance.note},
                       {"max_abs_strict", res.invariance.max_abs_strict},
                       {"max_abs_closed", res.invariance.max_abs_closed}};
    j["poles"]["koopman"] = {{"targets", poles_json(res.koopman_targets)},
                             {"achieved", poles_json(res.koopman_achieved)}};
    j["poles"]["baseline"] = {{"targets", poles_json(res.baseline_targets)},
                              {"achieved", poles_json(res.baseline_achieved)}};
    j["diagnostics"] = {{"min_lattice_gap", res.min_lattice_gap},
                        {"biortho_error", res.biortho_error},
                        {"eigen_residual_v", res.residual_v},
                        {"eigen_residual_w", res.residual_w},
                        {"max_imag_residue", res.max_imag_residue}};
    j["warnings"] = res.warnings;
    return j.dump(2) + "\n";
}

std::string spectrum_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "position";
    for (int i = 1; i <= res.n; ++i) os << ",alpha" << i;
    os << ",re_lambda,im_lambda";
    for (int i = 1; i <= res.m; ++i) os << ",abs_h" << i << "_psi";
    os << "\n";
    for (std::size_t p = 0; p < res.basis.size(); ++p) {
        os << p;
        for (int i = 0; i < res.n; ++i) os << "," << res.basis[p][i];
        os << "," << fmt(res.lattice[p].real()) << "," << fmt(res.lattice[p].imag());
        for (int i = 0; i < res.m; ++i) os << "," << fmt(res.psi_products_abs(i, static_cast<int>(p)));
        os << "\n";
    }
    return os.str();
}

namespace {

ExperimentConfig load_config(const std::string& preset_name, const std::string& config_path) {
    if (!preset_name.empty() && !config_path.empty()) {
        throw ValidationError("use either --preset or --config, not both");
    }
    if (!preset_name.empty()) return preset(preset_name);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot open config file " + config_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_config(buffer.str());
    }
    throw ValidationError("a configuration is required: pass --preset <name> or --config <path>");
}

struct Overrides {
    double dt = 0.0;
    double t_end = 0.0;
    int degree = 0;
    double beta = 0.0;
    bool has_dt = false, has_t_end = false, has_degree = false, has_beta = false;

    void apply(ExperimentConfig& config) const {
        if (has_dt) config.observer.dt = dt;
        if (has_t_end) config.observer.t_end = t_end;
        if (has_degree) config.observer.degree = degree;
        if (has_beta) config.observer.beta = beta;
    }
};

void add_config_options(CLI::App* cmd, std::string& preset_name, std::string& config_path,
                        Overrides& over) {
    cmd->add_option("--preset", preset_name, "Built-in experiment preset (see `presets list`)");
    cmd->add_option("--config", config_path, "Path to a JSON experiment config");
    cmd->add_option("--dt", over.dt, "Override the integration step")->each([&](const std::string&) {
        over.has_dt = true;
    });
    cmd->add_option("--t-end", over.t_end, "Override the horizon")->each([&](const std::string&) {
        over.has_t_end = true;
    });
    cmd->add_option("--degree", over.degree, "Override the truncation degree")->each([&](const std::string&) {
        over.has_degree = true;
    });
    cmd->add_option("--beta", over.beta, "Override beta")->each([&](const std::string&) {
        over.has_beta = true;
    });
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot write " + path.string());
    out << content;
}

void print_check_report(const ExperimentResult& res) {
    std::cout << "dimensions: n = " << res.n << ", m = " << res.m << ", d = " << res.d
              << ", N_d = " << res.n_d << ", N_beta = " << res.n_beta << "\n";
    std::cout << "nonresonance: " << (res.nonresonance.passed ? "pass" : "FAIL")
              << " (margin " << res.nonresonance.margin << ", tol " << res.nonresonance.tol << ")\n";
    if (res.invariance.skipped) {
        std::cout << "invariance: skipped with warning - " << res.invariance.note << "\n";
    } else {
        std::cout << "invariance: " << (res.invariance.passed ? "pass" : "FAIL") << " (max |u_i| strict = {";
        for (std::size_t i = 0; i < res.invariance.max_abs_strict.size(); ++i) {
            std::cout << (i ? ", " : "") << res.invariance.max_abs_strict[i];
        }
        std::cout << "})\n";
    }
    std::cout << "criteria: PAO " << (res.criteria.pao ? "pass" : "FAIL") << ", detectability "
              << (res.criteria.detectability ? "pass" : "FAIL") << ", convergence "
              << (res.criteria.convergence ? "pass" : "FAIL") << " (tol " << res.criteria.tol << ")\n";
    std::cout << "principal inner products |<h_i, psi_j>|:\n";
    for (int i = 0; i < res.criteria.principal_products.rows(); ++i) {
        std::cout << "  h" << i + 1 << ":";
        for (int jcol = 0; jcol < res.criteria.principal_products.cols(); ++jcol) {
            std::cout << " " << std::abs(res.criteria.principal_products(i, jcol));
        }
        std::cout << "\n";
    }
    std::cout << "beta-unstable inner products |<h_i, psi>| (" << res.n_beta << " modes):\n";
    for (int i = 0; i < res.criteria.unstable_products.rows(); ++i) {
        std::cout << "  h" << i + 1 << ":";
        for (int jcol = 0; jcol < res.criteria.unstable_products.cols(); ++jcol) {
            std::cout << " " << std::abs(res.criteria.unstable_products(i, jcol));
        }
        std::cout << "\n";
    }
    std::cout << "spectrum (position, alpha, lambda):\n";
    for (std::size_t p = 0; p < res.basis.size(); ++p) {
        std::cout << "  " << p << "  " << res.basis[p].to_string() << "  " << res.lattice[p].real();
        if (res.lattice[p].imag() != 0.0) std::cout << " + " << res.lattice[p].imag() << "i";
        std::cout << "\n";
    }
    for (const std::string& w : res.warnings) std::cout << "warning: " << w << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Koopman-observer synthesis and simulation for analytic nonlinear systems"};
    app.require_subcommand(1);

    std::string preset_name, config_path, out_dir = ".";
    Overrides over;

    CLI::App* run_cmd = app.add_subcommand("run", "Run the full pipeline and write CSV/summary outputs");
    add_config_options(run_cmd, preset_name, config_path, over);
    run_cmd->add_option("--out", out_dir, "Output directory (default: current directory)");

    CLI::App* check_cmd = app.add_subcommand("check", "Validate assumptions and criteria; no simulation");
    add_config_options(check_cmd, preset_name, config_path, over);

    CLI::App* presets_cmd = app.add_subcommand("presets", "Built-in experiment presets");
    CLI::App* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
    std::string show_name;
    CLI::App* show_cmd = presets_cmd->add_subcommand("show", "Print a preset config as JSON");
    show_cmd->add_option("name", show_name, "Preset name")->required();
    presets_cmd->require_subcommand(1);

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    storage.insert(storage.begin(), "koopman-observer");
    argv.reserve(storage.size());
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list_cmd->parsed()) {
            for (const std::string& name : preset_names()) std::cout << name << "\n";
            return 0;
        }
        if (show_cmd->parsed()) {
            std::cout << emit_config(preset(show_name));
            return 0;
        }

        ExperimentConfig config = load_config(preset_name, config_path);
        over.apply(config);

        if (check_cmd->parsed()) {
            print_check_report(check_experiment(config));
            return 0;
        }

        // run
        ExperimentResult res = run_experiment(config);
        std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "trajectory.csv", trajectory_csv(res));
        write_file(dir / "summary.json", summary_json(res, config));
        write_file(dir / "spectrum.csv", spectrum_csv(res));

        std::cout << "system: " << config.system.name << "\n"
                  << "N_d = " << res.n_d << ", N_beta = " << res.n_beta << ", d = " << res.d
                  << ", beta = " << res.beta << "\n"
                  << "fitted rates: koopman gamma = " << res.rate_koopman.gamma
                  << ", baseline gamma = " << res.rate_baseline.gamma << "\n"
                  << "outputs: " << (dir / "trajectory.csv").string() << ", "
                  << (dir / "summary.json").string() << ", " << (dir / "spectrum.csv").string() << "\n";
        for (const std::string& w : res.warnings) std::cout << "warning: " << w << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace koopman

#include "koopman/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "koopman/errors.hpp"

namespace koopman {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class Validator {
public:
    void fail(const std::string& path, const std::string& message) {
        errors_.push_back(path + ": " + message);
    }

    bool ok() const { return errors_.empty(); }

    void raise_if_failed() const {
        if (errors_.empty()) return;
        std::ostringstream os;
        os << "config validation failed (" << errors_.size() << " error"
           << (errors_.size() > 1 ? "s" : "") << "):";
        for (const std::string& e : errors_) os << "\n  - " << e;
        throw ValidationError(os.str());
    }

    const json* object(const json& parent, const std::string& path, const std::string& key,
                       bool required = true) {
        if (!parent.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return nullptr;
        }
        if (!parent.at(key).is_object()) {
            fail(path + "." + key, "must be an object");
            return nullptr;
        }
        return &parent.at(key);
    }

    const json* array(const json& parent, const std::string& path, const std::string& key,
                      bool required = true) {
        if (!parent.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return nullptr;
        }
        if (!parent.at(key).is_array()) {
            fail(path + "." + key, "must be an array");
            return nullptr;
        }
        return &parent.at(key);
    }

    double number(const json& parent, const std::string& path, const std::string& key,
                  double fallback, bool required = true) {
        if (!parent.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return fallback;
        }
        if (!parent.at(key).is_number()) {
            fail(path + "." + key, "must be a number");
            return fallback;
        }
        const double v = parent.at(key).get<double>();
        if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
        return v;
    }

    int integer(const json& parent, const std::string& path, const std::string& key, int fallback,
                bool required = true) {
        if (!parent.contains(key)) {
            if (required) fail(path + "." + key, "missing");
            return fallback;
        }
        if (!parent.at(key).is_number_integer()) {
            fail(path + "." + key, "must be an integer");
            return fallback;
        }
        return parent.at(key).get<int>();
    }

    void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        for (const auto& [key, value] : obj.items()) {
            bool known = false;
            for (const char* a : allowed) {
                if (key == a) {
                    known = true;
                    break;
                }
            }
            if (!known) fail(path.empty() ? key : path + "." + key, "unknown field");
        }
    }

    std::vector<double> number_list(const json& parent, const std::string& path, const std::string& key) {
        std::vector<double> out;
        const json* arr = array(parent, path, key);
        if (!arr) return out;
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const json& v = (*arr)[i];
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                fail(path + "." + key + "[" + std::to_string(i) + "]", "must be a finite number");
                out.push_back(0.0);
            } else {
                out.push_back(v.get<double>());
            }
        }
        return out;
    }

private:
    std::vector<std::string> errors_;
};

std::vector<int> parse_alpha(Validator& v, const json& term, const std::string& path, int n) {
    std::vector<int> alpha;
    if (!term.contains("alpha") || !term.at("alpha").is_array()) {
        v.fail(path + ".alpha", "must be an integer array");
        return std::vector<int>(static_cast<std::size_t>(std::max(n, 1)), 0);
    }
    for (const json& e : term.at("alpha")) {
        if (!e.is_number_integer() || e.get<int>() < 0) {
            v.fail(path + ".alpha", "entries must be nonnegative integers");
            alpha.push_back(0);
        } else {
            alpha.push_back(e.get<int>());
        }
    }
    if (n > 0 && static_cast<int>(alpha.size()) != n) {
        v.fail(path + ".alpha", "must have exactly n = " + std::to_string(n) + " entries");
        alpha.resize(static_cast<std::size_t>(n), 0);
    }
    return alpha;
}

void parse_state_vector(Validator& v, const json& obs, const std::string& key, int n,
                        std::vector<double>& out) {
    out = v.number_list(obs, "observer", key);
    if (n > 0 && static_cast<int>(out.size()) != n) {
        v.fail("observer." + key, "must have exactly n = " + std::to_string(n) + " entries");
        out.assign(static_cast<std::size_t>(n), 0.0);
        return;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(std::abs(out[i]) < 1.0)) {
            v.fail("observer." + key + "[" + std::to_string(i) + "]",
                   "must lie strictly inside (-1, 1)");
        }
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config root must be a JSON object");

    Validator v;
    ExperimentConfig cfg;
    v.check_keys(root, "", {"system", "output", "observer", "baseline", "seed", "flags"});

    int n = 0;
    if (const json* system = v.object(root, "", "system"); system) {
        v.check_keys(*system, "system", {"name", "n", "vector_field"});
        if (system->contains("name")) {
            if (!system->at("name").is_string()) {
                v.fail("system.name", "must be a string");
            } else {
                cfg.system.name = system->at("name").get<std::string>();
            }
        }
        n = v.integer(*system, "system", "n", 0);
        if (n < 1) v.fail("system.n", "must be a positive integer");
        cfg.system.n = n;

        if (const json* field = v.array(*system, "system", "vector_field"); field) {
            if (n >= 1 && static_cast<int>(field->size()) != n) {
                v.fail("system.vector_field",
                       "F must have exactly n = " + std::to_string(n) + " components, got " +
                           std::to_string(field->size()));
            }
            for (std::size_t l = 0; l < field->size(); ++l) {
                const std::string comp_path = "system.vector_field[" + std::to_string(l) + "]";
                std::vector<VectorFieldTermConfig> terms;
                if (!(*field)[l].is_array()) {
                    v.fail(comp_path, "must be an array of {coeff, alpha} terms");
                } else {
                    for (std::size_t ti = 0; ti < (*field)[l].size(); ++ti) {
                        const json& term = (*field)[l][ti];
                        const std::string term_path = comp_path + "[" + std::to_string(ti) + "]";
                        if (!term.is_object()) {
                            v.fail(term_path, "must be an object");
                            continue;
                        }
                        v.check_keys(term, term_path, {"coeff", "alpha"});
                        VectorFieldTermConfig t;
                        t.coeff = v.number(term, term_path, "coeff", 0.0);
                        t.alpha = parse_alpha(v, term, term_path, n);
                        terms.push_back(std::move(t));
                    }
                }
                cfg.system.vector_field.push_back(std::move(terms));
            }
        }
    }

    if (const json* output = v.object(root, "", "output"); output) {
        v.check_keys(*output, "output", {"components"});
        if (const json* comps = v.array(*output, "output", "components"); comps) {
            if (comps->empty()) v.fail("output.components", "must hold at least one component");
            for (std::size_t i = 0; i < comps->size(); ++i) {
                const std::string comp_path = "output.components[" + std::to_string(i) + "]";
                std::vector<OutputTermConfig> terms;
                if (!(*comps)[i].is_array()) {
                    v.fail(comp_path, "must be an array of terms");
                } else {
                    for (std::size_t ti = 0; ti < (*comps)[i].size(); ++ti) {
                        const json& term = (*comps)[i][ti];
                        const std::string term_path = comp_path + "[" + std::to_string(ti) + "]";
                        if (!term.is_object()) {
                            v.fail(term_path, "must be an object");
                            continue;
                        }
                        OutputTermConfig t;
                        if (!term.contains("kind") || !term.at("kind").is_string()) {
                            v.fail(term_path + ".kind", "must be \"monomial\", \"cos\" or \"sin\"");
                            continue;
                        }
                        t.kind = term.at("kind").get<std::string>();
                        t.coeff = v.number(term, term_path, "coeff", 0.0);
                        if (t.kind == "monomial") {
                            v.check_keys(term, term_path, {"kind", "coeff", "alpha"});
                            t.alpha = parse_alpha(v, term, term_path, n);
                        } else if (t.kind == "cos" || t.kind == "sin") {
                            v.check_keys(term, term_path, {"kind", "coeff", "variable"});
                            t.variable = v.integer(term, term_path, "variable", 0);
                            if (t.variable < 1 || (n >= 1 && t.variable > n)) {
                                v.fail(term_path + ".variable",
                                       "must name a variable between 1 and n = " + std::to_string(n));
                            }
                        } else {
                            v.fail(term_path + ".kind", "unknown kind \"" + t.kind + "\"");
                            continue;
                        }
                        terms.push_back(std::move(t));
                    }
                }
                cfg.output.components.push_back(std::move(terms));
            }
        }
    }

    if (const json* obs = v.object(root, "", "observer"); obs) {
        v.check_keys(*obs, "observer",
                     {"degree", "beta", "targets", "x0", "xhat0", "t_end", "dt", "fit_window"});
        cfg.observer.degree = v.integer(*obs, "observer", "degree", 0);
        if (cfg.observer.degree < 1) v.fail("observer.degree", "must be >= 1");
        cfg.observer.beta = v.number(*obs, "observer", "beta", 0.0);
        if (!(cfg.observer.beta < 0.0)) v.fail("observer.beta", "must be negative");
        cfg.observer.targets = v.number_list(*obs, "observer", "targets");
        if (cfg.observer.targets.empty()) v.fail("observer.targets", "must hold at least one pole");
        parse_state_vector(v, *obs, "x0", n, cfg.observer.x0);
        parse_state_vector(v, *obs, "xhat0", n, cfg.observer.xhat0);
        cfg.observer.t_end = v.number(*obs, "observer", "t_end", 10.0, false);
        cfg.observer.dt = v.number(*obs, "observer", "dt", 1e-3, false);
        cfg.observer.fit_window = v.number(*obs, "observer", "fit_window", 0.4, false);
        if (!(cfg.observer.dt > 0.0)) v.fail("observer.dt", "must be positive");
        if (!(cfg.observer.t_end >= cfg.observer.dt)) v.fail("observer.t_end", "must be >= dt");
        if (!(cfg.observer.fit_window > 0.0 && cfg.observer.fit_window <= 1.0)) {
            v.fail("observer.fit_window", "must lie in (0, 1]");
        }
    }

    if (const json* baseline = v.object(root, "", "baseline"); baseline) {
        v.check_keys(*baseline, "baseline", {"targets"});
        cfg.baseline.targets = v.number_list(*baseline, "baseline", "targets");
        if (n >= 1 && static_cast<int>(cfg.baseline.targets.size()) != n) {
            v.fail("baseline.targets", "must hold exactly n = " + std::to_string(n) + " poles");
        }
    }

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
            v.fail("seed", "must be a nonnegative integer");
        } else {
            const auto s = root.at("seed").get<std::int64_t>();
            if (s < 0) {
                v.fail("seed", "must be a nonnegative integer");
            } else {
                cfg.seed = static_cast<std::uint64_t>(s);
            }
        }
    }

    if (root.contains("flags")) {
        if (const json* flags = v.object(root, "", "flags"); flags) {
            v.check_keys(*flags, "flags", {"skip_invariance_check", "linear_baseline"});
            for (const char* key : {"skip_invariance_check", "linear_baseline"}) {
                if (flags->contains(key) && !flags->at(key).is_boolean()) {
                    v.fail(std::string("flags.") + key, "must be a boolean");
                }
            }
            cfg.flags.skip_invariance_check = flags->value("skip_invariance_check", false);
            cfg.flags.linear_baseline = flags->value("linear_baseline", true);
        }
    }

    v.raise_if_failed();
    return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
    ordered_json root;
    root["system"]["name"] = cfg.system.name;
    root["system"]["n"] = cfg.system.n;
    ordered_json field = ordered_json::array();
    for (const auto& comp : cfg.system.vector_field) {
        ordered_json terms = ordered_json::array();
        for (const auto& t : comp) {
            terms.push_back({{"coeff", t.coeff}, {"alpha", t.alpha}});
        }
        field.push_back(std::move(terms));
    }
    root["system"]["vector_field"] = std::move(field);

    ordered_json comps = ordered_json::array();
    for (const auto& comp : cfg.output.components) {
        ordered_json terms = ordered_json::array();
        for (const auto& t : comp) {
            ordered_json term;
            term["kind"] = t.kind;
            term["coeff"] = t.coeff;
            if (t.kind == "monomial") {
                term["alpha"] = t.alpha;
            } else {
                term["variable"] = t.variable;
            }
            terms.push_back(std::move(term));
        }
        comps.push_back(std::move(terms));
    }
    root["output"]["components"] = std::move(comps);

    root["observer"]["degree"] = cfg.observer.degree;
    root["observer"]["beta"] = cfg.observer.beta;
    root["observer"]["targets"] = cfg.observer.targets;
    root["observer"]["x0"] = cfg.observer.x0;
    root["observer"]["xhat0"] = cfg.observer.xhat0;
    root["observer"]["t_end"] = cfg.observer.t_end;
    root["observer"]["dt"] = cfg.observer.dt;
    root["observer"]["fit_window"] = cfg.observer.fit_window;
    root["baseline"]["targets"] = cfg.baseline.targets;
    root["seed"] = cfg.seed;
    root["flags"]["skip_invariance_check"] = cfg.flags.skip_invariance_check;
    root["flags"]["linear_baseline"] = cfg.flags.linear_baseline;
    return root.dump(2) + "\n";
}

namespace {

ExperimentConfig experiment1_preset() {
    ExperimentConfig cfg;
    cfg.system.name = "experiment1";
    cfg.system.n = 3;
    cfg.system.vector_field = {
        {{-1.9796, {1, 0, 0}}, {1.9796, {0, 1, 1}}},
        {{-2.95, {0, 1, 0}}, {1.475, {0, 0, 2}}},
        {{-0.853, {0, 0, 1}}, {0.853, {2, 0, 0}}},
    };
    cfg.output.components = {
        {{"monomial", 1.0, {1, 0, 0}, 0}, {"monomial", 1.0, {0, 1, 0}, 0}},
        {{"cos", 1.0, {}, 1}, {"monomial", 1.0, {0, 2, 0}, 0}, {"monomial", 1.0, {0, 0, 1}, 0}},
    };
    cfg.observer.degree = 4;
    cfg.observer.beta = -2.0;
    cfg.observer.targets = {-2.0, -2.1, -2.2};
    cfg.observer.x0 = {0.45, 0.8, 0.4};
    cfg.observer.xhat0 = {0.9, 0.5, -0.67};
    cfg.observer.t_end = 10.0;
    cfg.observer.dt = 1e-3;
    cfg.observer.fit_window = 0.4;
    cfg.baseline.targets = {-2.0, -2.1, -2.2};
    cfg.seed = 1;
    return cfg;
}

ExperimentConfig lorenz_preset() {
    ExperimentConfig cfg;
    cfg.system.name = "lorenz";
    cfg.system.n = 3;
    // a = 2.75, b = 1.3, r = 0.17
    cfg.system.vector_field = {
        {{-2.75, {1, 0, 0}}, {2.75, {0, 1, 0}}},
        {{0.17, {1, 0, 0}}, {-1.0, {0, 1, 0}}, {-1.0, {1, 0, 1}}},
        {{-1.3, {0, 0, 1}}, {1.0, {1, 1, 0}}},
    };
    cfg.output.components = {
        {{"cos", 1.0, {}, 1}, {"monomial", 1.0, {0, 1, 0}, 0}},
        {{"monomial", 1.0, {1, 0, 0}, 0}, {"monomial", 1.0, {0, 0, 1}, 0}},
    };
    cfg.observer.degree = 6;
    cfg.observer.beta = -1.5;
    cfg.observer.targets = {-1.5, -1.6};
    cfg.observer.x0 = {-0.43, -0.21, 0.967};
    cfg.observer.xhat0 = {0.5, 0.2, -0.5};
    cfg.observer.t_end = 12.0;
    cfg.observer.dt = 1e-3;
    cfg.observer.fit_window = 0.4;
    cfg.baseline.targets = {-1.5, -1.6, -1.5291};
    cfg.seed = 1;
    // The Lorenz field is outside the guaranteed invariance class; the run
    // relies on the runtime polydisc monitor instead.
    cfg.flags.skip_invariance_check = true;
    return cfg;
}

}  // namespace

std::vector<std::string> preset_names() { return {"experiment1", "lorenz"}; }

ExperimentConfig preset(const std::string& name) {
    if (name == "experiment1") return experiment1_preset();
    if (name == "lorenz") return lorenz_preset();
    throw ValidationError("unknown preset \"" + name + "\"; available: experiment1, lorenz");
}

VectorField make_vector_field(const ExperimentConfig& cfg) {
    const int n = cfg.system.n;
    if (static_cast<int>(cfg.system.vector_field.size()) != n) {
        throw ValidationError("vector field must have exactly n components");
    }
    std::vector<TaylorPoly> comps;
    for (const auto& terms : cfg.system.vector_field) {
        int degree = 1;
        for (const auto& t : terms) {
            int td = 0;
            for (int e : t.alpha) td += e;
            degree = std::max(degree, td);
        }
        TaylorPoly p(n, degree);
        for (const auto& t : terms) {
            p.add_term(MultiIndex(t.alpha), Complex(t.coeff, 0.0));
        }
        comps.push_back(std::move(p));
    }
    return VectorField(std::move(comps));
}

OutputMap make_output_map(const ExperimentConfig& cfg) {
    const int n = cfg.system.n;
    std::vector<std::vector<OutputTerm>> comps;
    for (const auto& terms : cfg.output.components) {
        std::vector<OutputTerm> out;
        for (const auto& t : terms) {
            OutputTerm term;
            term.coeff = t.coeff;
            if (t.kind == "monomial") {
                term.kind = OutputTerm::Kind::Monomial;
                term.alpha = MultiIndex(t.alpha);
            } else {
                term.kind = t.kind == "cos" ? OutputTerm::Kind::Cos : OutputTerm::Kind::Sin;
                term.variable = t.variable - 1;
            }
            out.push_back(std::move(term));
        }
        comps.push_back(std::move(out));
    }
    return OutputMap(n, std::move(comps));
}

}  // namespace koopman

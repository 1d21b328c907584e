#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koopman/output_map.hpp"
#include "koopman/vector_field.hpp"

namespace koopman {

struct VectorFieldTermConfig {
    double coeff = 0.0;
    std::vector<int> alpha;
    bool operator==(const VectorFieldTermConfig&) const = default;
};

struct OutputTermConfig {
    std::string kind;  // "monomial" | "cos" | "sin"
    double coeff = 0.0;
    std::vector<int> alpha;  // monomial only
    int variable = 0;        // cos/sin only, 1-based
    bool operator==(const OutputTermConfig&) const = default;
};

struct ExperimentConfig {
    struct System {
        std::string name;
        int n = 0;
        std::vector<std::vector<VectorFieldTermConfig>> vector_field;
        bool operator==(const System&) const = default;
    } system;

    struct Output {
        std::vector<std::vector<OutputTermConfig>> components;
        bool operator==(const Output&) const = default;
    } output;

    struct Observer {
        int degree = 0;
        double beta = 0.0;
        std::vector<double> targets;
        std::vector<double> x0;
        std::vector<double> xhat0;
        double t_end = 10.0;
        double dt = 1e-3;
        double fit_window = 0.4;
        bool operator==(const Observer&) const = default;
    } observer;

    struct Baseline {
        std::vector<double> targets;
        bool operator==(const Baseline&) const = default;
    } baseline;

    std::uint64_t seed = 1;

    struct Flags {
        bool skip_invariance_check = false;
        // Baseline observer model: the linear observer built on the
        // linearized dynamics (default), or the nonlinear copy with the
        // same linearized gain when false.
        bool linear_baseline = true;
        bool operator==(const Flags&) const = default;
    } flags;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a JSON config document. Collects every validation
/// problem (with its field path) before failing, rather than stopping at
/// the first one.
ExperimentConfig parse_config(const std::string& text);

/// Serialization that round-trips through parse_config.
std::string emit_config(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

VectorField make_vector_field(const ExperimentConfig& config);
OutputMap make_output_map(const ExperimentConfig& config);

}  // namespace koopman

#pragma once

#include <stdexcept>
#include <string>

namespace koopman {

/// Pipeline stage of a failure; values double as CLI exit codes.
enum class Stage {
    Validation = 2,
    Assumption = 3,
    Synthesis = 4,
    Simulation = 5,
};

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& message)
        : std::runtime_error(message), stage_(stage) {}

    Stage stage() const { return stage_; }
    int exit_code() const { return static_cast<int>(stage_); }

private:
    Stage stage_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error(Stage::Validation, message) {}
};

class AssumptionError : public Error {
public:
    explicit AssumptionError(const std::string& message) : Error(Stage::Assumption, message) {}
};

class SynthesisError : public Error {
public:
    explicit SynthesisError(const std::string& message) : Error(Stage::Synthesis, message) {}
};

class SimulationError : public Error {
public:
    explicit SimulationError(const std::string& message) : Error(Stage::Simulation, message) {}
};

}  // namespace koopman

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "koopman/config.hpp"
#include "koopman/observer_design.hpp"
#include "koopman/output_map.hpp"
#include "koopman/vector_field.hpp"

namespace koopman {

struct PlantModel {
    VectorField f;
    OutputMap h;
    Eigen::VectorXd x0;
};

struct PlantTrajectory {
    double dt = 0.0;
    std::vector<Eigen::VectorXd> x;
    std::vector<Eigen::VectorXd> y;
};

/// Classical fixed-step RK4 on the plant; outputs are evaluated exactly.
/// Aborts if the trajectory leaves the open polydisc or turns non-finite.
PlantTrajectory integrate_plant(const PlantModel& plant, double dt, double t_end);

struct ObserverTrajectory {
    std::vector<Eigen::VectorXd> xhat;
    double max_imag = 0.0;
};

/// RK4 on the forced linear observer system. Output samples must share the
/// plant grid; stage midpoints interpolate linearly between samples. The
/// initial condition is given in basis-position order.
ObserverTrajectory integrate_observer(const ObserverRealization& r,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const Eigen::VectorXcd& f0_by_position, double dt);

/// Baseline observer: nonlinear copy with a constant linearized gain,
/// xhat' = F(xhat) + L (h(xhat) - y(t)).
std::vector<Eigen::VectorXd> integrate_baseline(const VectorField& f, const OutputMap& h,
                                                const Eigen::MatrixXd& gain,
                                                const Eigen::VectorXd& xhat0,
                                                const std::vector<Eigen::VectorXd>& y, double dt);

/// Fully linear variant (config flag only): xhat' = J xhat + L (h(0) + J_h xhat - y).
std::vector<Eigen::VectorXd> integrate_linear_baseline(const Eigen::MatrixXd& jacobian,
                                                       const Eigen::MatrixXd& output_jacobian,
                                                       const Eigen::VectorXd& h0,
                                                       const Eigen::MatrixXd& gain,
                                                       const Eigen::VectorXd& xhat0,
                                                       const std::vector<Eigen::VectorXd>& y,
                                                       double dt);

struct RateFit {
    double gamma = 0.0;
    double residual = 0.0;
    bool underflowed = false;  // error series was zero on the window; gamma = -inf
};

/// Least-squares slope of log err(t) over the last window_fraction of the
/// horizon; trailing nonpositive samples are trimmed from the right.
RateFit fit_rate(const std::vector<double>& err, double dt, double window_fraction);

struct ExperimentResult {
    int n = 0, m = 0, d = 0, n_d = 0, n_beta = 0;
    double beta = 0.0, dt = 0.0, t_end = 0.0;
    std::vector<std::string> warnings;

    NonresonanceReport nonresonance;
    InvarianceReport invariance;
    CriteriaReport criteria;

    std::vector<MultiIndex> basis;
    std::vector<Complex> lattice;
    Eigen::MatrixXd psi_products_abs;  // m x N_d, |<h_i, psi_alpha>|
    double min_lattice_gap = 0.0, biortho_error = 0.0, residual_v = 0.0, residual_w = 0.0;

    std::vector<Complex> koopman_targets, koopman_achieved;
    std::vector<Complex> baseline_targets, baseline_achieved;

    std::vector<double> t;
    std::vector<Eigen::VectorXd> x, y, xhat_koopman, xhat_baseline;
    std::vector<double> err_koopman, err_baseline;
    RateFit rate_koopman, rate_baseline;
    std::vector<RateFit> rate_koopman_components, rate_baseline_components;
    double max_imag_residue = 0.0;
};

/// Full pipeline: validate assumptions, build the generator, decompose,
/// partition, check criteria, place both gains, simulate plant and both
/// observers, fit rates.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Same pipeline up to the criteria check; no gains, no simulation.
ExperimentResult check_experiment(const ExperimentConfig& config);

}  // namespace koopman

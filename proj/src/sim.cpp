#include "koopman/sim.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/linalg.hpp"

namespace koopman {

namespace {

constexpr double kNonresonanceTol = 1e-6;
constexpr double kCriteriaTol = 1e-8;

void require_inside_polydisc(const Eigen::VectorXd& x, double t) {
    if (!x.allFinite()) {
        throw SimulationError("plant state turned non-finite at t = " + std::to_string(t));
    }
    for (int i = 0; i < x.size(); ++i) {
        if (!(std::abs(x(i)) < 1.0)) {
            std::ostringstream os;
            os << "plant trajectory left the open polydisc at t = " << t << " (|x_" << i + 1
               << "| = " << std::abs(x(i)) << "); forward invariance is violated";
            throw SimulationError(os.str());
        }
    }
}

int step_count(double dt, double t_end) {
    if (!(dt > 0.0)) throw std::invalid_argument("require dt > 0");
    if (!(t_end >= dt)) throw std::invalid_argument("require t_end >= dt");
    return static_cast<int>(std::llround(t_end / dt));
}

}  // namespace

PlantTrajectory integrate_plant(const PlantModel& plant, double dt, double t_end) {
    const int steps = step_count(dt, t_end);
    PlantTrajectory traj;
    traj.dt = dt;
    traj.x.reserve(static_cast<std::size_t>(steps) + 1);
    traj.y.reserve(static_cast<std::size_t>(steps) + 1);

    Eigen::VectorXd x = plant.x0;
    require_inside_polydisc(x, 0.0);
    for (int k = 0; k <= steps; ++k) {
        traj.x.push_back(x);
        traj.y.push_back(plant.h.evaluate(x));
        if (k == steps) break;
        const Eigen::VectorXd k1 = plant.f.evaluate(x);
        const Eigen::VectorXd k2 = plant.f.evaluate(Eigen::VectorXd(x + 0.5 * dt * k1));
        const Eigen::VectorXd k3 = plant.f.evaluate(Eigen::VectorXd(x + 0.5 * dt * k2));
        const Eigen::VectorXd k4 = plant.f.evaluate(Eigen::VectorXd(x + dt * k3));
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        require_inside_polydisc(x, (k + 1) * dt);
    }
    return traj;
}

ObserverTrajectory integrate_observer(const ObserverRealization& r,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const Eigen::VectorXcd& f0_by_position, double dt) {
    if (y.size() < 2) throw std::invalid_argument("integrate_observer: need at least two output samples");
    if (f0_by_position.size() != r.state_size()) {
        throw std::invalid_argument("integrate_observer: initial condition has the wrong size");
    }
    const int n_beta = static_cast<int>(r.a_plus.size());
    const int n_minus = static_cast<int>(r.a_minus.size());

    // g' = diag(a) g + (L+ inj; 0) with inj = C+ g+ + C- g- - (y - h0):
    // the system matrix is diagonal plus a rank-m coupling, applied as such.
    auto derivative = [&](const Eigen::VectorXcd& g, const Eigen::VectorXd& y_t) {
        Eigen::VectorXcd dg(n_beta + n_minus);
        const Eigen::VectorXcd inj = r.c_plus * g.head(n_beta) + r.c_minus * g.tail(n_minus) -
                                     (y_t - r.h0).cast<Complex>();
        dg.head(n_beta) = r.a_plus.cwiseProduct(g.head(n_beta)) + r.l_plus * inj;
        dg.tail(n_minus) = r.a_minus.cwiseProduct(g.tail(n_minus));
        return dg;
    };

    ObserverTrajectory traj;
    traj.xhat.reserve(y.size());
    Eigen::VectorXcd g = r.to_state_layout(f0_by_position);
    for (std::size_t k = 0; k < y.size(); ++k) {
        const StateRecovery rec = recover_state(r.from_state_layout(g), r);
        traj.max_imag = std::max(traj.max_imag, rec.max_imag);
        traj.xhat.push_back(rec.x);
        if (k + 1 == y.size()) break;
        const Eigen::VectorXd y_mid = 0.5 * (y[k] + y[k + 1]);
        const Eigen::VectorXcd k1 = derivative(g, y[k]);
        const Eigen::VectorXcd k2 = derivative(Eigen::VectorXcd(g + 0.5 * dt * k1), y_mid);
        const Eigen::VectorXcd k3 = derivative(Eigen::VectorXcd(g + 0.5 * dt * k2), y_mid);
        const Eigen::VectorXcd k4 = derivative(Eigen::VectorXcd(g + dt * k3), y[k + 1]);
        g += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!g.allFinite()) {
            throw SimulationError("observer state turned non-finite at t = " +
                                  std::to_string((k + 1) * dt));
        }
    }
    return traj;
}

std::vector<Eigen::VectorXd> integrate_baseline(const VectorField& f, const OutputMap& h,
                                                const Eigen::MatrixXd& gain,
                                                const Eigen::VectorXd& xhat0,
                                                const std::vector<Eigen::VectorXd>& y, double dt) {
    if (y.size() < 2) throw std::invalid_argument("integrate_baseline: need at least two output samples");
    auto derivative = [&](const Eigen::VectorXd& xh, const Eigen::VectorXd& y_t) {
        return Eigen::VectorXd(f.evaluate(xh) + gain * (h.evaluate(xh) - y_t));
    };
    std::vector<Eigen::VectorXd> xhat;
    xhat.reserve(y.size());
    Eigen::VectorXd x = xhat0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        xhat.push_back(x);
        if (k + 1 == y.size()) break;
        const Eigen::VectorXd y_mid = 0.5 * (y[k] + y[k + 1]);
        const Eigen::VectorXd k1 = derivative(x, y[k]);
        const Eigen::VectorXd k2 = derivative(Eigen::VectorXd(x + 0.5 * dt * k1), y_mid);
        const Eigen::VectorXd k3 = derivative(Eigen::VectorXd(x + 0.5 * dt * k2), y_mid);
        const Eigen::VectorXd k4 = derivative(Eigen::VectorXd(x + dt * k3), y[k + 1]);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            throw SimulationError("baseline observer state turned non-finite at t = " +
                                  std::to_string((k + 1) * dt));
        }
    }
    return xhat;
}

std::vector<Eigen::VectorXd> integrate_linear_baseline(const Eigen::MatrixXd& jacobian,
                                                       const Eigen::MatrixXd& output_jacobian,
                                                       const Eigen::VectorXd& h0,
                                                       const Eigen::MatrixXd& gain,
                                                       const Eigen::VectorXd& xhat0,
                                                       const std::vector<Eigen::VectorXd>& y,
                                                       double dt) {
    if (y.size() < 2) throw std::invalid_argument("integrate_linear_baseline: need at least two output samples");
    auto derivative = [&](const Eigen::VectorXd& xh, const Eigen::VectorXd& y_t) {
        return Eigen::VectorXd(jacobian * xh + gain * (h0 + output_jacobian * xh - y_t));
    };
    std::vector<Eigen::VectorXd> xhat;
    xhat.reserve(y.size());
    Eigen::VectorXd x = xhat0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        xhat.push_back(x);
        if (k + 1 == y.size()) break;
        const Eigen::VectorXd y_mid = 0.5 * (y[k] + y[k + 1]);
        const Eigen::VectorXd k1 = derivative(x, y[k]);
        const Eigen::VectorXd k2 = derivative(Eigen::VectorXd(x + 0.5 * dt * k1), y_mid);
        const Eigen::VectorXd k3 = derivative(Eigen::VectorXd(x + 0.5 * dt * k2), y_mid);
        const Eigen::VectorXd k4 = derivative(Eigen::VectorXd(x + dt * k3), y[k + 1]);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            throw SimulationError("linear baseline state turned non-finite at t = " +
                                  std::to_string((k + 1) * dt));
        }
    }
    return xhat;
}

RateFit fit_rate(const std::vector<double>& err, double dt, double window_fraction) {
    if (err.size() < 2) throw std::invalid_argument("fit_rate: need at least two samples");
    if (!(window_fraction > 0.0) || window_fraction > 1.0) {
        throw std::invalid_argument("fit_rate: window fraction must lie in (0, 1]");
    }
    const int last = static_cast<int>(err.size()) - 1;
    const int start = last - static_cast<int>(std::floor(window_fraction * last));

    // Trim nonpositive samples from the right (underflowed tails).
    int right = start - 1;
    for (int k = start; k <= last; ++k) {
        if (!(err[static_cast<std::size_t>(k)] > 0.0)) break;
        right = k;
    }
    if (right < start) {
        RateFit fit;
        fit.gamma = -std::numeric_limits<double>::infinity();
        fit.underflowed = true;
        return fit;
    }
    const int count = right - start + 1;
    if (count < 10) {
        throw SimulationError("fit_rate: fewer than 10 positive samples remain in the fit window");
    }

    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (int k = start; k <= right; ++k) {
        const double t = k * dt;
        const double l = std::log(err[static_cast<std::size_t>(k)]);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    const double denom = count * stt - st * st;
    RateFit fit;
    fit.gamma = (count * stl - st * sl) / denom;
    const double intercept = (sl - fit.gamma * st) / count;
    double ss = 0.0;
    for (int k = start; k <= right; ++k) {
        const double t = k * dt;
        const double dev = std::log(err[static_cast<std::size_t>(k)]) - (intercept + fit.gamma * t);
        ss += dev * dev;
    }
    fit.residual = std::sqrt(ss / count);
    return fit;
}

namespace {

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        const std::string message = "[" + name + "] " + e.what();
        switch (e.stage()) {
            case Stage::Validation: throw ValidationError(message);
            case Stage::Assumption: throw AssumptionError(message);
            case Stage::Synthesis: throw SynthesisError(message);
            case Stage::Simulation: throw SimulationError(message);
        }
        throw;
    }
}

int invariance_grid_resolution(int n) {
    if (n <= 3) return 64;
    if (n == 4) return 16;
    return 8;
}

struct PipelineState {
    VectorField f;
    OutputMap h;
    EquilibriumSpectrum spectrum;
    BasisOrdering ordering;
    SpectralDecomposition decomposition;
    ModePartition modes;
};

// Assumption checks, generator, decomposition, partition, criteria: the part
// shared by `run` and `check`.
PipelineState analyze(const ExperimentConfig& config, ExperimentResult& res) {
    const int d = config.observer.degree;

    VectorField f = run_stage("vector-field", [&] { return make_vector_field(config); });
    OutputMap h = run_stage("output-map", [&] { return make_output_map(config); });
    res.n = f.dimension();
    res.m = h.size();
    res.d = d;
    res.beta = config.observer.beta;
    res.dt = config.observer.dt;
    res.t_end = config.observer.t_end;

    EquilibriumSpectrum spectrum = run_stage("assumptions", [&] { return equilibrium_spectrum(f); });

    res.nonresonance = check_nonresonance(spectrum, d, kNonresonanceTol);
    if (!res.nonresonance.passed) {
        const ResonanceHit& hit = res.nonresonance.hits.front();
        std::ostringstream os;
        os << "[assumptions] eigenvalues are resonant: lambda_" << hit.j + 1 << " = "
           << spectrum.eigenvalues(hit.j) << " matches the combination m = " << hit.m.to_string()
           << " within " << hit.gap;
        throw AssumptionError(os.str());
    }

    if (config.flags.skip_invariance_check) {
        res.invariance.skipped = true;
        res.invariance.note = "forward-invariance check skipped by config flag; "
                              "relying on runtime polydisc monitoring";
        res.warnings.push_back(res.invariance.note);
    } else if (auto form = extract_class_form(f)) {
        res.invariance = run_stage("assumptions", [&] {
            return check_forward_invariance(form->u, invariance_grid_resolution(f.dimension()));
        });
        if (!res.invariance.passed) {
            std::ostringstream os;
            os << "[assumptions] forward-invariance bound violated: max |u_i| on interior shells = {";
            for (std::size_t i = 0; i < res.invariance.max_abs_strict.size(); ++i) {
                os << (i ? ", " : "") << res.invariance.max_abs_strict[i];
            }
            os << "}, required < 1";
            throw AssumptionError(os.str());
        }
    } else {
        res.invariance.skipped = true;
        res.invariance.note = "vector field is not in the product form F_i = -a_i (z_i - u_i); "
                              "forward invariance unchecked, relying on runtime polydisc monitoring";
        res.warnings.push_back(res.invariance.note);
    }

    if (f.degree() > d) {
        res.warnings.push_back("Taylor coefficients of F above degree d do not enter the "
                               "truncated generator and are ignored");
    }

    BasisOrdering ordering = enumerate_basis(f.dimension(), d);
    res.n_d = ordering.size();
    GeneratorMatrix gen = run_stage("generator", [&] { return build_generator(f, ordering); });
    SpectralDecomposition dec = run_stage("spectral", [&] { return decompose(gen, spectrum); });
    res.basis = ordering.indices();
    res.lattice = dec.lattice;
    res.min_lattice_gap = dec.min_lattice_gap;
    res.biortho_error = dec.biortho_error;
    res.residual_v = dec.residual_v;
    res.residual_w = dec.residual_w;

    ModePartition modes = run_stage("spectral", [&] { return partition(dec, config.observer.beta); });
    res.n_beta = modes.n_beta;

    std::vector<TaylorPoly> h_taylor;
    for (int i = 0; i < h.size(); ++i) h_taylor.push_back(h.taylor(i, d));
    res.criteria = check_observability_criteria(h_taylor, dec, modes, kCriteriaTol);

    res.psi_products_abs.resize(h.size(), ordering.size());
    for (int i = 0; i < h.size(); ++i) {
        for (int p = 0; p < ordering.size(); ++p) {
            res.psi_products_abs(i, p) = std::abs(inner_with_psi(h_taylor[static_cast<std::size_t>(i)], dec, p));
        }
    }

    return PipelineState{std::move(f), std::move(h), std::move(spectrum),
                         std::move(ordering), std::move(dec), std::move(modes)};
}

std::vector<Complex> to_complex(const std::vector<double>& values) {
    std::vector<Complex> out;
    out.reserve(values.size());
    for (double v : values) out.emplace_back(v, 0.0);
    return out;
}

}  // namespace

ExperimentResult check_experiment(const ExperimentConfig& config) {
    ExperimentResult res;
    analyze(config, res);
    return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult res;
    PipelineState state = analyze(config, res);

    if (!res.criteria.convergence) {
        std::ostringstream os;
        os << "[criteria] observer-convergence condition fails: psi";
        for (int pos : res.criteria.failing_convergence) {
            os << " " << state.ordering.index_at(pos).to_string();
        }
        os << " (all output inner products below " << kCriteriaTol << ")";
        throw SynthesisError(os.str());
    }

    if (static_cast<int>(config.observer.targets.size()) != state.modes.n_beta) {
        throw ValidationError("[synthesis] observer.targets must hold exactly N_beta = " +
                              std::to_string(state.modes.n_beta) + " poles, got " +
                              std::to_string(config.observer.targets.size()));
    }
    for (double target : config.observer.targets) {
        if (target > config.observer.beta + 1e-12) {
            throw ValidationError("[synthesis] target pole " + std::to_string(target) +
                                  " is less stable than beta = " + std::to_string(config.observer.beta));
        }
    }
    if (static_cast<int>(config.baseline.targets.size()) != state.f.dimension()) {
        throw ValidationError("[synthesis] baseline.targets must hold exactly n = " +
                              std::to_string(state.f.dimension()) + " poles");
    }

    res.koopman_targets = to_complex(config.observer.targets);
    res.baseline_targets = to_complex(config.baseline.targets);

    // Koopman gain on the beta-unstable diagonal block.
    Eigen::VectorXcd a_plus(state.modes.n_beta);
    for (int j = 0; j < state.modes.n_beta; ++j) {
        a_plus(j) = std::conj(
            state.decomposition.lattice[static_cast<std::size_t>(state.modes.i_plus[static_cast<std::size_t>(j)])]);
    }
    auto [c_plus, c_minus] = build_output_matrices(state.h, state.decomposition, state.modes);
    SplitMix64 koopman_rng(config.seed);
    PolePlacement kp = run_stage("synthesis", [&] {
        return place_poles(a_plus, c_plus, res.koopman_targets, koopman_rng);
    });
    for (const std::string& w : kp.warnings) res.warnings.push_back("koopman placement: " + w);
    res.koopman_achieved = kp.achieved;
    ObserverRealization observer = run_stage("synthesis", [&] {
        return assemble_observer(state.decomposition, state.modes, state.h, kp.gain, kp.achieved);
    });

    // Baseline gain from the linearized pair (J, J_h).
    SplitMix64 baseline_rng(config.seed + 0x517cc1b727220a95ULL);
    RealPlacement bp = run_stage("synthesis", [&] {
        return place_output_injection(state.f.jacobian0(), state.h.jacobian0(), res.baseline_targets,
                                      baseline_rng);
    });
    for (const std::string& w : bp.warnings) res.warnings.push_back("baseline placement: " + w);
    res.baseline_achieved = bp.achieved;

    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(config.observer.x0.data(),
                                                           static_cast<int>(config.observer.x0.size()));
    Eigen::VectorXd xhat0 = Eigen::Map<const Eigen::VectorXd>(config.observer.xhat0.data(),
                                                              static_cast<int>(config.observer.xhat0.size()));

    const double dt = config.observer.dt;
    PlantTrajectory plant = run_stage("simulation", [&] {
        return integrate_plant(PlantModel{state.f, state.h, x0}, dt, config.observer.t_end);
    });

    Eigen::VectorXcd f0 = run_stage("simulation", [&] { return lift_initial(xhat0, state.decomposition); });
    ObserverTrajectory koopman = run_stage("simulation", [&] {
        return integrate_observer(observer, plant.y, f0, dt);
    });
    res.max_imag_residue = koopman.max_imag;
    if (koopman.max_imag > 1e-8) {
        res.warnings.push_back("recovered state has imaginary residue " +
                               std::to_string(koopman.max_imag) +
                               " above 1e-8; check conjugate-pair bookkeeping");
    }

    std::vector<Eigen::VectorXd> baseline = run_stage("simulation", [&] {
        if (config.flags.linear_baseline) {
            return integrate_linear_baseline(state.f.jacobian0(), state.h.jacobian0(),
                                             state.h.constant_term(), bp.gain, xhat0, plant.y, dt);
        }
        return integrate_baseline(state.f, state.h, bp.gain, xhat0, plant.y, dt);
    });

    const std::size_t samples = plant.x.size();
    res.t.resize(samples);
    res.err_koopman.resize(samples);
    res.err_baseline.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        res.t[k] = static_cast<double>(k) * dt;
        res.err_koopman[k] = (koopman.xhat[k] - plant.x[k]).norm();
        res.err_baseline[k] = (baseline[k] - plant.x[k]).norm();
    }
    res.x = std::move(plant.x);
    res.y = std::move(plant.y);
    res.xhat_koopman = std::move(koopman.xhat);
    res.xhat_baseline = std::move(baseline);

    res.rate_koopman = run_stage("simulation", [&] {
        return fit_rate(res.err_koopman, dt, config.observer.fit_window);
    });
    res.rate_baseline = run_stage("simulation", [&] {
        return fit_rate(res.err_baseline, dt, config.observer.fit_window);
    });

    // Per-component rates, diagnostics only: a component may cross zero on
    // the window, in which case its fit is reported as underflowed.
    auto component_rates = [&](const std::vector<Eigen::VectorXd>& xhat) {
        std::vector<RateFit> rates;
        for (int i = 0; i < res.n; ++i) {
            std::vector<double> err(samples);
            for (std::size_t k = 0; k < samples; ++k) err[k] = std::abs(xhat[k](i) - res.x[k](i));
            try {
                rates.push_back(fit_rate(err, dt, config.observer.fit_window));
            } catch (const Error&) {
                RateFit failed;
                failed.underflowed = true;
                failed.gamma = -std::numeric_limits<double>::infinity();
                rates.push_back(failed);
            }
        }
        return rates;
    };
    res.rate_koopman_components = component_rates(res.xhat_koopman);
    res.rate_baseline_components = component_rates(res.xhat_baseline);
    return res;
}

}  // namespace koopman

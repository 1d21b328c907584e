#include "koopman/observer_design.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "koopman/errors.hpp"
#include "koopman/linalg.hpp"

namespace koopman {

namespace {

constexpr double kPlacementTol = 1e-8;
constexpr int kPlacementAttempts = 8;

bool conjugation_closed(const std::vector<Complex>& values, double tol) {
    for (const Complex& v : values) {
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& w : values) best = std::min(best, std::abs(std::conj(v) - w));
        if (best > tol) return false;
    }
    return true;
}

std::string spectrum_to_string(const std::vector<Complex>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) os << ", ";
        os << values[i];
    }
    return os.str();
}

}  // namespace

PolePlacement place_poles(const Eigen::VectorXcd& a, const Eigen::MatrixXcd& c,
                          const std::vector<Complex>& targets, SplitMix64& rng) {
    const int size = static_cast<int>(a.size());
    const int m = static_cast<int>(c.rows());
    if (c.cols() != size) throw std::invalid_argument("place_poles: C has the wrong number of columns");
    if (static_cast<int>(targets.size()) != size) {
        throw SynthesisError("place_poles: need exactly " + std::to_string(size) + " target poles, got " +
                             std::to_string(targets.size()));
    }

    PolePlacement result;
    const double a_scale = size > 0 ? std::max(1.0, a.cwiseAbs().maxCoeff()) : 1.0;
    for (int i = 0; i < size; ++i) {
        for (int j = i + 1; j < size; ++j) {
            if (std::abs(a(i) - a(j)) < 1e-12 * a_scale) {
                std::ostringstream os;
                os << "place_poles: diagonal entries " << a(i) << " and " << a(j) << " coincide";
                throw SynthesisError(os.str());
            }
            if (std::abs(targets[static_cast<std::size_t>(i)] - targets[static_cast<std::size_t>(j)]) == 0.0) {
                throw SynthesisError("place_poles: target poles must be distinct");
            }
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (std::abs(targets[i] - targets[j]) < 0.05) {
                std::ostringstream os;
                os << "targets " << targets[i] << " and " << targets[j]
                   << " are closer than 0.05; placement may be ill-conditioned";
                result.warnings.push_back(os.str());
            }
        }
    }

    // PBH test for the diagonal pair: every diagonal entry needs a nonzero
    // column in C.
    for (int i = 0; i < size; ++i) {
        if (c.col(i).cwiseAbs().maxCoeff() == 0.0) {
            std::ostringstream os;
            os << "PBH test failed: eigenvalue " << a(i)
               << " is unobservable (column " << i + 1 << " of C is zero)";
            throw SynthesisError(os.str());
        }
    }

    const bool real_data = a.imag().cwiseAbs().maxCoeff() == 0.0 &&
                           c.imag().cwiseAbs().maxCoeff() == 0.0 &&
                           conjugation_closed(targets, 1e-12);

    // Conjugate pairing of the targets, so that parameter draws can respect
    // the symmetry and the resulting gain realifies.
    std::vector<int> conj_partner(targets.size(), -1);
    for (std::size_t j = 0; j < targets.size(); ++j) {
        if (std::abs(targets[j].imag()) < 1e-14) continue;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            if (k != j && std::abs(std::conj(targets[j]) - targets[k]) < 1e-12) {
                conj_partner[j] = static_cast<int>(k);
                break;
            }
        }
    }

    // Eigenvector-parametric placement: for each target t_j pick an m-vector
    // w_j, giving the closed-loop left eigenvector v_j of A + L C through
    // v_j(i) = (C^T w_j)(i) / (t_j - a_i); then L^T = [w] [v]^{-1}. Among the
    // seeded draws, keep the best-conditioned eigenvector basis.
    Eigen::MatrixXcd best_gain;
    std::vector<Complex> best_achieved;
    double best_cond = std::numeric_limits<double>::infinity();
    std::vector<Complex> last_achieved;
    const Eigen::MatrixXcd ct = c.transpose();
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
        Eigen::MatrixXcd params(m, size);  // columns w_j
        for (int j = 0; j < size; ++j) {
            if (conj_partner[static_cast<std::size_t>(j)] >= 0 &&
                conj_partner[static_cast<std::size_t>(j)] < j) {
                params.col(j) = params.col(conj_partner[static_cast<std::size_t>(j)]).conjugate();
                continue;
            }
            // Real parameter draws keep the construction equivariant under
            // the conjugation symmetry of paired modes, so real (or
            // conjugation-closed) targets yield gains that preserve real
            // recovered states.
            for (int i = 0; i < m; ++i) {
                params(i, j) = Complex(rng.uniform(-1.0, 1.0), 0.0);
            }
        }

        Eigen::MatrixXcd vectors(size, size);
        bool degenerate = false;
        for (int j = 0; j < size; ++j) {
            const Complex t = targets[static_cast<std::size_t>(j)];
            int coincident = -1;
            for (int i = 0; i < size; ++i) {
                if (std::abs(t - a(i)) < 1e-10 * a_scale) {
                    coincident = i;
                    break;
                }
            }
            if (coincident >= 0) {
                // The target keeps an open-loop eigenvalue: its eigenvector
                // stays the coordinate axis and the parameter is zero.
                vectors.col(j) = Eigen::VectorXcd::Unit(size, coincident);
                params.col(j).setZero();
                continue;
            }
            Eigen::VectorXcd bw = ct * params.col(j);
            for (int i = 0; i < size; ++i) bw(i) /= t - a(i);
            const double norm = bw.norm();
            if (norm < 1e-14) {
                degenerate = true;
                break;
            }
            vectors.col(j) = bw / norm;
            params.col(j) /= norm;
        }
        if (degenerate) continue;

        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smin = svd.singularValues()(size - 1);
        if (smin < 1e-12) continue;
        const double cond = svd.singularValues()(0) / smin;

        Eigen::MatrixXcd gain =
            vectors.transpose().partialPivLu().solve(params.transpose());  // L = (W V^{-1})^T
        if (real_data) gain = gain.real().cast<Complex>();

        Eigen::MatrixXcd closed = gain * c;
        closed.diagonal() += a;
        last_achieved = dense_eigenvalues(closed);
        if (multiset_distance(last_achieved, targets) <= kPlacementTol && cond < best_cond) {
            best_cond = cond;
            best_gain = std::move(gain);
            best_achieved = std::move(last_achieved);
        }
    }

    if (best_achieved.empty()) {
        throw SynthesisError("place_poles: placement verification failed after " +
                             std::to_string(kPlacementAttempts) + " attempts; achieved spectrum {" +
                             spectrum_to_string(last_achieved) + "} vs targets {" +
                             spectrum_to_string(targets) + "}");
    }
    result.gain = std::move(best_gain);
    result.achieved = std::move(best_achieved);
    return result;
}

RealPlacement place_output_injection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                                     const std::vector<Complex>& targets, SplitMix64& rng) {
    const int size = static_cast<int>(a.rows());
    if (a.cols() != size || c.cols() != size) {
        throw std::invalid_argument("place_output_injection: dimension mismatch");
    }
    if (!conjugation_closed(targets, 1e-12)) {
        throw SynthesisError("place_output_injection: real placement requires conjugation-closed targets");
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
    if (solver.info() != Eigen::Success) {
        throw SynthesisError("place_output_injection: eigensolver failed");
    }
    const Eigen::VectorXcd lambda = solver.eigenvalues();
    const Eigen::MatrixXcd s = solver.eigenvectors();

    PolePlacement inner = place_poles(lambda, c.cast<Complex>() * s, targets, rng);

    Eigen::MatrixXcd gain_c = s * inner.gain;
    const double imag_max = gain_c.imag().cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, gain_c.real().cwiseAbs().maxCoeff());
    if (imag_max > 1e-8 * scale) {
        throw SynthesisError("place_output_injection: gain failed to realify (max imaginary part " +
                             std::to_string(imag_max) + ")");
    }

    RealPlacement result;
    result.gain = gain_c.real();
    result.warnings = std::move(inner.warnings);
    result.achieved = dense_eigenvalues((a + result.gain * c).cast<Complex>());
    if (multiset_distance(result.achieved, targets) > kPlacementTol) {
        throw SynthesisError("place_output_injection: achieved spectrum {" +
                             spectrum_to_string(result.achieved) + "} does not match targets {" +
                             spectrum_to_string(targets) + "}");
    }
    return result;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_output_matrices(
    const OutputMap& h, const SpectralDecomposition& d, const ModePartition& p) {
    const int m = h.size();
    const int size = d.ordering.size();
    if (h.dimension() != d.ordering.dimension()) {
        throw std::invalid_argument("build_output_matrices: dimension mismatch");
    }

    Eigen::MatrixXcd c_plus(m, p.n_beta);
    Eigen::MatrixXcd c_minus(m, size - p.n_beta);
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXcd hvec =
            coeff_vector(h.taylor(i, d.ordering.degree()).without_constant(), d.ordering);
        for (int j = 0; j < p.n_beta; ++j) {
            c_plus(i, j) = hvec.dot(d.W.col(p.i_plus[static_cast<std::size_t>(j)]));
        }
        for (int j = 0; j < size - p.n_beta; ++j) {
            c_minus(i, j) = hvec.dot(d.W.col(p.i_minus[static_cast<std::size_t>(j)]));
        }
    }
    return {std::move(c_plus), std::move(c_minus)};
}

Eigen::VectorXcd ObserverRealization::to_state_layout(const Eigen::VectorXcd& by_position) const {
    Eigen::VectorXcd out(state_size());
    for (int s = 0; s < state_size(); ++s) out(s) = by_position(state_positions[static_cast<std::size_t>(s)]);
    return out;
}

Eigen::VectorXcd ObserverRealization::from_state_layout(const Eigen::VectorXcd& state) const {
    Eigen::VectorXcd out(state_size());
    for (int s = 0; s < state_size(); ++s) out(state_positions[static_cast<std::size_t>(s)]) = state(s);
    return out;
}

ObserverRealization assemble_observer(const SpectralDecomposition& d, const ModePartition& p,
                                      const OutputMap& h, const Eigen::MatrixXcd& l_plus,
                                      std::vector<Complex> achieved_poles) {
    const int size = d.ordering.size();
    if (l_plus.rows() != p.n_beta || l_plus.cols() != h.size()) {
        throw std::invalid_argument("assemble_observer: gain has the wrong shape");
    }

    ObserverRealization r{p,
                          Eigen::VectorXcd(p.n_beta),
                          Eigen::VectorXcd(size - p.n_beta),
                          {},
                          {},
                          l_plus,
                          d.V.adjoint(),
                          d.W.adjoint(),
                          h.constant_term(),
                          d.ordering,
                          {},
                          std::move(achieved_poles)};
    for (int j = 0; j < p.n_beta; ++j) {
        r.a_plus(j) = std::conj(d.lattice[static_cast<std::size_t>(p.i_plus[static_cast<std::size_t>(j)])]);
    }
    for (int j = 0; j < size - p.n_beta; ++j) {
        const Complex lambda = d.lattice[static_cast<std::size_t>(p.i_minus[static_cast<std::size_t>(j)])];
        if (lambda.real() > p.beta) {
            throw SynthesisError("assemble_observer: stable block holds a beta-unstable mode");
        }
        r.a_minus(j) = std::conj(lambda);
    }
    std::tie(r.c_plus, r.c_minus) = build_output_matrices(h, d, p);
    r.state_positions = p.i_plus;
    r.state_positions.insert(r.state_positions.end(), p.i_minus.begin(), p.i_minus.end());
    return r;
}

Eigen::VectorXcd lift_initial(const Eigen::VectorXd& xhat0, const SpectralDecomposition& d) {
    const int n = d.ordering.dimension();
    if (xhat0.size() != n) throw std::invalid_argument("lift_initial: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        if (!(std::abs(xhat0(i)) < 1.0)) {
            throw ValidationError("lift_initial: initial guess lies outside the open polydisc");
        }
    }
    Eigen::VectorXcd monomials(d.ordering.size());
    for (int p = 0; p < d.ordering.size(); ++p) {
        const MultiIndex& gamma = d.ordering.index_at(p);
        double value = 1.0;
        for (int i = 0; i < n; ++i) {
            for (int rep = 0; rep < gamma[i]; ++rep) value *= xhat0(i);
        }
        monomials(p) = Complex(value, 0.0);
    }
    return d.V.adjoint() * monomials;
}

StateRecovery recover_state(const Eigen::VectorXcd& fhat, const ObserverRealization& r) {
    const int n = r.ordering.dimension();
    StateRecovery rec{Eigen::VectorXd(n), 0.0};
    for (int k = 0; k < n; ++k) {
        const int pos = r.ordering.position_of(MultiIndex::unit(n, k));
        const Complex value = fhat.dot(r.recovery.col(pos));
        rec.x(k) = value.real();
        rec.max_imag = std::max(rec.max_imag, std::abs(value.imag()));
    }
    return rec;
}

Complex recover_moment(const Eigen::VectorXcd& fhat, const MultiIndex& alpha,
                       const ObserverRealization& r) {
    const int degree = alpha.degree();
    if (degree < 1 || degree > r.ordering.degree()) {
        throw std::invalid_argument("recover_moment: |alpha| must lie in [1, d]");
    }
    return fhat.dot(r.recovery.col(r.ordering.position_of(alpha)));
}

}  // namespace koopman

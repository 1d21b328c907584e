#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "koopman/output_map.hpp"
#include "koopman/rng.hpp"
#include "koopman/spectral.hpp"

namespace koopman {

struct PolePlacement {
    Eigen::MatrixXcd gain;                // N x m
    std::vector<Complex> achieved;        // closed-loop spectrum, verified
    std::vector<std::string> warnings;
};

/// Output-injection pole placement for a diagonal pair: returns L with
/// eig(diag(a) + L c) = targets. Multi-output is reduced to single-output
/// through a seeded random combination of the rows of c; the closed-loop
/// spectrum is verified before returning, so a conditioning failure can
/// never pass silently.
PolePlacement place_poles(const Eigen::VectorXcd& a, const Eigen::MatrixXcd& c,
                          const std::vector<Complex>& targets, SplitMix64& rng);

struct RealPlacement {
    Eigen::MatrixXd gain;
    std::vector<Complex> achieved;
    std::vector<std::string> warnings;
};

/// Placement for a general real pair (A, C) via diagonalization of A;
/// requires conjugation-closed targets.
RealPlacement place_output_injection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                                     const std::vector<Complex>& targets, SplitMix64& rng);

/// Output matrices over the mode partition: entry (i, j) pairs output
/// component i with the adjoint eigenfunction of mode j (i_plus order for
/// the first matrix, i_minus order for the second).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_output_matrices(
    const OutputMap& h, const SpectralDecomposition& d, const ModePartition& p);

/// The synthesized observer in adjoint-eigenfunction coordinates. The state
/// layout stacks the beta-unstable modes (i_plus order) over the stable
/// ones; `state_positions` maps state slots back to basis positions.
struct ObserverRealization {
    ModePartition partition;
    Eigen::VectorXcd a_plus;    // diag entries conj(lambda) over i_plus
    Eigen::VectorXcd a_minus;
    Eigen::MatrixXcd c_plus;    // m x N_beta
    Eigen::MatrixXcd c_minus;
    Eigen::MatrixXcd l_plus;    // N_beta x m
    Eigen::MatrixXcd init_lift;  // V^H
    Eigen::MatrixXcd recovery;   // W^H; u_alpha = recovery.col(position)
    Eigen::VectorXd h0;
    BasisOrdering ordering;
    std::vector<int> state_positions;
    std::vector<Complex> achieved_poles;

    int state_size() const { return static_cast<int>(state_positions.size()); }
    Eigen::VectorXcd to_state_layout(const Eigen::VectorXcd& by_position) const;
    Eigen::VectorXcd from_state_layout(const Eigen::VectorXcd& state) const;
};

ObserverRealization assemble_observer(const SpectralDecomposition& d, const ModePartition& p,
                                      const OutputMap& h, const Eigen::MatrixXcd& l_plus,
                                      std::vector<Complex> achieved_poles = {});

/// Coordinates of the truncated kernel k_xhat0 in the adjoint-eigenfunction
/// basis: V^H (e_gamma(xhat0))_gamma. Basis-position order.
Eigen::VectorXcd lift_initial(const Eigen::VectorXd& xhat0, const SpectralDecomposition& d);

struct StateRecovery {
    Eigen::VectorXd x;
    double max_imag = 0.0;
};

/// xhat_k = Re((fhat)^H u_(e_k)); fhat in basis-position order. The
/// imaginary residue must stay at roundoff level for real systems.
StateRecovery recover_state(const Eigen::VectorXcd& fhat, const ObserverRealization& r);

/// <e_alpha, fhat> = (fhat)^H u_alpha for any 1 <= |alpha| <= d.
Complex recover_moment(const Eigen::VectorXcd& fhat, const MultiIndex& alpha,
                       const ObserverRealization& r);

}  // namespace koopman

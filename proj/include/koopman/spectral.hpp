#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "koopman/generator.hpp"
#include "koopman/taylor.hpp"
#include "koopman/vector_field.hpp"

namespace koopman {

/// Spectral decomposition of the truncated generator. Eigenvalues are
/// assigned analytically from the lattice lambda_alpha = sum_j alpha_j
/// lambda_j; V holds monomial coefficients of the eigenfunctions phi_alpha
/// (right eigenvectors of M, unit norm), W holds coefficients of the adjoint
/// eigenfunctions psi_alpha, scaled so that W^H V = I.
struct SpectralDecomposition {
    BasisOrdering ordering;
    std::vector<Complex> lattice;  // lambda_alpha per position
    Eigen::MatrixXcd V;
    Eigen::MatrixXcd W;
    double min_lattice_gap = 0.0;
    double biortho_error = 0.0;     // max |(W^H V - I)_ij|
    double residual_v = 0.0;        // max |(M V - V Lambda)_ij|
    double residual_w = 0.0;        // max |(M^T W - W conj(Lambda))_ij|
};

SpectralDecomposition decompose(const GeneratorMatrix& m, const EquilibriumSpectrum& spec);

/// <g, psi_alpha> = W[:,alpha]^H g in coefficients; the constant term of g
/// is ignored (the zeroth mode is excluded from the basis).
Complex inner_with_psi(const TaylorPoly& g, const SpectralDecomposition& d, int position);

/// beta-unstable / beta-stable split of the truncated spectrum. i_plus is
/// ordered by descending real part (ties by basis position): this ordering
/// realizes the bijection used for the observer blocks.
struct ModePartition {
    double beta = 0.0;
    std::vector<int> i_plus;
    std::vector<int> i_minus;
    int n_beta = 0;
};

ModePartition partition(const SpectralDecomposition& d, double beta);

/// Spectral observability / detectability verdicts. `principal_products`
/// holds <h_i, psi_j> for the n principal modes; `unstable_products` the
/// same for every beta-unstable mode, in i_plus order.
struct CriteriaReport {
    double tol = 0.0;
    bool pao = false;            // every principal psi_j is seen by some h_i
    bool detectability = false;  // beta-unstable principal psi_j only
    bool convergence = false;    // every beta-unstable psi (principal or not)
    Eigen::MatrixXcd principal_products;  // m x n
    Eigen::MatrixXcd unstable_products;   // m x N_beta
    std::vector<int> failing_pao;          // positions
    std::vector<int> failing_detectability;
    std::vector<int> failing_convergence;
};

CriteriaReport check_observability_criteria(const std::vector<TaylorPoly>& h,
                                            const SpectralDecomposition& d,
                                            const ModePartition& p, double tol);

}  // namespace koopman

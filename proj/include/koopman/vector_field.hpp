#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "koopman/taylor.hpp"

namespace koopman {

/// Polynomial vector field F with F(0) = 0 and real Taylor coefficients.
class VectorField {
public:
    explicit VectorField(std::vector<TaylorPoly> components);

    int dimension() const { return static_cast<int>(components_.size()); }
    const TaylorPoly& component(int l) const { return components_[static_cast<std::size_t>(l)]; }
    const std::vector<TaylorPoly>& components() const { return components_; }

    int degree() const;
    /// J(l, i) = d F_l / d z_i at the origin.
    Eigen::MatrixXd jacobian0() const;

    Eigen::VectorXcd evaluate(const Eigen::VectorXcd& z) const;
    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

private:
    std::vector<TaylorPoly> components_;
};

/// Spectrum of the Jacobian at the origin, eigenvalues sorted by descending
/// real part. Columns of `right` are the eigenvectors s_j of J, columns of
/// `left` the eigenvectors w_j of J^T with w_j^H s_j = 1.
struct EquilibriumSpectrum {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right;
    Eigen::MatrixXcd left;
    Eigen::MatrixXd jacobian;
};

EquilibriumSpectrum equilibrium_spectrum(const VectorField& f);

struct ResonanceHit {
    int j;         // 0-based index into the eigenvalue list
    MultiIndex m;  // |m| >= 2 with lambda_j ~= sum_l m_l lambda_l
    double gap;
};

struct NonresonanceReport {
    bool passed = false;
    double margin = 0.0;  // min |lambda_j - sum m_l lambda_l| over the enumeration
    std::vector<ResonanceHit> hits;
    int degree = 0;
    double tol = 0.0;
};

/// Enumerates all m with 2 <= |m| <= d against every Jacobian eigenvalue.
NonresonanceReport check_nonresonance(const EquilibriumSpectrum& spec, int d, double tol);

/// The product form F_i = -a_i (z_i - u_i(z_hat_i)) with a_i > 0 and u_i
/// independent of z_i, when the field has it.
struct ClassForm {
    Eigen::VectorXd a;
    std::vector<TaylorPoly> u;
};

std::optional<ClassForm> extract_class_form(const VectorField& f);

struct InvarianceReport {
    bool checked = false;
    bool passed = false;
    bool skipped = false;
    std::vector<double> max_abs_closed;  // per component, includes the unit torus shell
    std::vector<double> max_abs_strict;  // interior shells only; the pass verdict
    std::string note;
};

/// Samples |u_i| on torus shells of the polydisc (radii 0.9, 0.99, 1.0,
/// grid_resolution points per angular dimension); passes iff the strict
/// interior samples stay below 1.
InvarianceReport check_forward_invariance(const std::vector<TaylorPoly>& u, int grid_resolution = 64);

}  // namespace koopman

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace koopman {

/// Eigenvalues of a dense complex matrix (standard dense solver); used for
/// cross-checks and closed-loop verification, never inside the structured
/// spectral decomposition.
std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXcd& a);

/// Max pairwise distance after sorting both multisets by (Re, Im).
/// Returns +inf on size mismatch.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

}  // namespace koopman

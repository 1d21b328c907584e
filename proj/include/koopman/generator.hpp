#pragma once

#include <vector>

#include <Eigen/Core>

#include "koopman/rng.hpp"
#include "koopman/taylor.hpp"
#include "koopman/vector_field.hpp"

namespace koopman {

/// Truncated matrix representation of the Koopman generator in the monomial
/// basis: entries(p_alpha, p_gamma) = <A_F e_gamma, e_alpha>. Block lower
/// triangular in total degree. The adjoint representation is the transpose
/// (real coefficients throughout).
struct GeneratorMatrix {
    BasisOrdering ordering;
    Eigen::MatrixXcd entries;
};

GeneratorMatrix build_generator(const VectorField& f, const BasisOrdering& ordering);

/// Complex points with |z_i| <= radius, for oracle sampling.
std::vector<Eigen::VectorXcd> sample_polydisc_points(int n, int count, double radius, SplitMix64& rng);

/// Finite-difference check of the generator against the flow: compares
/// (e_gamma(phi^delta(z)) - e_gamma(z)) / delta with the column of M for
/// every monomial whose image is not truncated. Returns the max residual.
double semigroup_oracle_check(const VectorField& f, const GeneratorMatrix& m,
                              const std::vector<Eigen::VectorXcd>& points, double delta);

}  // namespace koopman

#pragma once

#include <vector>

#include <Eigen/Core>

#include "koopman/taylor.hpp"

namespace koopman {

/// One primitive term of an output component: a monomial, or cos/sin of a
/// single variable (0-based).
struct OutputTerm {
    enum class Kind { Monomial, Cos, Sin };
    Kind kind = Kind::Monomial;
    double coeff = 0.0;
    MultiIndex alpha;       // Monomial only
    int variable = -1;      // Cos/Sin only
};

/// Output map h with m components, each a sum of primitive terms. The
/// measurement path evaluates cos/sin exactly; Taylor truncations are used
/// only for the observer matrices and h(0).
class OutputMap {
public:
    OutputMap(int dimension, std::vector<std::vector<OutputTerm>> components);

    int dimension() const { return n_; }
    int size() const { return static_cast<int>(components_.size()); }
    const std::vector<std::vector<OutputTerm>>& components() const { return components_; }

    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
    /// h(0): cos contributes its coefficient, sin contributes 0, degree-0
    /// monomials their coefficient.
    Eigen::VectorXd constant_term() const;
    /// Degree-d Taylor truncation of component i (cos x = sum (-1)^k
    /// x^(2k) / (2k)! and likewise for sin, cut at degree d).
    TaylorPoly taylor(int i, int degree) const;
    /// Jacobian of h at the origin (m x n).
    Eigen::MatrixXd jacobian0() const;

private:
    int n_ = 0;
    std::vector<std::vector<OutputTerm>> components_;
};

}  // namespace koopman

#pragma once

#include <complex>
#include <map>

#include <Eigen/Core>

#include "koopman/basis.hpp"

namespace koopman {

using Complex = std::complex<double>;

/// Truncated Taylor polynomial: a sparse map MultiIndex -> complex
/// coefficient with every stored degree <= max_degree. Unlike BasisOrdering,
/// the constant term (alpha = 0) is allowed here.
class TaylorPoly {
public:
    using TermMap = std::map<MultiIndex, Complex, MultiIndexKeyOrder>;

    TaylorPoly(int dimension, int max_degree);

    static TaylorPoly constant(int dimension, int max_degree, Complex value);
    static TaylorPoly monomial(int dimension, int max_degree, const MultiIndex& alpha,
                               Complex coeff = Complex(1.0, 0.0));

    int dimension() const { return dimension_; }
    int max_degree() const { return max_degree_; }

    /// Coefficient of e_alpha; absent keys mean 0.
    Complex coefficient(const MultiIndex& alpha) const;
    Complex constant_term() const;

    /// Accumulates coeff onto the alpha term. Throws if alpha does not fit
    /// the dimension or exceeds max_degree.
    void add_term(const MultiIndex& alpha, Complex coeff);

    const TermMap& terms() const { return terms_; }

    /// Largest stored total degree (0 for the zero polynomial).
    int degree() const;
    bool has_real_coefficients(double tol = 0.0) const;

    TaylorPoly truncated(int degree) const;
    TaylorPoly without_constant() const;

    TaylorPoly operator+(const TaylorPoly& other) const;
    TaylorPoly operator-(const TaylorPoly& other) const;
    TaylorPoly operator*(Complex scale) const;
    /// Product truncated to result_degree.
    TaylorPoly multiply(const TaylorPoly& other, int result_degree) const;

private:
    int dimension_ = 0;
    int max_degree_ = 0;
    TermMap terms_;
};

/// Direct monomial evaluation sum_alpha c_alpha z^alpha.
Complex poly_eval(const TaylorPoly& p, const Eigen::VectorXcd& z);
Complex poly_eval(const TaylorPoly& p, const Eigen::VectorXd& x);

/// Hardy-space coefficient inner product <f,g> = sum_alpha f_alpha conj(g_alpha).
Complex inner_product(const TaylorPoly& f, const TaylorPoly& g);

/// Degree-d truncation of the reproducing function k_z0: the alpha
/// coefficient is conj(z0)^alpha. Requires |z0_i| < 1 for all i.
TaylorPoly kernel_coeffs(const Eigen::VectorXcd& z0, int degree);

/// Coefficients of p over the ordering positions (constant term dropped).
Eigen::VectorXcd coeff_vector(const TaylorPoly& p, const BasisOrdering& ordering);
TaylorPoly poly_from_vector(const Eigen::VectorXcd& v, const BasisOrdering& ordering);

}  // namespace koopman

#include "koopman/taylor.hpp"

#include <cmath>
#include <stdexcept>

namespace koopman {

TaylorPoly::TaylorPoly(int dimension, int max_degree)
    : dimension_(dimension), max_degree_(max_degree) {
    if (dimension < 1) throw std::invalid_argument("TaylorPoly: require dimension >= 1");
    if (max_degree < 0) throw std::invalid_argument("TaylorPoly: require max_degree >= 0");
}

TaylorPoly TaylorPoly::constant(int dimension, int max_degree, Complex value) {
    TaylorPoly p(dimension, max_degree);
    p.add_term(MultiIndex::zero(dimension), value);
    return p;
}

TaylorPoly TaylorPoly::monomial(int dimension, int max_degree, const MultiIndex& alpha, Complex coeff) {
    TaylorPoly p(dimension, max_degree);
    p.add_term(alpha, coeff);
    return p;
}

Complex TaylorPoly::coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

Complex TaylorPoly::constant_term() const {
    return coefficient(MultiIndex::zero(dimension_));
}

void TaylorPoly::add_term(const MultiIndex& alpha, Complex coeff) {
    if (alpha.dimension() != dimension_) throw std::invalid_argument("TaylorPoly::add_term: dimension mismatch");
    if (alpha.degree() > max_degree_) throw std::invalid_argument("TaylorPoly::add_term: degree above truncation");
    auto [it, inserted] = terms_.try_emplace(alpha, coeff);
    if (!inserted) it->second += coeff;
    if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
}

int TaylorPoly::degree() const {
    int d = 0;
    for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.degree());
    return d;
}

bool TaylorPoly::has_real_coefficients(double tol) const {
    for (const auto& [alpha, c] : terms_) {
        if (std::abs(c.imag()) > tol) return false;
    }
    return true;
}

TaylorPoly TaylorPoly::truncated(int degree) const {
    TaylorPoly out(dimension_, degree);
    for (const auto& [alpha, c] : terms_) {
        if (alpha.degree() <= degree) out.add_term(alpha, c);
    }
    return out;
}

TaylorPoly TaylorPoly::without_constant() const {
    TaylorPoly out(dimension_, max_degree_);
    for (const auto& [alpha, c] : terms_) {
        if (alpha.degree() >= 1) out.add_term(alpha, c);
    }
    return out;
}

TaylorPoly TaylorPoly::operator+(const TaylorPoly& other) const {
    if (other.dimension_ != dimension_) throw std::invalid_argument("TaylorPoly: dimension mismatch");
    TaylorPoly out(dimension_, std::max(max_degree_, other.max_degree_));
    for (const auto& [alpha, c] : terms_) out.add_term(alpha, c);
    for (const auto& [alpha, c] : other.terms_) out.add_term(alpha, c);
    return out;
}

TaylorPoly TaylorPoly::operator-(const TaylorPoly& other) const {
    return *this + other * Complex(-1.0, 0.0);
}

TaylorPoly TaylorPoly::operator*(Complex scale) const {
    TaylorPoly out(dimension_, max_degree_);
    if (scale == Complex(0.0, 0.0)) return out;
    for (const auto& [alpha, c] : terms_) out.add_term(alpha, c * scale);
    return out;
}

TaylorPoly TaylorPoly::multiply(const TaylorPoly& other, int result_degree) const {
    if (other.dimension_ != dimension_) throw std::invalid_argument("TaylorPoly: dimension mismatch");
    TaylorPoly out(dimension_, result_degree);
    for (const auto& [a, ca] : terms_) {
        if (a.degree() > result_degree) continue;
        for (const auto& [b, cb] : other.terms_) {
            if (a.degree() + b.degree() > result_degree) continue;
            std::vector<int> e(static_cast<std::size_t>(dimension_));
            for (int i = 0; i < dimension_; ++i) e[static_cast<std::size_t>(i)] = a[i] + b[i];
            out.add_term(MultiIndex(std::move(e)), ca * cb);
        }
    }
    return out;
}

namespace {

Complex integer_power(Complex z, int k) {
    Complex r(1.0, 0.0);
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

}  // namespace

Complex poly_eval(const TaylorPoly& p, const Eigen::VectorXcd& z) {
    if (z.size() != p.dimension()) throw std::invalid_argument("poly_eval: dimension mismatch");
    Complex sum(0.0, 0.0);
    for (const auto& [alpha, c] : p.terms()) {
        Complex mono(1.0, 0.0);
        for (int i = 0; i < p.dimension(); ++i) {
            if (alpha[i] != 0) mono *= integer_power(z(i), alpha[i]);
        }
        sum += c * mono;
    }
    return sum;
}

Complex poly_eval(const TaylorPoly& p, const Eigen::VectorXd& x) {
    return poly_eval(p, Eigen::VectorXcd(x.cast<Complex>()));
}

Complex inner_product(const TaylorPoly& f, const TaylorPoly& g) {
    if (f.dimension() != g.dimension()) throw std::invalid_argument("inner_product: dimension mismatch");
    Complex sum(0.0, 0.0);
    for (const auto& [alpha, c] : f.terms()) {
        sum += c * std::conj(g.coefficient(alpha));
    }
    return sum;
}

namespace {

void kernel_terms(const Eigen::VectorXcd& z0_conj, std::vector<int>& alpha, int pos, int remaining,
                  Complex partial, TaylorPoly& out) {
    const int n = static_cast<int>(alpha.size());
    if (pos == n - 1) {
        alpha[static_cast<std::size_t>(pos)] = remaining;
        out.add_term(MultiIndex(alpha), partial * integer_power(z0_conj(pos), remaining));
        alpha[static_cast<std::size_t>(pos)] = 0;
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        alpha[static_cast<std::size_t>(pos)] = a;
        kernel_terms(z0_conj, alpha, pos + 1, remaining - a, partial * integer_power(z0_conj(pos), a), out);
    }
    alpha[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace

TaylorPoly kernel_coeffs(const Eigen::VectorXcd& z0, int degree) {
    const int n = static_cast<int>(z0.size());
    if (n < 1) throw std::invalid_argument("kernel_coeffs: empty point");
    for (int i = 0; i < n; ++i) {
        if (!(std::abs(z0(i)) < 1.0)) {
            throw std::domain_error("kernel_coeffs: point outside the open polydisc");
        }
    }
    TaylorPoly out(n, degree);
    Eigen::VectorXcd z0c = z0.conjugate();
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    for (int k = 0; k <= degree; ++k) {
        kernel_terms(z0c, alpha, 0, k, Complex(1.0, 0.0), out);
    }
    return out;
}

Eigen::VectorXcd coeff_vector(const TaylorPoly& p, const BasisOrdering& ordering) {
    if (p.dimension() != ordering.dimension()) throw std::invalid_argument("coeff_vector: dimension mismatch");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ordering.size());
    for (const auto& [alpha, c] : p.terms()) {
        const int k = alpha.degree();
        if (k < 1) continue;
        if (k > ordering.degree()) throw std::invalid_argument("coeff_vector: polynomial degree above ordering degree");
        v(ordering.position_of(alpha)) = c;
    }
    return v;
}

TaylorPoly poly_from_vector(const Eigen::VectorXcd& v, const BasisOrdering& ordering) {
    if (v.size() != ordering.size()) throw std::invalid_argument("poly_from_vector: size mismatch");
    TaylorPoly p(ordering.dimension(), ordering.degree());
    for (int pos = 0; pos < ordering.size(); ++pos) {
        if (v(pos) != Complex(0.0, 0.0)) p.add_term(ordering.index_at(pos), v(pos));
    }
    return p;
}

}  // namespace koopman

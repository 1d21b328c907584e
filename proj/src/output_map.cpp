#include "koopman/output_map.hpp"

#include <cmath>
#include <stdexcept>

#include "koopman/errors.hpp"

namespace koopman {

OutputMap::OutputMap(int dimension, std::vector<std::vector<OutputTerm>> components)
    : n_(dimension), components_(std::move(components)) {
    if (n_ < 1) throw ValidationError("OutputMap: require dimension >= 1");
    if (components_.empty()) throw ValidationError("OutputMap: no components");
    for (std::size_t i = 0; i < components_.size(); ++i) {
        for (const OutputTerm& t : components_[i]) {
            if (t.kind == OutputTerm::Kind::Monomial) {
                if (t.alpha.dimension() != n_) {
                    throw ValidationError("OutputMap: component " + std::to_string(i + 1) +
                                          " has a monomial of wrong dimension");
                }
            } else {
                if (t.variable < 0 || t.variable >= n_) {
                    throw ValidationError("OutputMap: component " + std::to_string(i + 1) +
                                          " has cos/sin of an out-of-range variable");
                }
            }
        }
    }
}

Eigen::VectorXd OutputMap::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("OutputMap::evaluate: dimension mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < size(); ++i) {
        for (const OutputTerm& t : components_[static_cast<std::size_t>(i)]) {
            switch (t.kind) {
                case OutputTerm::Kind::Monomial: {
                    double mono = 1.0;
                    for (int v = 0; v < n_; ++v) {
                        for (int rep = 0; rep < t.alpha[v]; ++rep) mono *= x(v);
                    }
                    y(i) += t.coeff * mono;
                    break;
                }
                case OutputTerm::Kind::Cos:
                    y(i) += t.coeff * std::cos(x(t.variable));
                    break;
                case OutputTerm::Kind::Sin:
                    y(i) += t.coeff * std::sin(x(t.variable));
                    break;
            }
        }
    }
    return y;
}

Eigen::VectorXd OutputMap::constant_term() const {
    Eigen::VectorXd h0 = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < size(); ++i) {
        for (const OutputTerm& t : components_[static_cast<std::size_t>(i)]) {
            if (t.kind == OutputTerm::Kind::Cos) {
                h0(i) += t.coeff;
            } else if (t.kind == OutputTerm::Kind::Monomial && t.alpha.degree() == 0) {
                h0(i) += t.coeff;
            }
        }
    }
    return h0;
}

TaylorPoly OutputMap::taylor(int i, int degree) const {
    if (i < 0 || i >= size()) throw std::out_of_range("OutputMap::taylor: component out of range");
    TaylorPoly p(n_, degree);
    for (const OutputTerm& t : components_[static_cast<std::size_t>(i)]) {
        switch (t.kind) {
            case OutputTerm::Kind::Monomial:
                if (t.alpha.degree() <= degree) p.add_term(t.alpha, Complex(t.coeff, 0.0));
                break;
            case OutputTerm::Kind::Cos: {
                double c = 1.0;  // (-1)^k / (2k)!
                for (int k = 0; 2 * k <= degree; ++k) {
                    if (k > 0) c /= -(2.0 * k - 1.0) * (2.0 * k);
                    std::vector<int> e(static_cast<std::size_t>(n_), 0);
                    e[static_cast<std::size_t>(t.variable)] = 2 * k;
                    p.add_term(MultiIndex(std::move(e)), Complex(t.coeff * c, 0.0));
                }
                break;
            }
            case OutputTerm::Kind::Sin: {
                double c = 1.0;  // (-1)^k / (2k+1)!
                for (int k = 0; 2 * k + 1 <= degree; ++k) {
                    if (k > 0) c /= -(2.0 * k) * (2.0 * k + 1.0);
                    std::vector<int> e(static_cast<std::size_t>(n_), 0);
                    e[static_cast<std::size_t>(t.variable)] = 2 * k + 1;
                    p.add_term(MultiIndex(std::move(e)), Complex(t.coeff * c, 0.0));
                }
                break;
            }
        }
    }
    return p;
}

Eigen::MatrixXd OutputMap::jacobian0() const {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(size(), n_);
    for (int i = 0; i < size(); ++i) {
        const TaylorPoly p = taylor(i, 1);
        for (int v = 0; v < n_; ++v) {
            j(i, v) = p.coefficient(MultiIndex::unit(n_, v)).real();
        }
    }
    return j;
}

}  // namespace koopman

#include "koopman/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "koopman/errors.hpp"

namespace koopman {

VectorField::VectorField(std::vector<TaylorPoly> components) : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("VectorField: no components");
    const int n = static_cast<int>(components_.size());
    for (int l = 0; l < n; ++l) {
        const TaylorPoly& f = components_[static_cast<std::size_t>(l)];
        if (f.dimension() != n) {
            throw ValidationError("VectorField: component " + std::to_string(l + 1) +
                                  " has dimension " + std::to_string(f.dimension()) +
                                  ", expected " + std::to_string(n));
        }
        if (f.constant_term() != Complex(0.0, 0.0)) {
            throw AssumptionError("VectorField: F_" + std::to_string(l + 1) +
                                  "(0) != 0; the origin must be an equilibrium");
        }
        if (!f.has_real_coefficients()) {
            throw ValidationError("VectorField: complex Taylor coefficients in F_" +
                                  std::to_string(l + 1) + " are not supported");
        }
    }
}

int VectorField::degree() const {
    int d = 0;
    for (const auto& f : components_) d = std::max(d, f.degree());
    return d;
}

Eigen::MatrixXd VectorField::jacobian0() const {
    const int n = dimension();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            j(l, i) = components_[static_cast<std::size_t>(l)]
                          .coefficient(MultiIndex::unit(n, i))
                          .real();
        }
    }
    return j;
}

Eigen::VectorXcd VectorField::evaluate(const Eigen::VectorXcd& z) const {
    Eigen::VectorXcd out(dimension());
    for (int l = 0; l < dimension(); ++l) {
        out(l) = poly_eval(components_[static_cast<std::size_t>(l)], z);
    }
    return out;
}

Eigen::VectorXd VectorField::evaluate(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dimension());
    for (int l = 0; l < dimension(); ++l) {
        out(l) = poly_eval(components_[static_cast<std::size_t>(l)], x).real();
    }
    return out;
}

EquilibriumSpectrum equilibrium_spectrum(const VectorField& f) {
    const int n = f.dimension();
    const Eigen::MatrixXd j = f.jacobian0();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(j, true);
    if (solver.info() != Eigen::Success) {
        throw AssumptionError("equilibrium_spectrum: eigensolver failed on the Jacobian");
    }
    Eigen::VectorXcd values = solver.eigenvalues();
    Eigen::MatrixXcd vectors = solver.eigenvectors();

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
        return values(a).imag() > values(b).imag();
    });

    EquilibriumSpectrum spec;
    spec.jacobian = j;
    spec.eigenvalues.resize(n);
    spec.right.resize(n, n);
    for (int k = 0; k < n; ++k) {
        spec.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        Eigen::VectorXcd v = vectors.col(order[static_cast<std::size_t>(k)]);
        // Deterministic phase: largest-magnitude component made real positive.
        int imax = 0;
        for (int i = 1; i < n; ++i) {
            if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
        }
        v *= std::conj(v(imax)) / std::abs(v(imax));
        v.normalize();
        spec.right.col(k) = v;
    }

    std::ostringstream bad;
    for (int k = 0; k < n; ++k) {
        if (!(spec.eigenvalues(k).real() < 0.0)) {
            bad << (bad.tellp() > 0 ? ", " : "") << spec.eigenvalues(k);
        }
    }
    if (bad.tellp() > 0) {
        throw AssumptionError("equilibrium spectrum is not stable: eigenvalue(s) " + bad.str() +
                              " have nonnegative real part");
    }
    const double scale = spec.eigenvalues.cwiseAbs().maxCoeff();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (std::abs(spec.eigenvalues(a) - spec.eigenvalues(b)) <= 1e-9 * std::max(1.0, scale)) {
                std::ostringstream os;
                os << "equilibrium spectrum is not simple: eigenvalues " << spec.eigenvalues(a)
                   << " and " << spec.eigenvalues(b) << " coincide";
                throw AssumptionError(os.str());
            }
        }
    }

    // Rows of right^-1 are w_j^H, so the columns of its adjoint are the dual
    // left eigenvectors with w_j^H s_i = delta_ij.
    spec.left = spec.right.inverse().adjoint();
    return spec;
}

NonresonanceReport check_nonresonance(const EquilibriumSpectrum& spec, int d, double tol) {
    const int n = static_cast<int>(spec.eigenvalues.size());
    NonresonanceReport report;
    report.degree = d;
    report.tol = tol;
    report.margin = std::numeric_limits<double>::infinity();
    if (d < 2) {
        report.passed = true;
        return report;
    }
    const BasisOrdering combos = enumerate_basis(n, d);
    for (const MultiIndex& m : combos.indices()) {
        if (m.degree() < 2) continue;
        Complex sum(0.0, 0.0);
        for (int l = 0; l < n; ++l) sum += static_cast<double>(m[l]) * spec.eigenvalues(l);
        for (int j = 0; j < n; ++j) {
            const double gap = std::abs(spec.eigenvalues(j) - sum);
            report.margin = std::min(report.margin, gap);
            if (gap < tol) report.hits.push_back(ResonanceHit{j, m, gap});
        }
    }
    report.passed = report.hits.empty();
    return report;
}

std::optional<ClassForm> extract_class_form(const VectorField& f) {
    const int n = f.dimension();
    ClassForm form;
    form.a.resize(n);
    for (int i = 0; i < n; ++i) {
        const TaylorPoly& fi = f.component(i);
        const double a = -fi.coefficient(MultiIndex::unit(n, i)).real();
        if (!(a > 0.0)) return std::nullopt;
        form.a(i) = a;
        // u_i = F_i / a_i + z_i must not involve z_i.
        TaylorPoly u = fi * Complex(1.0 / a, 0.0) +
                       TaylorPoly::monomial(n, fi.max_degree(), MultiIndex::unit(n, i));
        for (const auto& [alpha, c] : u.terms()) {
            if (alpha[i] > 0) return std::nullopt;
        }
        form.u.push_back(std::move(u));
    }
    return form;
}

InvarianceReport check_forward_invariance(const std::vector<TaylorPoly>& u, int grid_resolution) {
    if (u.empty()) throw std::invalid_argument("check_forward_invariance: empty input");
    if (grid_resolution < 1) throw std::invalid_argument("check_forward_invariance: bad grid resolution");
    const int n = static_cast<int>(u.size());
    for (int i = 0; i < n; ++i) {
        if (u[static_cast<std::size_t>(i)].dimension() != n) {
            throw std::invalid_argument("check_forward_invariance: u_" + std::to_string(i + 1) +
                                        " has the wrong dimension");
        }
        for (const auto& [alpha, c] : u[static_cast<std::size_t>(i)].terms()) {
            if (alpha[i] > 0) {
                throw std::invalid_argument("check_forward_invariance: u_" + std::to_string(i + 1) +
                                            " depends on its own variable z_" + std::to_string(i + 1));
            }
        }
    }

    static constexpr double kShells[] = {0.9, 0.99, 1.0};
    InvarianceReport report;
    report.checked = true;
    report.max_abs_closed.assign(static_cast<std::size_t>(n), 0.0);
    report.max_abs_strict.assign(static_cast<std::size_t>(n), 0.0);

    const double step = 2.0 * M_PI / grid_resolution;
    for (int i = 0; i < n; ++i) {
        std::vector<int> vars;
        for (int jv = 0; jv < n; ++jv) {
            if (jv != i) vars.push_back(jv);
        }
        const int dims = static_cast<int>(vars.size());
        for (double r : kShells) {
            std::vector<int> ticks(static_cast<std::size_t>(dims), 0);
            bool done = false;
            while (!done) {
                Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
                for (int kdim = 0; kdim < dims; ++kdim) {
                    const double theta = step * ticks[static_cast<std::size_t>(kdim)];
                    z(vars[static_cast<std::size_t>(kdim)]) =
                        Complex(r * std::cos(theta), r * std::sin(theta));
                }
                const double value = std::abs(poly_eval(u[static_cast<std::size_t>(i)], z));
                report.max_abs_closed[static_cast<std::size_t>(i)] =
                    std::max(report.max_abs_closed[static_cast<std::size_t>(i)], value);
                if (r < 1.0) {
                    report.max_abs_strict[static_cast<std::size_t>(i)] =
                        std::max(report.max_abs_strict[static_cast<std::size_t>(i)], value);
                }
                // Odometer over the angular grid.
                done = true;
                for (int kdim = 0; kdim < dims; ++kdim) {
                    if (++ticks[static_cast<std::size_t>(kdim)] < grid_resolution) {
                        done = false;
                        break;
                    }
                    ticks[static_cast<std::size_t>(kdim)] = 0;
                }
                if (dims == 0) done = true;
            }
        }
    }

    report.passed = true;
    for (int i = 0; i < n; ++i) {
        if (!(report.max_abs_strict[static_cast<std::size_t>(i)] < 1.0)) report.passed = false;
    }
    return report;
}

}  // namespace koopman

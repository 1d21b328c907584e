#include "koopman/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "koopman/errors.hpp"

namespace koopman {

GeneratorMatrix build_generator(const VectorField& f, const BasisOrdering& ordering) {
    const int n = f.dimension();
    if (n != ordering.dimension()) throw std::invalid_argument("build_generator: dimension mismatch");
    const int d = ordering.degree();
    const int size = ordering.size();

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
    // Column gamma holds the coefficients of A_F e_gamma = sum_l gamma_l
    // z^(gamma - e_l) F_l, truncated to degree d.
    for (int col = 0; col < size; ++col) {
        const MultiIndex& gamma = ordering.index_at(col);
        for (int l = 0; l < n; ++l) {
            if (gamma[l] == 0) continue;
            for (const auto& [delta, c] : f.component(l).terms()) {
                if (delta.degree() < 1) continue;
                std::vector<int> e(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = gamma[i] + delta[i];
                e[static_cast<std::size_t>(l)] -= 1;
                MultiIndex alpha(std::move(e));
                if (alpha.degree() > d) continue;
                m(ordering.position_of(alpha), col) += static_cast<double>(gamma[l]) * c;
            }
        }
    }
    return GeneratorMatrix{ordering, std::move(m)};
}

std::vector<Eigen::VectorXcd> sample_polydisc_points(int n, int count, double radius, SplitMix64& rng) {
    std::vector<Eigen::VectorXcd> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXcd z(n);
        for (int i = 0; i < n; ++i) {
            double re = 0.0;
            double im = 0.0;
            do {
                re = rng.uniform(-radius, radius);
                im = rng.uniform(-radius, radius);
            } while (re * re + im * im > radius * radius);
            z(i) = Complex(re, im);
        }
        points.push_back(std::move(z));
    }
    return points;
}

namespace {

// One flow step of z' = F(z) over a complex state: 8 RK4 substeps, so the
// integration error is far below the first-order difference-quotient error.
Eigen::VectorXcd flow_step(const VectorField& f, const Eigen::VectorXcd& z0, double delta) {
    const int substeps = 8;
    const double h = delta / substeps;
    Eigen::VectorXcd z = z0;
    for (int s = 0; s < substeps; ++s) {
        const Eigen::VectorXcd k1 = f.evaluate(z);
        const Eigen::VectorXcd k2 = f.evaluate(Eigen::VectorXcd(z + 0.5 * h * k1));
        const Eigen::VectorXcd k3 = f.evaluate(Eigen::VectorXcd(z + 0.5 * h * k2));
        const Eigen::VectorXcd k4 = f.evaluate(Eigen::VectorXcd(z + h * k3));
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!z.allFinite()) {
            throw SimulationError("semigroup_oracle_check: integrator step diverged");
        }
    }
    return z;
}

}  // namespace

double semigroup_oracle_check(const VectorField& f, const GeneratorMatrix& m,
                              const std::vector<Eigen::VectorXcd>& points, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("semigroup_oracle_check: require delta > 0");
    const BasisOrdering& ordering = m.ordering;
    const int max_gamma_degree = std::max(1, ordering.degree() - f.degree() + 1);

    double worst = 0.0;
    for (const Eigen::VectorXcd& z : points) {
        for (int i = 0; i < z.size(); ++i) {
            if (!(std::abs(z(i)) < 1.0)) {
                throw std::invalid_argument("semigroup_oracle_check: sample point outside the polydisc");
            }
        }
        const Eigen::VectorXcd z_delta = flow_step(f, z, delta);
        for (int col = 0; col < ordering.size(); ++col) {
            const MultiIndex& gamma = ordering.index_at(col);
            if (gamma.degree() > max_gamma_degree) continue;
            const TaylorPoly e_gamma = TaylorPoly::monomial(ordering.dimension(), ordering.degree(), gamma);
            const Complex quotient = (poly_eval(e_gamma, z_delta) - poly_eval(e_gamma, z)) / delta;
            const TaylorPoly column = poly_from_vector(m.entries.col(col), ordering);
            const double residual = std::abs(quotient - poly_eval(column, z));
            worst = std::max(worst, residual);
        }
    }
    return worst;
}

}  // namespace koopman

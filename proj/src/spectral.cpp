#include "koopman/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "koopman/errors.hpp"

namespace koopman {

namespace {

// gamma! = prod_i gamma_i!
double multi_factorial(const MultiIndex& gamma) {
    double f = 1.0;
    for (int i = 0; i < gamma.dimension(); ++i) {
        for (int v = 2; v <= gamma[i]; ++v) f *= v;
    }
    return f;
}

// Coefficient vector, over the degree-|alpha| block, of the homogeneous
// polynomial prod_j (c_j^H z)^(alpha_j).
Eigen::VectorXcd product_seed(const MultiIndex& alpha, const Eigen::MatrixXcd& columns,
                              const BasisOrdering& ordering) {
    const int n = ordering.dimension();
    const int k = alpha.degree();
    TaylorPoly p = TaylorPoly::constant(n, k, Complex(1.0, 0.0));
    for (int j = 0; j < n; ++j) {
        if (alpha[j] == 0) continue;
        TaylorPoly linear(n, 1);
        for (int i = 0; i < n; ++i) {
            const Complex c = std::conj(columns(i, j));
            if (c != Complex(0.0, 0.0)) linear.add_term(MultiIndex::unit(n, i), c);
        }
        for (int rep = 0; rep < alpha[j]; ++rep) p = p.multiply(linear, k);
    }
    const int start = ordering.degree_block_start(k);
    const int size = ordering.degree_block_size(k);
    Eigen::VectorXcd seed(size);
    for (int s = 0; s < size; ++s) {
        seed(s) = p.coefficient(ordering.index_at(start + s));
    }
    return seed;
}

}  // namespace

SpectralDecomposition decompose(const GeneratorMatrix& m, const EquilibriumSpectrum& spec) {
    const BasisOrdering& ordering = m.ordering;
    const int n = ordering.dimension();
    const int d = ordering.degree();
    const int size = ordering.size();
    if (static_cast<int>(spec.eigenvalues.size()) != n) {
        throw std::invalid_argument("decompose: spectrum dimension mismatch");
    }

    SpectralDecomposition out{ordering, {}, Eigen::MatrixXcd::Zero(size, size),
                              Eigen::MatrixXcd::Zero(size, size)};
    out.lattice.resize(static_cast<std::size_t>(size));
    for (int p = 0; p < size; ++p) {
        const MultiIndex& alpha = ordering.index_at(p);
        Complex lambda(0.0, 0.0);
        for (int j = 0; j < n; ++j) lambda += static_cast<double>(alpha[j]) * spec.eigenvalues(j);
        out.lattice[static_cast<std::size_t>(p)] = lambda;
    }

    // Distinctness of the truncated lattice is what makes the triangular
    // back-substitution and the biorthonormal scaling well posed.
    out.min_lattice_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < size; ++a) {
        for (int b = a + 1; b < size; ++b) {
            out.min_lattice_gap = std::min(
                out.min_lattice_gap,
                std::abs(out.lattice[static_cast<std::size_t>(a)] - out.lattice[static_cast<std::size_t>(b)]));
        }
    }
    const double m_norm = m.entries.cwiseAbs().maxCoeff();
    const double gap_floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, m_norm);
    if (out.min_lattice_gap < gap_floor) {
        std::ostringstream os;
        os << "decompose: eigenvalue lattice gap " << out.min_lattice_gap
           << " is below the conditioning floor " << gap_floor
           << "; eigenvectors would be ill-conditioned";
        throw SynthesisError(os.str());
    }

    // V column by column: zero below the seed degree, the degree-|alpha|
    // block from the principal-eigenfunction product, higher blocks by
    // forward substitution through (M - lambda I).
    for (int p = 0; p < size; ++p) {
        const MultiIndex& alpha = ordering.index_at(p);
        const int k0 = alpha.degree();
        const Complex lambda = out.lattice[static_cast<std::size_t>(p)];
        Eigen::VectorXcd column = Eigen::VectorXcd::Zero(size);
        column.segment(ordering.degree_block_start(k0), ordering.degree_block_size(k0)) =
            product_seed(alpha, spec.left, ordering);
        for (int k = k0 + 1; k <= d; ++k) {
            const int rk = ordering.degree_block_start(k);
            const int sk = ordering.degree_block_size(k);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sk);
            for (int j = k0; j < k; ++j) {
                const int cj = ordering.degree_block_start(j);
                const int sj = ordering.degree_block_size(j);
                rhs -= m.entries.block(rk, cj, sk, sj) * column.segment(cj, sj);
            }
            Eigen::MatrixXcd block = m.entries.block(rk, rk, sk, sk);
            block.diagonal().array() -= lambda;
            column.segment(rk, sk) = block.partialPivLu().solve(rhs);
        }
        out.V.col(p) = column / column.norm();
    }

    // W likewise from M^T (block upper triangular), eigenvalue conj(lambda):
    // the adjoint eigenfunction psi_alpha. The seed uses the right
    // eigenvectors of the Jacobian with multinomial weights gamma!.
    for (int p = 0; p < size; ++p) {
        const MultiIndex& alpha = ordering.index_at(p);
        const int k0 = alpha.degree();
        const Complex mu = std::conj(out.lattice[static_cast<std::size_t>(p)]);
        Eigen::VectorXcd column = Eigen::VectorXcd::Zero(size);
        const int start0 = ordering.degree_block_start(k0);
        const int size0 = ordering.degree_block_size(k0);
        Eigen::VectorXcd seed = product_seed(alpha, spec.right, ordering);
        for (int s = 0; s < size0; ++s) {
            seed(s) *= multi_factorial(ordering.index_at(start0 + s));
        }
        column.segment(start0, size0) = seed;
        for (int k = k0 - 1; k >= 1; --k) {
            const int rk = ordering.degree_block_start(k);
            const int sk = ordering.degree_block_size(k);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sk);
            for (int j = k + 1; j <= k0; ++j) {
                const int cj = ordering.degree_block_start(j);
                const int sj = ordering.degree_block_size(j);
                // (M^T) block at (row degree k, column degree j).
                rhs -= m.entries.block(cj, rk, sj, sk).transpose() * column.segment(cj, sj);
            }
            Eigen::MatrixXcd block = m.entries.block(rk, rk, sk, sk).transpose();
            block.diagonal().array() -= mu;
            column.segment(rk, sk) = block.partialPivLu().solve(rhs);
        }
        const Complex pairing = column.dot(out.V.col(p));  // w^H v
        if (std::abs(pairing) < 1e-12 * column.norm()) {
            throw SynthesisError("decompose: <phi, psi> ~ 0 for " + alpha.to_string() +
                                 "; biorthonormal rescaling is singular");
        }
        out.W.col(p) = column / std::conj(pairing);
    }

    Eigen::MatrixXcd gram = out.W.adjoint() * out.V;
    gram.diagonal().array() -= Complex(1.0, 0.0);
    out.biortho_error = gram.cwiseAbs().maxCoeff();

    Eigen::MatrixXcd rv = m.entries * out.V;
    Eigen::MatrixXcd rw = m.entries.transpose() * out.W;
    for (int p = 0; p < size; ++p) {
        rv.col(p) -= out.lattice[static_cast<std::size_t>(p)] * out.V.col(p);
        rw.col(p) -= std::conj(out.lattice[static_cast<std::size_t>(p)]) * out.W.col(p);
    }
    out.residual_v = rv.cwiseAbs().maxCoeff();
    out.residual_w = rw.cwiseAbs().maxCoeff();
    return out;
}

Complex inner_with_psi(const TaylorPoly& g, const SpectralDecomposition& d, int position) {
    if (position < 0 || position >= d.ordering.size()) {
        throw std::out_of_range("inner_with_psi: position out of range");
    }
    const Eigen::VectorXcd gvec = coeff_vector(g.without_constant(), d.ordering);
    return d.W.col(position).dot(gvec);  // W[:,p]^H g
}

ModePartition partition(const SpectralDecomposition& d, double beta) {
    if (!(beta < 0.0)) throw std::invalid_argument("partition: require beta < 0");
    const int size = d.ordering.size();
    for (int p = 0; p < size; ++p) {
        if (std::abs(d.lattice[static_cast<std::size_t>(p)].real() - beta) < 1e-9) {
            std::ostringstream os;
            os << "partition: beta = " << beta << " lies on the spectral boundary (Re lambda_"
               << d.ordering.index_at(p).to_string() << " = "
               << d.lattice[static_cast<std::size_t>(p)].real() << "); perturb beta";
            throw SynthesisError(os.str());
        }
    }
    ModePartition part;
    part.beta = beta;
    for (int p = 0; p < size; ++p) {
        if (d.lattice[static_cast<std::size_t>(p)].real() > beta) {
            part.i_plus.push_back(p);
        } else {
            part.i_minus.push_back(p);
        }
    }
    std::sort(part.i_plus.begin(), part.i_plus.end(), [&](int a, int b) {
        const double ra = d.lattice[static_cast<std::size_t>(a)].real();
        const double rb = d.lattice[static_cast<std::size_t>(b)].real();
        if (ra != rb) return ra > rb;
        return a < b;
    });
    part.n_beta = static_cast<int>(part.i_plus.size());
    return part;
}

CriteriaReport check_observability_criteria(const std::vector<TaylorPoly>& h,
                                            const SpectralDecomposition& d,
                                            const ModePartition& p, double tol) {
    const int n = d.ordering.dimension();
    const int m = static_cast<int>(h.size());
    if (m < 1) throw std::invalid_argument("check_observability_criteria: empty output map");

    std::vector<Eigen::VectorXcd> hvecs;
    hvecs.reserve(static_cast<std::size_t>(m));
    for (const TaylorPoly& hi : h) {
        hvecs.push_back(coeff_vector(hi.without_constant().truncated(d.ordering.degree()), d.ordering));
    }

    CriteriaReport report;
    report.tol = tol;
    report.principal_products.resize(m, n);
    report.unstable_products.resize(m, p.n_beta);

    auto column_seen = [&](const Eigen::MatrixXcd& mat, int col) {
        return mat.col(col).cwiseAbs().maxCoeff() > tol;
    };

    std::vector<int> principal_positions;
    for (int j = 0; j < n; ++j) {
        principal_positions.push_back(d.ordering.position_of(MultiIndex::unit(n, j)));
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            report.principal_products(i, j) = d.W.col(principal_positions[static_cast<std::size_t>(j)]).dot(hvecs[static_cast<std::size_t>(i)]);
        }
    }
    for (int j = 0; j < p.n_beta; ++j) {
        for (int i = 0; i < m; ++i) {
            report.unstable_products(i, j) =
                d.W.col(p.i_plus[static_cast<std::size_t>(j)]).dot(hvecs[static_cast<std::size_t>(i)]);
        }
    }

    report.pao = true;
    report.detectability = true;
    report.convergence = true;
    for (int j = 0; j < n; ++j) {
        const int pos = principal_positions[static_cast<std::size_t>(j)];
        const bool seen = column_seen(report.principal_products, j);
        if (!seen) {
            report.pao = false;
            report.failing_pao.push_back(pos);
            if (d.lattice[static_cast<std::size_t>(pos)].real() > p.beta) {
                report.detectability = false;
                report.failing_detectability.push_back(pos);
            }
        }
    }
    for (int j = 0; j < p.n_beta; ++j) {
        if (!column_seen(report.unstable_products, j)) {
            report.convergence = false;
            report.failing_convergence.push_back(p.i_plus[static_cast<std::size_t>(j)]);
        }
    }
    return report;
}

}  // namespace koopman

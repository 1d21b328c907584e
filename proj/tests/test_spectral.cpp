#include <doctest.h>

#include <cmath>

#include "koopman/config.hpp"
#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/linalg.hpp"
#include "koopman/spectral.hpp"

using namespace koopman;

namespace {

MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }

struct Built {
    VectorField f;
    BasisOrdering ordering;
    GeneratorMatrix gen;
    EquilibriumSpectrum spectrum;
    SpectralDecomposition dec;
};

Built build(const VectorField& f, int d) {
    BasisOrdering ord = enumerate_basis(f.dimension(), d);
    GeneratorMatrix gen = build_generator(f, ord);
    EquilibriumSpectrum spec = equilibrium_spectrum(f);
    SpectralDecomposition dec = decompose(gen, spec);
    return Built{f, ord, gen, spec, std::move(dec)};
}

Built experiment1(int d) { return build(make_vector_field(preset("experiment1")), d); }
Built lorenz(int d) { return build(make_vector_field(preset("lorenz")), d); }

VectorField linear_1d(double a) {
    TaylorPoly f(1, 1);
    f.add_term(mi({1}), Complex(a, 0.0));
    return VectorField({f});
}

}  // namespace

TEST_CASE("diagonal 1-d decomposition: V = W = I, lattice multiples") {
    const double a = 1.3;
    const Built b = build(linear_1d(-a), 3);
    CHECK((b.dec.V - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((b.dec.W - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
    for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(b.dec.lattice[k - 1] - Complex(-a * k, 0.0)) <= 1e-14);
    }
}

TEST_CASE("experiment 1 lattice at d = 2") {
    const Built b = experiment1(2);
    std::vector<Complex> expected = {{-0.853, 0}, {-1.9796, 0}, {-2.95, 0},
                                     {-1.706, 0}, {-2.8326, 0}, {-3.803, 0},
                                     {-3.9592, 0}, {-4.9296, 0}, {-5.9, 0}};
    std::vector<Complex> got(b.dec.lattice.begin(), b.dec.lattice.end());
    CHECK(multiset_distance(got, expected) <= 1e-12);
}

TEST_CASE("eigen-residuals and biorthonormality for both preset systems") {
    for (const Built& b : {experiment1(4), experiment1(6), lorenz(6)}) {
        const double m_norm = b.gen.entries.cwiseAbs().maxCoeff();
        CHECK(b.dec.residual_v <= 1e-10 * m_norm);
        CHECK(b.dec.residual_w <= 1e-10 * m_norm);
        CHECK(b.dec.biortho_error <= 1e-10);
    }
}

TEST_CASE("lattice matches an independent dense eigensolve") {
    for (const Built& b : {experiment1(4), lorenz(6)}) {
        const std::vector<Complex> dense = dense_eigenvalues(b.gen.entries);
        std::vector<Complex> lattice(b.dec.lattice.begin(), b.dec.lattice.end());
        CHECK(multiset_distance(lattice, dense) <= 1e-8);
    }
}

TEST_CASE("V is block lower triangular, W block upper triangular") {
    const Built b = experiment1(4);
    for (int r = 0; r < b.ordering.size(); ++r) {
        for (int c = 0; c < b.ordering.size(); ++c) {
            const int dr = b.ordering.index_at(r).degree();
            const int dc = b.ordering.index_at(c).degree();
            if (dr < dc) CHECK(std::abs(b.dec.V(r, c)) == 0.0);
            if (dr > dc) CHECK(std::abs(b.dec.W(r, c)) == 0.0);
        }
    }
}

TEST_CASE("degree-1 columns of V are eigenvectors of the degree-1 block") {
    const Built b = experiment1(4);
    // Diagonal Jacobian here, so the degree-1 eigenvector columns are the
    // coordinate axes permuted to the eigenvalue order.
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXcd col = b.dec.V.col(j).segment(0, 3);
        Eigen::VectorXcd residual = b.gen.entries.block(0, 0, 3, 3) * col - b.dec.lattice[j] * col;
        CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(col.cwiseAbs().maxCoeff() == doctest::Approx(col.norm()).epsilon(1e-12));
    }
}

TEST_CASE("inner_with_psi: biorthonormality and monomial orthogonality") {
    const Built b = experiment1(3);
    // psi reconstructed from W against phi columns.
    for (int p = 0; p < b.ordering.size(); p += 7) {
        const TaylorPoly psi = poly_from_vector(b.dec.W.col(p), b.ordering);
        const Complex self = inner_with_psi(psi, b.dec, p);
        CHECK(self.real() > 0.0);
        CHECK(std::abs(self - Complex(b.dec.W.col(p).squaredNorm(), 0.0)) <= 1e-10);
        const TaylorPoly phi_other = poly_from_vector(b.dec.V.col((p + 3) % b.ordering.size()), b.ordering);
        // <phi_gamma, psi_alpha> = 0 for gamma != alpha
        CHECK(std::abs(inner_with_psi(phi_other, b.dec, p)) <= 1e-10);
    }

    const Built lin = build(linear_1d(-1.1), 3);
    const TaylorPoly z2 = TaylorPoly::monomial(1, 3, mi({2}));
    CHECK(std::abs(inner_with_psi(z2, lin.dec, 0)) == 0.0);
}

TEST_CASE("partition at the preset betas") {
    const Built b = experiment1(4);
    const ModePartition p = partition(b.dec, -2.0);
    CHECK(p.n_beta == 3);
    REQUIRE(p.i_plus.size() == 3);
    CHECK(std::abs(b.dec.lattice[p.i_plus[0]] - Complex(-0.853, 0)) <= 1e-12);
    CHECK(std::abs(b.dec.lattice[p.i_plus[1]] - Complex(-1.706, 0)) <= 1e-12);
    CHECK(std::abs(b.dec.lattice[p.i_plus[2]] - Complex(-1.9796, 0)) <= 1e-12);
    CHECK(static_cast<int>(p.i_minus.size()) == b.ordering.size() - 3);

    const Built lz = lorenz(6);
    const ModePartition pl = partition(lz.dec, -1.5);
    CHECK(pl.n_beta == 2);
    CHECK(b.ordering.size() == 34);
    CHECK(lz.ordering.size() == 83);

    // beta below the whole truncated spectrum
    const ModePartition all = partition(b.dec, -30.0);
    CHECK(all.n_beta == b.ordering.size());
    CHECK(all.i_minus.empty());
}

TEST_CASE("partition tie guard and monotonicity") {
    const Built b = experiment1(4);
    CHECK_THROWS_AS((void)partition(b.dec, -1.9796), SynthesisError);
    CHECK_THROWS_AS((void)partition(b.dec, 0.5), std::invalid_argument);

    const ModePartition coarse = partition(b.dec, -2.0);
    const ModePartition fine = partition(b.dec, -3.1);
    for (int pos : coarse.i_plus) {
        CHECK(std::find(fine.i_plus.begin(), fine.i_plus.end(), pos) != fine.i_plus.end());
    }
}

TEST_CASE("criteria report for experiment 1 at beta = -2") {
    const Built b = experiment1(4);
    const OutputMap h = make_output_map(preset("experiment1"));
    std::vector<TaylorPoly> ht;
    for (int i = 0; i < h.size(); ++i) ht.push_back(h.taylor(i, 4));
    const ModePartition p = partition(b.dec, -2.0);
    const CriteriaReport report = check_observability_criteria(ht, b.dec, p, 1e-8);
    CHECK(report.pao);
    CHECK(report.detectability);
    CHECK(report.convergence);
    for (int j = 0; j < p.n_beta; ++j) {
        CHECK(report.unstable_products.col(j).cwiseAbs().maxCoeff() > 1e-8);
    }
}

TEST_CASE("criteria identify an unobservable mode: degree-2-only output") {
    // 1-d linear system, h = x^2: psi_(1) has no overlap, so criterion (45)
    // fails for any beta that keeps the principal mode unstable.
    const double a = 1.0;
    const Built b = build(linear_1d(-a), 3);
    const ModePartition p = partition(b.dec, -1.5);  // I_plus = {(1)}
    REQUIRE(p.n_beta == 1);
    const TaylorPoly h2 = TaylorPoly::monomial(1, 3, mi({2}));
    const CriteriaReport report = check_observability_criteria({h2}, b.dec, p, 1e-8);
    CHECK_FALSE(report.pao);
    CHECK_FALSE(report.detectability);
    CHECK_FALSE(report.convergence);
    REQUIRE(report.failing_convergence.size() == 1);
    CHECK(b.ordering.index_at(report.failing_convergence[0]) == mi({1}));

    // h = x passes trivially.
    const TaylorPoly h1 = TaylorPoly::monomial(1, 3, mi({1}));
    CHECK(check_observability_criteria({h1}, b.dec, p, 1e-8).convergence);
}

TEST_CASE("decompose refuses resonant lattices") {
    TaylorPoly f1(2, 1), f2(2, 1);
    f1.add_term(mi({1, 0}), -1.0);
    f2.add_term(mi({0, 1}), -2.0);  // lambda_2 = 2 lambda_1: lattice collision at d >= 2
    const VectorField f({f1, f2});
    const GeneratorMatrix gen = build_generator(f, enumerate_basis(2, 2));
    const EquilibriumSpectrum spec = equilibrium_spectrum(f);
    CHECK_THROWS_AS((void)decompose(gen, spec), SynthesisError);
}

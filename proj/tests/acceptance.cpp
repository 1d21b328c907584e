// Acceptance suite: runs every acceptance criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "koopman/config.hpp"
#include "koopman/errors.hpp"
#include "koopman/generator.hpp"
#include "koopman/linalg.hpp"
#include "koopman/observer_design.hpp"
#include "koopman/sim.hpp"
#include "koopman/spectral.hpp"

using namespace koopman;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

struct Decomposed {
    BasisOrdering ordering;
    GeneratorMatrix gen;
    SpectralDecomposition dec;
};

Decomposed decompose_preset(const std::string& name) {
    const ExperimentConfig cfg = preset(name);
    const VectorField f = make_vector_field(cfg);
    BasisOrdering ord = enumerate_basis(cfg.system.n, cfg.observer.degree);
    GeneratorMatrix gen = build_generator(f, ord);
    SpectralDecomposition dec = decompose(gen, equilibrium_spectrum(f));
    return Decomposed{std::move(ord), std::move(gen), std::move(dec)};
}

}  // namespace

int main() {
    // --- Criteria 1 and 3a: experiment I reproduction and structure. ---
    ExperimentResult exp1;
    double exp1_seconds = 0.0;
    try {
        const auto start = std::chrono::steady_clock::now();
        exp1 = run_experiment(preset("experiment1"));
        exp1_seconds = seconds_since(start);
        const bool rates = exp1.rate_koopman.gamma <= -1.9 &&
                           exp1.rate_baseline.gamma >= -1.85 && exp1.rate_baseline.gamma <= -1.55 &&
                           exp1.rate_koopman.gamma < exp1.rate_baseline.gamma;
        const bool runtime = exp1_seconds <= 10.0;
        report(1, rates && runtime,
               fmt("experiment I rates: gamma_K = %.4f (<= -1.9), gamma_B = %.4f (in [-1.85, -1.55]), "
                   "gamma_K < gamma_B, runtime %.2f s (<= 10 s)",
                   exp1.rate_koopman.gamma, exp1.rate_baseline.gamma, exp1_seconds));
    } catch (const std::exception& e) {
        report(1, false, std::string("experiment I failed: ") + e.what());
    }

    // --- Criteria 2 and 3b: experiment II (Lorenz). ---
    ExperimentResult lorenz;
    try {
        const auto start = std::chrono::steady_clock::now();
        lorenz = run_experiment(preset("lorenz"));
        const double secs = seconds_since(start);
        const bool rates = lorenz.rate_koopman.gamma <= -1.45 &&
                           lorenz.rate_koopman.gamma < lorenz.rate_baseline.gamma;
        const bool runtime = secs <= 30.0;
        report(2, rates && runtime,
               fmt("experiment II rates: gamma_K = %.4f (<= -1.45), gamma_B = %.4f, "
                   "gamma_K < gamma_B, runtime %.2f s (<= 30 s)",
                   lorenz.rate_koopman.gamma, lorenz.rate_baseline.gamma, secs));
    } catch (const std::exception& e) {
        report(2, false, std::string("experiment II failed: ") + e.what());
    }

    {
        const bool counts = exp1.n_beta == 3 && exp1.n_d == 34 && lorenz.n_beta == 2 && lorenz.n_d == 83;
        report(3, counts,
               fmt("structural counts: experiment I N_beta = %d (3), N_d = %d (34); "
                   "experiment II N_beta = %d (2), N_d = %d (83)",
                   exp1.n_beta, exp1.n_d, lorenz.n_beta, lorenz.n_d));
    }

    // --- Criterion 4: spectrum lattice vs an independent dense eigensolve. ---
    try {
        const Decomposed d1 = decompose_preset("experiment1");
        const Complex l1(-0.853, 0.0), l2(-1.9796, 0.0), l3(-2.95, 0.0);
        std::vector<Complex> expected;
        for (const MultiIndex& alpha : d1.ordering.indices()) {
            expected.push_back(double(alpha[0]) * l1 + double(alpha[1]) * l2 + double(alpha[2]) * l3);
        }
        std::vector<Complex> assigned(d1.dec.lattice.begin(), d1.dec.lattice.end());
        const double lattice_err = multiset_distance(assigned, expected);
        const double dense_err = multiset_distance(assigned, dense_eigenvalues(d1.gen.entries));
        report(4, lattice_err <= 1e-12 && dense_err <= 1e-8,
               fmt("spectrum lattice: analytic-vs-spec distance %.2e, dense-eigensolve distance %.2e "
                   "(<= 1e-8)",
                   lattice_err, dense_err));
    } catch (const std::exception& e) {
        report(4, false, std::string("lattice check failed: ") + e.what());
    }

    // --- Criterion 5: biorthonormality and eigen-residuals. ---
    try {
        bool ok = true;
        std::string detail = "biorthonormality/residuals:";
        for (const std::string& name : preset_names()) {
            const Decomposed d = decompose_preset(name);
            const double m_norm = d.gen.entries.cwiseAbs().maxCoeff();
            const bool this_ok = d.dec.biortho_error <= 1e-10 &&
                                 d.dec.residual_v <= 1e-10 * m_norm &&
                                 d.dec.residual_w <= 1e-10 * m_norm;
            ok = ok && this_ok;
            detail += fmt(" %s |W^H V - I| = %.1e, res_V = %.1e, res_W = %.1e;", name.c_str(),
                          d.dec.biortho_error, d.dec.residual_v, d.dec.residual_w);
        }
        report(5, ok, detail);
    } catch (const std::exception& e) {
        report(5, false, std::string("decomposition failed: ") + e.what());
    }

    // --- Criterion 6: pole placement soundness. ---
    try {
        bool ok = true;
        double worst = 0.0;
        worst = std::max(worst, multiset_distance(exp1.koopman_achieved, exp1.koopman_targets));
        worst = std::max(worst, multiset_distance(exp1.baseline_achieved, exp1.baseline_targets));
        worst = std::max(worst, multiset_distance(lorenz.koopman_achieved, lorenz.koopman_targets));
        worst = std::max(worst, multiset_distance(lorenz.baseline_achieved, lorenz.baseline_targets));
        ok = worst <= 1e-8;

        SplitMix64 rng(20240901);
        int rejected = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const int size = 2 + static_cast<int>(rng.next() % 5);
            const int m = 1 + static_cast<int>(rng.next() % 3);
            Eigen::VectorXcd a(size);
            for (int i = 0; i < size; ++i) a(i) = Complex(-0.4 - 0.9 * i - 0.2 * rng.uniform(), 0.0);
            Eigen::MatrixXcd c(m, size);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < size; ++j) c(i, j) = Complex(rng.uniform(-2.0, 2.0), 0.0);
            const bool plant_zero = trial % 2 == 1;
            if (plant_zero) c.col(static_cast<int>(rng.next() % size)).setZero();
            // Targets are modest stable shifts of the open-loop values;
            // their pairwise gaps stay >= 0.4 by construction.
            std::vector<Complex> targets;
            for (int i = 0; i < size; ++i) {
                targets.emplace_back(a(i).real() - 0.3 - 0.3 * rng.uniform(), 0.0);
            }
            if (plant_zero) {
                try {
                    (void)place_poles(a, c, targets, rng);
                    ok = false;  // silently mis-placed an unobservable pair
                } catch (const SynthesisError&) {
                    ++rejected;
                }
            } else {
                const PolePlacement p = place_poles(a, c, targets, rng);
                worst = std::max(worst, multiset_distance(p.achieved, targets));
                ok = ok && worst <= 1e-8;
            }
        }
        report(6, ok && worst <= 1e-8,
               fmt("pole placement: worst achieved-vs-target distance %.2e (<= 1e-8) over both "
                   "experiments + 100 randomized instances; %d planted PBH failures all rejected",
                   worst, rejected));
    } catch (const std::exception& e) {
        report(6, false, std::string("placement check failed: ") + e.what());
    }

    // --- Criterion 7: semigroup finite-difference oracle. ---
    try {
        const ExperimentConfig cfg = preset("experiment1");
        const VectorField f = make_vector_field(cfg);
        const BasisOrdering ord = enumerate_basis(3, 4);
        const GeneratorMatrix gen = build_generator(f, ord);
        SplitMix64 rng(42);
        const auto points = sample_polydisc_points(3, 10, 0.7, rng);
        // columns up to degree 3 = d - deg(F) + 1 are untruncated
        const double residual = semigroup_oracle_check(f, gen, points, 1e-6);
        report(7, residual <= 1e-4,
               fmt("generator oracle: max finite-difference residual %.2e (<= 1e-4) at delta = 1e-6, "
                   "10 interior points, monomials up to degree 3",
                   residual));
    } catch (const std::exception& e) {
        report(7, false, std::string("generator oracle failed: ") + e.what());
    }

    // --- Criterion 8: zero-initial-error tracking under the frozen ceiling. ---
    try {
        ExperimentConfig cfg = preset("experiment1");
        cfg.observer.xhat0 = cfg.observer.x0;
        const ExperimentResult res = run_experiment(cfg);
        double worst = 0.0;
        for (std::size_t k = 0; k < res.t.size(); ++k) {
            worst = std::max(worst, (res.xhat_koopman[k] - res.x[k]).cwiseAbs().maxCoeff());
        }
        report(8, worst <= 4e-3,
               fmt("zero-initial-error tracking: max |xhat_K - x|_inf = %.3e (<= 4e-3, calibrated "
                   "truncation ceiling at d = 4)",
                   worst));
    } catch (const std::exception& e) {
        report(8, false, std::string("zero-error run failed: ") + e.what());
    }

    // --- Criterion 9: reproducing property of the kernel coefficients. ---
    try {
        SplitMix64 rng(777);
        double worst_rel = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = 1 + static_cast<int>(rng.next() % 3);
            const int d = 2 + static_cast<int>(rng.next() % 4);
            const BasisOrdering ord = enumerate_basis(n, d);
            TaylorPoly p(n, d);
            p.add_term(MultiIndex::zero(n), Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
            for (const MultiIndex& alpha : ord.indices()) {
                p.add_term(alpha, Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
            }
            Eigen::VectorXcd z0(n);
            for (int i = 0; i < n; ++i) {
                z0(i) = Complex(rng.uniform(-0.65, 0.65), rng.uniform(-0.65, 0.65));
            }
            const Complex lhs = inner_product(p, kernel_coeffs(z0, d));
            const Complex rhs = poly_eval(p, z0);
            worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        report(9, worst_rel <= 1e-12,
               fmt("reproducing property: worst relative error %.2e (<= 1e-12) over 1000 random "
                   "(p, z0) pairs",
                   worst_rel));
    } catch (const std::exception& e) {
        report(9, false, std::string("reproducing check failed: ") + e.what());
    }

    // --- Criterion 10: observer-convergence criterion and counterexample. ---
    try {
        const bool positive = exp1.criteria.convergence &&
                              exp1.criteria.unstable_products.cols() == 3 &&
                              [&] {
                                  for (int j = 0; j < 3; ++j) {
                                      if (exp1.criteria.unstable_products.col(j).cwiseAbs().maxCoeff() <=
                                          1e-8) {
                                          return false;
                                      }
                                  }
                                  return true;
                              }();

        // 1-d system with a degree-2-only output: psi_(1) is missed.
        TaylorPoly f1(1, 1);
        f1.add_term(MultiIndex({std::vector<int>{1}}), Complex(-1.0, 0.0));
        const VectorField f({f1});
        const BasisOrdering ord = enumerate_basis(1, 3);
        const SpectralDecomposition dec = decompose(build_generator(f, ord), equilibrium_spectrum(f));
        const ModePartition modes = partition(dec, -1.5);
        const TaylorPoly h2 = TaylorPoly::monomial(1, 3, MultiIndex(std::vector<int>{2}));
        const CriteriaReport counter = check_observability_criteria({h2}, dec, modes, 1e-8);
        const bool negative = !counter.convergence && counter.failing_convergence.size() == 1 &&
                              ord.index_at(counter.failing_convergence[0]) ==
                                  MultiIndex(std::vector<int>{1});
        report(10, positive && negative,
               fmt("criteria: experiment I satisfies the convergence condition at beta = -2 "
                   "(all |<h_i, psi>| > 1e-8); degree-2-only counterexample fails it on psi_(1)"));
    } catch (const std::exception& e) {
        report(10, false, std::string("criteria check failed: ") + e.what());
    }

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}

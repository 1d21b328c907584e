#include "koopman/linalg.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Eigenvalues>

namespace koopman {

std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXcd& a) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) out.push_back(solver.eigenvalues()(i));
    return out;
}

double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    auto by_re_im = [](const std::complex<double>& x, const std::complex<double>& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    std::sort(a.begin(), a.end(), by_re_im);
    std::sort(b.begin(), b.end(), by_re_im);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace koopman

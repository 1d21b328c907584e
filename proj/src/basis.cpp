#include "koopman/basis.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace koopman {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    for (int e : exponents_) {
        if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    }
}

MultiIndex MultiIndex::zero(int dimension) {
    return MultiIndex(std::vector<int>(static_cast<std::size_t>(dimension), 0));
}

MultiIndex MultiIndex::unit(int dimension, int axis) {
    if (axis < 0 || axis >= dimension) throw std::invalid_argument("MultiIndex::unit: axis out of range");
    std::vector<int> e(static_cast<std::size_t>(dimension), 0);
    e[static_cast<std::size_t>(axis)] = 1;
    return MultiIndex(std::move(e));
}

int MultiIndex::degree() const {
    return std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        if (i > 0) os << ",";
        os << exponents_[i];
    }
    os << ")";
    return os.str();
}

bool basis_order_before(const MultiIndex& a, const MultiIndex& b) {
    if (a.dimension() != b.dimension()) {
        throw std::invalid_argument("basis_order_before: dimension mismatch");
    }
    const int da = a.degree();
    const int db = b.degree();
    if (da != db) return da < db;
    for (int i = 0; i < a.dimension(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

std::int64_t basis_size(int n, int d) {
    if (n < 1 || d < 1) throw std::invalid_argument("basis_size: require n >= 1 and d >= 1");
    // C(n + d, d) - 1 without overflow for desk-scale n, d.
    std::int64_t c = 1;
    for (int i = 1; i <= d; ++i) {
        c = c * (n + i) / i;
    }
    return c - 1;
}

namespace {

// Appends all alpha with the given remaining degree spread over positions
// [pos, n), first component largest first. This emits each degree block in
// exactly the basis order.
void emit_compositions(std::vector<int>& alpha, int pos, int remaining,
                       std::vector<MultiIndex>& out) {
    const int n = static_cast<int>(alpha.size());
    if (pos == n - 1) {
        alpha[static_cast<std::size_t>(pos)] = remaining;
        out.emplace_back(alpha);
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        alpha[static_cast<std::size_t>(pos)] = a;
        emit_compositions(alpha, pos + 1, remaining - a, out);
    }
    alpha[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace

BasisOrdering::BasisOrdering(int n, int d, std::vector<MultiIndex> indices)
    : n_(n), d_(d), indices_(std::move(indices)) {
    position_.clear();
    block_start_.assign(static_cast<std::size_t>(d_) + 2, 0);
    int prev_degree = 0;
    for (int p = 0; p < static_cast<int>(indices_.size()); ++p) {
        const MultiIndex& a = indices_[static_cast<std::size_t>(p)];
        if (a.dimension() != n_) throw std::invalid_argument("BasisOrdering: index dimension mismatch");
        const int k = a.degree();
        if (k < prev_degree || k < 1 || k > d_) {
            throw std::invalid_argument("BasisOrdering: indices not grouped by ascending degree");
        }
        while (prev_degree < k) {
            ++prev_degree;
            block_start_[static_cast<std::size_t>(prev_degree)] = p;
        }
        position_[a] = p;
    }
    while (prev_degree <= d_) {
        ++prev_degree;
        block_start_[static_cast<std::size_t>(prev_degree)] = static_cast<int>(indices_.size());
    }
    if (static_cast<std::int64_t>(indices_.size()) != basis_size(n_, d_)) {
        throw std::invalid_argument("BasisOrdering: wrong number of indices");
    }
}

const MultiIndex& BasisOrdering::index_at(int position) const {
    if (position < 0 || position >= size()) throw std::out_of_range("BasisOrdering::index_at");
    return indices_[static_cast<std::size_t>(position)];
}

bool BasisOrdering::contains(const MultiIndex& alpha) const {
    return position_.find(alpha) != position_.end();
}

int BasisOrdering::position_of(const MultiIndex& alpha) const {
    auto it = position_.find(alpha);
    if (it == position_.end()) {
        throw std::out_of_range("BasisOrdering::position_of: " + alpha.to_string() + " not in basis");
    }
    return it->second;
}

int BasisOrdering::degree_block_start(int k) const {
    if (k < 1 || k > d_) throw std::out_of_range("BasisOrdering::degree_block_start");
    return block_start_[static_cast<std::size_t>(k)];
}

int BasisOrdering::degree_block_size(int k) const {
    if (k < 1 || k > d_) throw std::out_of_range("BasisOrdering::degree_block_size");
    return block_start_[static_cast<std::size_t>(k) + 1] - block_start_[static_cast<std::size_t>(k)];
}

BasisOrdering enumerate_basis(int n, int d) {
    if (n < 1) throw std::invalid_argument("enumerate_basis: require n >= 1");
    if (d < 1) throw std::invalid_argument("enumerate_basis: require d >= 1");
    std::vector<MultiIndex> indices;
    indices.reserve(static_cast<std::size_t>(basis_size(n, d)));
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    for (int k = 1; k <= d; ++k) {
        emit_compositions(alpha, 0, k, indices);
    }
    return BasisOrdering(n, d, std::move(indices));
}

}  // namespace koopman

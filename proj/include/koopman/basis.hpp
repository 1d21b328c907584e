#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace koopman {

/// Exponent vector alpha of a monomial z^alpha. Immutable after construction.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents);

    static MultiIndex zero(int dimension);
    /// Unit index e_k (0-based axis).
    static MultiIndex unit(int dimension, int axis);

    int dimension() const { return static_cast<int>(exponents_.size()); }
    /// Total degree |alpha|.
    int degree() const;
    int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& exponents() const { return exponents_; }

    bool operator==(const MultiIndex& other) const { return exponents_ == other.exponents_; }
    bool operator!=(const MultiIndex& other) const { return !(*this == other); }

    std::string to_string() const;  // "(1,0,2)"

private:
    std::vector<int> exponents_;
};

/// Strict order used for the basis: a before b iff |a| < |b|, or |a| == |b|
/// and a_j > b_j at j = min{ i : a_i != b_i }. Note the reversed within-grade
/// comparison; this is not the usual graded lexicographic order.
bool basis_order_before(const MultiIndex& a, const MultiIndex& b);

/// Plain container comparison, for use as a map key order.
struct MultiIndexKeyOrder {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        return a.exponents() < b.exponents();
    }
};

/// Number of monomials with 1 <= |alpha| <= d in n variables:
/// C(n + d, d) - 1.
std::int64_t basis_size(int n, int d);

/// The ordered monomial basis {e_alpha : 1 <= |alpha| <= d}. The constant
/// monomial is excluded; matrices everywhere index rows and columns by the
/// 0-based positions of this ordering.
class BasisOrdering {
public:
    BasisOrdering(int n, int d, std::vector<MultiIndex> indices);

    int dimension() const { return n_; }
    int degree() const { return d_; }
    int size() const { return static_cast<int>(indices_.size()); }

    const MultiIndex& index_at(int position) const;
    const std::vector<MultiIndex>& indices() const { return indices_; }

    bool contains(const MultiIndex& alpha) const;
    int position_of(const MultiIndex& alpha) const;  // throws if absent

    /// First position of total degree k (positions of equal degree are
    /// contiguous by construction).
    int degree_block_start(int k) const;
    int degree_block_size(int k) const;

private:
    int n_ = 0;
    int d_ = 0;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, int, MultiIndexKeyOrder> position_;
    std::vector<int> block_start_;  // indexed by degree 1..d, plus an end sentinel
};

/// Enumerates the basis for n variables up to total degree d.
BasisOrdering enumerate_basis(int n, int d);

}  // namespace koopman

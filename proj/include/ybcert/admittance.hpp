#pragma once

// Sparse complex bus admittance matrix assembled from branch stamps and
// shunts: Y = A^H * diag(y_L) * A + diag-embedded shunts.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ybcert/network.hpp"

namespace ybcert {

/// Compressed-row complex matrix. Duplicate triplets are summed in insertion
/// order, which keeps assembly bit-reproducible for a given input.
class SparseComplexMatrix {
public:
    struct Triplet {
        int row;
        int col;
        Complex value;
    };

    SparseComplexMatrix() = default;

    static SparseComplexMatrix from_triplets(int n, std::vector<Triplet> triplets) {
        SparseComplexMatrix m;
        m.n_ = n;
        // Stable counting sort by row, then a stable sort by column inside
        // each row, preserves the triplet accumulation order per entry.
        std::vector<std::size_t> row_count(static_cast<std::size_t>(n) + 1, 0);
        for (const Triplet& t : triplets) ++row_count[static_cast<std::size_t>(t.row) + 1];
        for (std::size_t r = 1; r <= static_cast<std::size_t>(n); ++r) row_count[r] += row_count[r - 1];
        std::vector<Triplet> by_row(triplets.size());
        {
            std::vector<std::size_t> next = row_count;
            for (const Triplet& t : triplets) by_row[next[static_cast<std::size_t>(t.row)]++] = t;
        }
        m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
            auto first = by_row.begin() + static_cast<std::ptrdiff_t>(row_count[r]);
            auto last = by_row.begin() + static_cast<std::ptrdiff_t>(row_count[r + 1]);
            std::stable_sort(first, last, [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
            for (auto it = first; it != last; ++it) {
                if (m.row_ptr_[r + 1] > 0 && m.cols_.back() == it->col) {
                    m.values_.back() += it->value;
                } else {
                    m.cols_.push_back(it->col);
                    m.values_.push_back(it->value);
                    ++m.row_ptr_[r + 1];
                }
            }
        }
        for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    int size() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }

    Complex coeff(int row, int col) const {
        for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
            if (cols_[k] == col) return values_[k];
        return Complex{};
    }

    void multiply(std::span<const Complex> x, std::vector<Complex>& out) const {
        out.assign(static_cast<std::size_t>(n_), Complex{});
        for (int r = 0; r < n_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                out[static_cast<std::size_t>(r)] += values_[k] * x[static_cast<std::size_t>(cols_[k])];
    }

    std::vector<Complex> row_sums() const {
        std::vector<Complex> sums(static_cast<std::size_t>(n_), Complex{});
        for (int r = 0; r < n_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sums[static_cast<std::size_t>(r)] += values_[k];
        return sums;
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Dense row-major expansion for the oracle and small tests.
    std::vector<Complex> dense() const {
        std::vector<Complex> d(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), Complex{});
        for (int r = 0; r < n_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                d[static_cast<std::size_t>(r) * n_ + static_cast<std::size_t>(cols_[k])] = values_[k];
        return d;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (int r = 0; r < n_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) fn(r, cols_[k], values_[k]);
    }

private:
    int n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<int> cols_;
    std::vector<Complex> values_;
};

/// Assemble Y_N by stamping every branch (in branch order) and then adding
/// shunts on the diagonal.
inline SparseComplexMatrix build_admittance(const Network& net) {
    std::vector<SparseComplexMatrix::Triplet> triplets;
    triplets.reserve(4 * net.branches().size() + net.shunts().size());
    for (const Branch& b : net.branches()) {
        const auto block = stamp_branch(b);
        triplets.push_back({b.from, b.from, block[0]});
        triplets.push_back({b.from, b.to, block[1]});
        triplets.push_back({b.to, b.from, block[2]});
        triplets.push_back({b.to, b.to, block[3]});
    }
    for (const Shunt& s : net.shunts()) triplets.push_back({s.node, s.node, s.y});
    return SparseComplexMatrix::from_triplets(net.node_count(), std::move(triplets));
}

}  // namespace ybcert

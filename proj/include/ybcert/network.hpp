#pragma once

// Core immutable network model: branches with complex series admittances and
// complex tap ratios, shunts to ground, and the generalized incidence view.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ybcert {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Thrown when a case file cannot be tokenized or is missing a section.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line = 0, int col = 0)
        : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"
                                      : msg),
          line_(line),
          col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

/// Thrown when a parsed case cannot be mapped to a valid network.
class ConversionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when parallel reduction produces a zero-admittance branch.
class ReductionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a tree-only routine is handed a subgraph with cycles.
class NotATreeError : public std::logic_error {
    using std::logic_error::logic_error;
};

/// Thrown when a dense-oracle routine is given a matrix above its size cap.
class SizeExceededError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Series element between two nodes. `tap` is the complex turns ratio a_l;
/// plain lines have tap = 1. The element's nodal block is
///   [[y, -a*y], [-conj(a)*y, |a|^2*y]]  in (from, to) order.
struct Branch {
    int from = 0;
    int to = 0;
    Complex y_series{};
    Complex tap{1.0, 0.0};
};

/// Admittance from a node to ground (line charging, bus compensation, ...).
struct Shunt {
    int node = 0;
    Complex y{};
};

/// Immutable node/branch/shunt description. Node indices are dense and
/// 0-based. Construction validates the element-level assumptions (nonzero
/// series admittances and taps, finite values, endpoints in range) and drops
/// shunts that are exactly zero, so an empty shunt list really means "no
/// shunt anywhere".
class Network {
public:
    Network(int n_nodes, std::vector<Branch> branches, std::vector<Shunt> shunts)
        : n_nodes_(n_nodes), branches_(std::move(branches)) {
        if (n_nodes_ < 0) throw std::invalid_argument("network: negative node count");
        for (std::size_t l = 0; l < branches_.size(); ++l) {
            const Branch& b = branches_[l];
            if (b.from < 0 || b.from >= n_nodes_ || b.to < 0 || b.to >= n_nodes_)
                throw std::invalid_argument("branch " + std::to_string(l) + ": node index out of range");
            if (b.from == b.to)
                throw std::invalid_argument("branch " + std::to_string(l) + ": self-loop not allowed");
            if (!is_finite(b.y_series) || !is_finite(b.tap))
                throw std::invalid_argument("branch " + std::to_string(l) + ": non-finite value");
            if (std::abs(b.y_series) == 0.0)
                throw std::invalid_argument("branch " + std::to_string(l) + ": zero series admittance");
            if (std::abs(b.tap) == 0.0)
                throw std::invalid_argument("branch " + std::to_string(l) + ": zero tap ratio");
        }
        shunts_.reserve(shunts.size());
        for (std::size_t t = 0; t < shunts.size(); ++t) {
            const Shunt& s = shunts[t];
            if (s.node < 0 || s.node >= n_nodes_)
                throw std::invalid_argument("shunt " + std::to_string(t) + ": node index out of range");
            if (!is_finite(s.y))
                throw std::invalid_argument("shunt " + std::to_string(t) + ": non-finite value");
            if (std::abs(s.y) == 0.0) continue;  // physically absent
            shunts_.push_back(s);
        }
    }

    int node_count() const { return n_nodes_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Shunt>& shunts() const { return shunts_; }

private:
    int n_nodes_ = 0;
    std::vector<Branch> branches_;
    std::vector<Shunt> shunts_;
};

/// 2x2 nodal block of a single branch in (from, to) order, row-major.
inline std::array<Complex, 4> stamp_branch(const Branch& b) {
    const Complex y = b.y_series;
    const Complex a = b.tap;
    return {y, -a * y, -std::conj(a) * y, std::norm(a) * y};
}

/// Sparse row-per-branch matrix A with the two nonzeros (+1 at the from
/// column, -tap at the to column) stored implicitly.
class GeneralizedIncidence {
public:
    struct Row {
        int from;
        int to;
        Complex tap;
    };

    GeneralizedIncidence(int n_cols, std::vector<Row> rows) : n_cols_(n_cols), rows_(std::move(rows)) {}

    int cols() const { return n_cols_; }
    std::size_t rows() const { return rows_.size(); }
    const Row& row(std::size_t l) const { return rows_[l]; }

    /// Row l applied to a nodal vector: v[from] - tap * v[to].
    Complex apply_row(std::size_t l, std::span<const Complex> v) const {
        const Row& r = rows_[l];
        return v[static_cast<std::size_t>(r.from)] - r.tap * v[static_cast<std::size_t>(r.to)];
    }

    /// Dense |L| x |N| expansion, row-major. Test and oracle use only.
    std::vector<Complex> dense() const {
        std::vector<Complex> m(rows_.size() * static_cast<std::size_t>(n_cols_), Complex{});
        for (std::size_t l = 0; l < rows_.size(); ++l) {
            m[l * n_cols_ + rows_[l].from] = Complex{1.0, 0.0};
            m[l * n_cols_ + rows_[l].to] = -rows_[l].tap;
        }
        return m;
    }

private:
    int n_cols_;
    std::vector<Row> rows_;
};

inline GeneralizedIncidence build_incidence(const Network& net) {
    std::vector<GeneralizedIncidence::Row> rows;
    rows.reserve(net.branches().size());
    for (const Branch& b : net.branches()) rows.push_back({b.from, b.to, b.tap});
    return GeneralizedIncidence(net.node_count(), std::move(rows));
}

}  // namespace ybcert

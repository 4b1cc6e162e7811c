#pragma once

// Dense brute-force rank and null-space computation used to validate
// certificates at desk scale, plus seeded random network generation for
// property tests. Deliberately dense and direct; independent of the
// structural certification path.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ybcert/admittance.hpp"
#include "ybcert/network.hpp"

namespace ybcert {

struct RankResult {
    std::int64_t rank = 0;
    std::vector<double> singular_values;  // descending
    double threshold_used = 0.0;
};

inline Eigen::MatrixXcd to_eigen(const SparseComplexMatrix& m) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m.size(), m.size());
    m.for_each([&](int r, int c, Complex v) { d(r, c) = v; });
    return d;
}

inline Eigen::MatrixXcd dense_admittance(const Network& net) { return to_eigen(build_admittance(net)); }

/// Numerically revealed rank: singular values above tol * sigma_max * max(m, n).
inline RankResult dense_rank(const Eigen::MatrixXcd& m, double tol, Eigen::Index size_cap = 2000) {
    if (m.rows() > size_cap || m.cols() > size_cap)
        throw SizeExceededError("dense_rank: matrix exceeds size cap " + std::to_string(size_cap));
    RankResult result;
    if (m.rows() == 0 || m.cols() == 0) return result;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    result.singular_values.assign(sv.data(), sv.data() + sv.size());
    result.threshold_used = tol * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()));
    for (double s : result.singular_values)
        if (s > result.threshold_used) ++result.rank;
    return result;
}

/// Unit vector v with ||m*v|| <= tol*||m|| when m is rank deficient.
inline std::optional<Eigen::VectorXcd> null_vector(const Eigen::MatrixXcd& m, double tol,
                                                   Eigen::Index size_cap = 2000) {
    if (m.rows() > size_cap || m.cols() > size_cap)
        throw SizeExceededError("null_vector: matrix exceeds size cap " + std::to_string(size_cap));
    if (m.cols() == 0) return std::nullopt;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double smin = sv.size() == m.cols() ? sv(sv.size() - 1) : 0.0;  // wide matrix: implicit zero
    if (smin > tol * smax) return std::nullopt;
    return Eigen::VectorXcd(svd.matrixV().col(m.cols() - 1));
}

enum class NetProfile { Resistive, ReactiveTree, ReactiveLoop, Mixed, Taps };

/// Deterministic random network (2..12 nodes) targeting the certification
/// conditions and their failure modes per profile.
inline Network random_network(std::uint64_t seed, NetProfile profile) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(profile));
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    const int n = pick(2, 12);
    std::vector<Branch> branches;
    std::vector<Shunt> shunts;

    auto lossy = [&] { return Complex{uniform(0.5, 2.0), uniform(-2.0, 2.0)}; };
    auto reactive = [&](bool inductive) {
        const double b = uniform(0.5, 5.0);
        return Complex{0.0, inductive ? -b : b};
    };
    auto random_tap = [&] { return std::polar(uniform(0.9, 1.1), uniform(-0.3, 0.3)); };

    // Random spanning tree; extra elements depend on the profile.
    std::vector<std::pair<int, int>> tree_edges;
    for (int k = 1; k < n; ++k) {
        const int p = pick(0, k - 1);
        tree_edges.emplace_back(p, k);
    }

    switch (profile) {
        case NetProfile::Resistive: {
            for (auto [p, k] : tree_edges) branches.push_back({p, k, lossy(), Complex{1.0, 0.0}});
            for (int extra = pick(0, n / 2); extra > 0 && n >= 3; --extra) {
                int a = pick(0, n - 1), b = pick(0, n - 1);
                if (a != b) branches.push_back({a, b, lossy(), Complex{1.0, 0.0}});
            }
            for (int t = pick(0, 2); t > 0; --t) shunts.push_back({pick(0, n - 1), Complex{uniform(0.1, 1.0), uniform(-1.0, 1.0)}});
            break;
        }
        case NetProfile::ReactiveTree: {
            const bool inductive = pick(0, 1) == 1;
            for (auto [p, k] : tree_edges) {
                if (pick(0, 2) == 0)
                    branches.push_back({p, k, lossy(), Complex{1.0, 0.0}});
                else
                    branches.push_back({p, k, reactive(inductive), Complex{1.0, 0.0}});
            }
            for (int t = pick(0, 3); t > 0; --t) {
                if (pick(0, 1) == 0)
                    shunts.push_back({pick(0, n - 1), Complex{0.0, inductive ? -uniform(0.1, 2.0) : uniform(0.1, 2.0)}});
                else
                    shunts.push_back({pick(0, n - 1), Complex{uniform(0.1, 1.0), uniform(-0.5, 0.5)}});
            }
            break;
        }
        case NetProfile::ReactiveLoop: {
            const bool uniform_sign = pick(0, 1) == 1;
            const bool inductive = pick(0, 1) == 1;
            for (auto [p, k] : tree_edges)
                branches.push_back({p, k, reactive(uniform_sign ? inductive : pick(0, 1) == 1), Complex{1.0, 0.0}});
            for (int extra = 1 + pick(0, 2); extra > 0 && n >= 3; --extra) {
                int a = pick(0, n - 1), b = pick(0, n - 1);
                if (a != b)
                    branches.push_back({a, b, reactive(uniform_sign ? inductive : pick(0, 1) == 1), Complex{1.0, 0.0}});
            }
            for (int t = pick(0, 2); t > 0; --t)
                shunts.push_back(
                    {pick(0, n - 1), Complex{0.0, (uniform_sign ? (inductive ? -1.0 : 1.0) : (pick(0, 1) ? -1.0 : 1.0)) *
                                                      uniform(0.1, 2.0)}});
            break;
        }
        case NetProfile::Mixed: {
            for (auto [p, k] : tree_edges) {
                const int kind = pick(0, 2);
                branches.push_back({p, k, kind == 0 ? lossy() : reactive(kind == 1), Complex{1.0, 0.0}});
            }
            for (int extra = pick(0, 2); extra > 0 && n >= 3; --extra) {
                int a = pick(0, n - 1), b = pick(0, n - 1);
                const int kind = pick(0, 2);
                if (a != b) branches.push_back({a, b, kind == 0 ? lossy() : reactive(kind == 1), Complex{1.0, 0.0}});
            }
            for (int t = pick(0, 3); t > 0; --t) {
                const int kind = pick(0, 2);
                shunts.push_back({pick(0, n - 1),
                                  kind == 0 ? Complex{uniform(0.1, 1.0), uniform(-1.0, 1.0)} : reactive(kind == 1)});
            }
            if (pick(0, 3) == 0) {
                // Resonant rung: series reactance whose shunt compensation
                // cancels the equivalent admittance seen from either end.
                const double b = uniform(0.5, 2.0);
                const Complex y{0.0, -b};
                const int m = pick(1, n - 1);
                branches.push_back({0, m, y, Complex{1.0, 0.0}});
                shunts.push_back({0, -2.0 * y});
                shunts.push_back({m, -2.0 * y});
            }
            if (pick(0, 3) == 0) {
                // Pi-decomposed real-ratio transformer: a zero-impedance
                // loop through ground (series element plus opposite-sign
                // shunts), singular by construction.
                const double tau = uniform(1.5, 2.5);
                const Complex y = reactive(pick(0, 1) == 1);
                const int a = pick(0, n - 1);
                const int b = (a + 1) % n;
                branches.push_back({a, b, y / tau, Complex{1.0, 0.0}});
                shunts.push_back({a, y * (1.0 - tau) / (tau * tau)});
                shunts.push_back({b, y * (tau - 1.0) / tau});
            }
            break;
        }
        case NetProfile::Taps: {
            for (auto [p, k] : tree_edges) {
                const int kind = pick(0, 2);
                branches.push_back({p, k, kind == 0 ? lossy() : reactive(kind == 1),
                                    pick(0, 1) ? random_tap() : Complex{1.0, 0.0}});
            }
            if (n >= 3 && pick(0, 1) == 1) {
                // Chord whose directed tap product around the fundamental
                // cycle is exactly 1: does not raise the incidence rank.
                std::vector<Complex> v(static_cast<std::size_t>(n), Complex{1.0, 0.0});
                for (std::size_t e = 0; e < tree_edges.size(); ++e)
                    v[static_cast<std::size_t>(tree_edges[e].second)] =
                        v[static_cast<std::size_t>(tree_edges[e].first)] / branches[e].tap;
                const int i = pick(0, n - 1);
                int k = pick(0, n - 1);
                if (i != k) {
                    const Complex chord_tap = v[static_cast<std::size_t>(i)] / v[static_cast<std::size_t>(k)];
                    const int kind = pick(0, 2);
                    branches.push_back({i, k, kind == 0 ? lossy() : reactive(kind == 1), chord_tap});
                }
            } else if (n >= 2 && pick(0, 1) == 1) {
                // Parallel pair with distinct taps: structurally a tree edge
                // but full incidence rank.
                const Branch& b0 = branches[0];
                branches.push_back({b0.from, b0.to, reactive(true), b0.tap * uniform(1.01, 1.1)});
            }
            if (pick(0, 1) == 1)
                for (int t = pick(1, 2); t > 0; --t)
                    shunts.push_back({pick(0, n - 1), Complex{uniform(0.1, 1.0), uniform(-1.0, 1.0)}});
            break;
        }
    }
    return Network(n, std::move(branches), std::move(shunts));
}

}  // namespace ybcert

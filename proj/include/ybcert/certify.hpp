#pragma once

// Structural certification of admittance-matrix invertibility. The verdict
// is assembled per connected island: element-level assumption checks, then
// one of three sufficient conditions per purely-reactive component
// (uniform susceptance sign, shunt-free tree, or grounded-tree equivalent
// admittance recursion), and finally either the shunt argument (rank |N|)
// or the tap-product rank of the generalized incidence matrix.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ybcert/graph.hpp"
#include "ybcert/network.hpp"

namespace ybcert {

enum class Verdict { Invertible, Singular, Inconclusive };

enum class SufficientCondition { UniformReactance, TreeNoShunt, TreeGrounded, None };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Invertible: return "INVERTIBLE";
        case Verdict::Singular: return "SINGULAR";
        default: return "INCONCLUSIVE";
    }
}

inline const char* to_string(SufficientCondition c) {
    switch (c) {
        case SufficientCondition::TreeGrounded: return "TREE_GROUNDED";
        case SufficientCondition::TreeNoShunt: return "TREE_NO_SHUNT";
        case SufficientCondition::UniformReactance: return "UNIFORM_REACTANCE";
        default: return "NONE";
    }
}

/// Element-level hypothesis flags. Failures are data, not exceptions.
struct AssumptionReport {
    bool connected = true;
    bool all_series_nonzero = true;
    bool all_taps_nonzero = true;
    bool nonneg_branch_conductance = true;
    bool nonneg_shunt_conductance = true;

    struct Offender {
        std::string kind;  // "series" | "tap" | "branch-conductance" | "shunt-conductance"
        int index;         // reduced branch/shunt index
        Complex value;
    };
    std::vector<Offender> offending_elements;

    bool element_checks_pass() const {
        return all_series_nonzero && all_taps_nonzero && nonneg_branch_conductance && nonneg_shunt_conductance;
    }
};

inline AssumptionReport check_assumptions(const ReducedNetwork& reduced, double tol, std::size_t* ops = nullptr) {
    AssumptionReport report;
    const Network& net = reduced.net;
    for (std::size_t l = 0; l < net.branches().size(); ++l) {
        if (ops) ++*ops;
        const Branch& b = net.branches()[l];
        if (std::abs(b.y_series) <= tol) {
            report.all_series_nonzero = false;
            report.offending_elements.push_back({"series", static_cast<int>(l), b.y_series});
        }
        if (std::abs(b.tap) <= tol) {
            report.all_taps_nonzero = false;
            report.offending_elements.push_back({"tap", static_cast<int>(l), b.tap});
        }
        if (b.y_series.real() < -tol) {
            report.nonneg_branch_conductance = false;
            report.offending_elements.push_back({"branch-conductance", static_cast<int>(l), b.y_series});
        }
    }
    for (std::size_t t = 0; t < net.shunts().size(); ++t) {
        if (ops) ++*ops;
        const Shunt& s = net.shunts()[t];
        if (s.y.real() < -tol) {
            report.nonneg_shunt_conductance = false;
            report.offending_elements.push_back({"shunt-conductance", static_cast<int>(t), s.y});
        }
    }
    report.connected = connected_components(net, ops).size() <= 1;
    return report;
}

/// Condition: every branch and shunt susceptance in the component shares one
/// strict sign (all inductive or all capacitive). Loops are fine here.
inline bool check_condition_uniform(const Network& net, const ReactiveComponent& comp, double tol,
                                    std::size_t* ops = nullptr) {
    bool all_inductive = true;
    bool all_capacitive = true;
    for (int l : comp.branches) {
        if (ops) ++*ops;
        const double im = net.branches()[static_cast<std::size_t>(l)].y_series.imag();
        if (!(im <= -tol)) all_inductive = false;
        if (!(im >= tol)) all_capacitive = false;
    }
    for (int t : comp.shunts) {
        if (ops) ++*ops;
        const double im = net.shunts()[static_cast<std::size_t>(t)].y.imag();
        if (!(im <= -tol)) all_inductive = false;
        if (!(im >= tol)) all_capacitive = false;
    }
    return all_inductive || all_capacitive;
}

/// Condition: the component is a tree and carries no shunt at all.
inline bool check_condition_tree_no_shunt(const Network& net, const ReactiveComponent& comp,
                                          std::size_t* ops = nullptr) {
    return comp.shunts.empty() && is_tree(net, comp.nodes, comp.branches, ops);
}

/// Outcome of the grounded-tree recursion for one root choice.
struct GroundedTreeResult {
    bool ok = false;
    /// Equivalent admittance per node: for non-root nodes the node-to-ground
    /// admittance with the parent grounded, for the root its total
    /// equivalent admittance. Listed in processing order (leaves first).
    std::vector<std::pair<int, Complex>> node_admittances;
};

/// Condition: the component is a tree, and from the given root each node's
/// equivalent admittance to ground (parent grounded) is nonzero, including
/// the root's own. Parallel branches between a pair are aggregated into one
/// 2x2 block before the recursion.
inline GroundedTreeResult check_condition_grounded_tree(const Network& net, const ReactiveComponent& comp, int root,
                                                        double tol, std::size_t* ops = nullptr) {
    if (!is_tree(net, comp.nodes, comp.branches)) throw NotATreeError("grounded-tree condition on a cyclic component");

    GroundedTreeResult result;

    // Resonance threshold scaled by the component's susceptance magnitude:
    // equivalent admittances can be arbitrarily large near resonance.
    double max_susceptance = 0.0;
    for (int l : comp.branches)
        max_susceptance = std::max(max_susceptance, std::abs(net.branches()[static_cast<std::size_t>(l)].y_series.imag()));
    for (int t : comp.shunts)
        max_susceptance = std::max(max_susceptance, std::abs(net.shunts()[static_cast<std::size_t>(t)].y.imag()));
    const double threshold = tol * (1.0 + max_susceptance);

    std::unordered_map<std::uint64_t, std::vector<int>> pair_branches;
    for (int l : comp.branches) {
        const Branch& b = net.branches()[static_cast<std::size_t>(l)];
        pair_branches[detail::pair_key(b.from, b.to)].push_back(l);
    }

    const SpanningTree tree = spanning_tree(net, comp.nodes, comp.branches, root, ops);

    std::vector<Complex> shunt_at(static_cast<std::size_t>(net.node_count()), Complex{});
    for (int t : comp.shunts) shunt_at[static_cast<std::size_t>(net.shunts()[static_cast<std::size_t>(t)].node)] +=
        net.shunts()[static_cast<std::size_t>(t)].y;

    // 2x2 aggregate of all branches between parent p and node n, (p, n) order.
    const auto pair_block = [&](int p, int n) {
        std::array<Complex, 4> block{};
        for (int l : pair_branches[detail::pair_key(p, n)]) {
            if (ops) ++*ops;
            const Branch& b = net.branches()[static_cast<std::size_t>(l)];
            const auto s = stamp_branch(b);
            if (b.from == p) {
                block[0] += s[0];
                block[1] += s[1];
                block[2] += s[2];
                block[3] += s[3];
            } else {
                block[0] += s[3];
                block[1] += s[2];
                block[2] += s[1];
                block[3] += s[0];
            }
        }
        return block;
    };

    // Children before parents: walk the BFS order backwards.
    std::vector<Complex> y_branch_equiv(static_cast<std::size_t>(net.node_count()), Complex{});  // y^b per node
    std::vector<Complex> y_child_sum(static_cast<std::size_t>(net.node_count()), Complex{});
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
        const int n = *it;
        if (ops) ++*ops;
        const Complex ysb = shunt_at[static_cast<std::size_t>(n)] + y_child_sum[static_cast<std::size_t>(n)];
        if (n == tree.root) {
            result.node_admittances.emplace_back(n, ysb);
            if (std::abs(ysb) <= threshold) return result;  // ok stays false
            break;
        }
        const int p = tree.parent[static_cast<std::size_t>(n)];
        const auto block = pair_block(p, n);
        const Complex denom = block[3] + ysb;
        result.node_admittances.emplace_back(n, denom);
        if (std::abs(denom) <= threshold) return result;
        y_branch_equiv[static_cast<std::size_t>(n)] = block[0] - block[1] * block[2] / denom;
        y_child_sum[static_cast<std::size_t>(p)] += y_branch_equiv[static_cast<std::size_t>(n)];
    }
    result.ok = true;
    return result;
}

/// Rank of the generalized incidence matrix over a connected node set, with
/// the constructive null vector when rank-deficient. Potentials are
/// accumulated in the log domain (log-magnitude and angle separately) so
/// deep trees with off-nominal taps cannot overflow.
struct IncidenceRankResult {
    std::int64_t rank = 0;
    std::optional<std::vector<Complex>> null_basis;  // indexed by node, scaled to max |entry| = 1
};

inline IncidenceRankResult incidence_rank(const Network& net, std::span<const int> nodes,
                                          std::span<const int> branch_ids, double tol, std::size_t* ops = nullptr) {
    IncidenceRankResult result;
    if (nodes.empty()) return result;

    const SpanningTree tree = spanning_tree(net, nodes, branch_ids, -1, ops);
    std::vector<double> logmag(static_cast<std::size_t>(net.node_count()), 0.0);
    std::vector<double> angle(static_cast<std::size_t>(net.node_count()), 0.0);
    std::vector<char> is_tree_branch(net.branches().size(), 0);

    for (int n : tree.order) {
        if (n == tree.root) continue;
        if (ops) ++*ops;
        const int p = tree.parent[static_cast<std::size_t>(n)];
        const int bl = tree.parent_branch[static_cast<std::size_t>(n)];
        is_tree_branch[static_cast<std::size_t>(bl)] = 1;
        const Branch& b = net.branches()[static_cast<std::size_t>(bl)];
        // Row test v_from - a * v_to = 0: walking away from the root either
        // divides or multiplies the potential by the tap.
        const double lm = std::log(std::abs(b.tap));
        const double ar = std::arg(b.tap);
        if (b.from == p) {  // n == b.to: v_n = v_p / a
            logmag[static_cast<std::size_t>(n)] = logmag[static_cast<std::size_t>(p)] - lm;
            angle[static_cast<std::size_t>(n)] = angle[static_cast<std::size_t>(p)] - ar;
        } else {  // n == b.from: v_n = a * v_p
            logmag[static_cast<std::size_t>(n)] = logmag[static_cast<std::size_t>(p)] + lm;
            angle[static_cast<std::size_t>(n)] = angle[static_cast<std::size_t>(p)] + ar;
        }
        angle[static_cast<std::size_t>(n)] =
            std::remainder(angle[static_cast<std::size_t>(n)], 2.0 * std::numbers::pi);
    }

    // Every chord l from i to k must satisfy |v_i - a_l v_k| within tol,
    // i.e. the directed tap product around its fundamental cycle must be 1.
    for (int l : branch_ids) {
        if (is_tree_branch[static_cast<std::size_t>(l)]) continue;
        if (ops) ++*ops;
        const Branch& b = net.branches()[static_cast<std::size_t>(l)];
        const double dlm = logmag[static_cast<std::size_t>(b.from)] -
                           (logmag[static_cast<std::size_t>(b.to)] + std::log(std::abs(b.tap)));
        const double dar = std::remainder(
            angle[static_cast<std::size_t>(b.from)] - (angle[static_cast<std::size_t>(b.to)] + std::arg(b.tap)),
            2.0 * std::numbers::pi);
        bool closes = false;
        if (std::abs(dlm) < 50.0) {
            const Complex ratio = std::polar(std::exp(dlm), dar);
            closes = std::abs(ratio - Complex{1.0, 0.0}) <= tol * std::max(1.0, std::abs(ratio));
        }
        if (!closes) {
            result.rank = static_cast<std::int64_t>(nodes.size());
            return result;
        }
    }

    result.rank = static_cast<std::int64_t>(nodes.size()) - 1;
    double max_lm = logmag[static_cast<std::size_t>(tree.root)];
    for (int n : nodes) max_lm = std::max(max_lm, logmag[static_cast<std::size_t>(n)]);
    std::vector<Complex> v(static_cast<std::size_t>(net.node_count()), Complex{});
    for (int n : nodes)
        v[static_cast<std::size_t>(n)] =
            std::polar(std::exp(logmag[static_cast<std::size_t>(n)] - max_lm), angle[static_cast<std::size_t>(n)]);
    result.null_basis = std::move(v);
    return result;
}

/// Per-component outcome recorded in the certificate.
struct ConditionEvidence {
    int component_id = 0;
    SufficientCondition condition = SufficientCondition::None;
    std::optional<int> root;
    std::vector<std::pair<int, Complex>> node_admittances;  // TREE_GROUNDED only
    std::vector<int> nodes;                                 // component nodes, global indices
};

struct IslandCertificate {
    int id = 0;
    int n_nodes = 0;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<std::int64_t> rank_claim;
};

struct CertifyStats {
    std::size_t ops = 0;  // elementary graph/element visits; scales with |N| + |L|
};

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<std::int64_t> rank_claim;
    std::vector<ConditionEvidence> evidence;
    std::optional<std::vector<Complex>> null_witness;
    double tolerance = 1e-12;
    AssumptionReport assumptions;
    std::vector<IslandCertificate> islands;
    CertifyStats stats;
};

struct CertifyOptions {
    double tol = 1e-12;
    bool strict_connectivity = false;
    int max_root_trials = 0;  // 0 = try every node of the component
};

namespace detail {

struct IslandView {
    Network net;                   // island-local network
    std::vector<int> global_node;  // local -> global node index
};

inline IslandView extract_island(const Network& net, std::span<const int> island_nodes, std::size_t* ops) {
    IslandView view{Network(0, {}, {}), {}};
    std::vector<int> local(static_cast<std::size_t>(net.node_count()), -1);
    std::vector<int> global_node(island_nodes.begin(), island_nodes.end());
    for (std::size_t i = 0; i < global_node.size(); ++i) local[static_cast<std::size_t>(global_node[i])] =
        static_cast<int>(i);
    std::vector<Branch> branches;
    for (const Branch& b : net.branches()) {
        if (ops) ++*ops;
        if (local[static_cast<std::size_t>(b.from)] < 0) continue;
        branches.push_back({local[static_cast<std::size_t>(b.from)], local[static_cast<std::size_t>(b.to)], b.y_series,
                            b.tap});
    }
    std::vector<Shunt> shunts;
    for (const Shunt& s : net.shunts()) {
        if (ops) ++*ops;
        if (local[static_cast<std::size_t>(s.node)] < 0) continue;
        shunts.push_back({local[static_cast<std::size_t>(s.node)], s.y});
    }
    view.net = Network(static_cast<int>(global_node.size()), std::move(branches), std::move(shunts));
    view.global_node = std::move(global_node);
    return view;
}

}  // namespace detail

/// Certify invertibility (or singularity) of the bus admittance matrix of
/// `net`. The verdict is purely structural: no admittance matrix is
/// assembled and no numerical rank is computed. Disconnected inputs are
/// certified island by island unless `strict_connectivity` is set.
inline Certificate certify(const Network& net, const CertifyOptions& opts = {}) {
    Certificate cert;
    cert.tolerance = opts.tol;
    std::size_t* ops = &cert.stats.ops;

    const ReducedNetwork reduced = reduce_parallels(net, opts.tol, ops);
    const std::vector<std::vector<int>> islands = connected_components(reduced.net, ops);

    cert.assumptions = [&] {
        AssumptionReport report = check_assumptions(reduced, opts.tol, nullptr);
        report.connected = islands.size() <= 1;
        return report;
    }();

    if (opts.strict_connectivity && islands.size() > 1) {
        cert.verdict = Verdict::Inconclusive;
        for (std::size_t i = 0; i < islands.size(); ++i)
            cert.islands.push_back({static_cast<int>(i), static_cast<int>(islands[i].size()),
                                    Verdict::Inconclusive, std::nullopt});
        return cert;
    }

    // Map element-level offenders to their islands.
    std::vector<int> island_of(static_cast<std::size_t>(net.node_count()), -1);
    for (std::size_t i = 0; i < islands.size(); ++i)
        for (int n : islands[i]) island_of[static_cast<std::size_t>(n)] = static_cast<int>(i);
    std::vector<char> island_bad(islands.size(), 0);
    for (const auto& off : cert.assumptions.offending_elements) {
        const int node = (off.kind == "shunt-conductance")
                             ? reduced.net.shunts()[static_cast<std::size_t>(off.index)].node
                             : reduced.net.branches()[static_cast<std::size_t>(off.index)].from;
        island_bad[static_cast<std::size_t>(island_of[static_cast<std::size_t>(node)])] = 1;
    }

    int next_component_id = 0;
    bool any_inconclusive = false;
    bool any_singular = false;
    std::int64_t total_rank = 0;

    for (std::size_t i = 0; i < islands.size(); ++i) {
        IslandCertificate island{static_cast<int>(i), static_cast<int>(islands[i].size()), Verdict::Inconclusive,
                                 std::nullopt};
        if (island_bad[i]) {
            any_inconclusive = true;
            cert.islands.push_back(island);
            continue;
        }

        const detail::IslandView view = detail::extract_island(reduced.net, islands[i], ops);
        const ReducedNetwork island_reduced{view.net, {}, {}};
        const std::vector<ReactiveComponent> comps = reactive_subnetwork(island_reduced, opts.tol, ops);

        bool all_components_pass = true;
        for (const ReactiveComponent& comp : comps) {
            ConditionEvidence evidence;
            evidence.component_id = next_component_id++;
            for (int n : comp.nodes) evidence.nodes.push_back(view.global_node[static_cast<std::size_t>(n)]);

            if (check_condition_uniform(view.net, comp, opts.tol, ops)) {
                evidence.condition = SufficientCondition::UniformReactance;
            } else if (check_condition_tree_no_shunt(view.net, comp, ops)) {
                evidence.condition = SufficientCondition::TreeNoShunt;
            } else if (is_tree(view.net, comp.nodes, comp.branches, ops)) {
                const int trials = opts.max_root_trials > 0
                                       ? std::min<int>(opts.max_root_trials, static_cast<int>(comp.nodes.size()))
                                       : static_cast<int>(comp.nodes.size());
                for (int t = 0; t < trials; ++t) {
                    const int root = comp.nodes[static_cast<std::size_t>(t)];
                    GroundedTreeResult res = check_condition_grounded_tree(view.net, comp, root, opts.tol, ops);
                    if (res.ok) {
                        evidence.condition = SufficientCondition::TreeGrounded;
                        evidence.root = view.global_node[static_cast<std::size_t>(root)];
                        evidence.node_admittances.reserve(res.node_admittances.size());
                        for (const auto& [n, y] : res.node_admittances)
                            evidence.node_admittances.emplace_back(view.global_node[static_cast<std::size_t>(n)], y);
                        break;
                    }
                }
            }
            if (evidence.condition == SufficientCondition::None) all_components_pass = false;
            cert.evidence.push_back(std::move(evidence));
        }

        if (!all_components_pass) {
            any_inconclusive = true;
            cert.islands.push_back(island);
            continue;
        }

        if (!view.net.shunts().empty()) {
            island.verdict = Verdict::Invertible;
            island.rank_claim = view.net.node_count();
        } else {
            std::vector<int> all_nodes(static_cast<std::size_t>(view.net.node_count()));
            for (std::size_t n = 0; n < all_nodes.size(); ++n) all_nodes[n] = static_cast<int>(n);
            std::vector<int> all_branches(view.net.branches().size());
            for (std::size_t l = 0; l < all_branches.size(); ++l) all_branches[l] = static_cast<int>(l);
            const IncidenceRankResult rank = incidence_rank(view.net, all_nodes, all_branches, opts.tol, ops);
            island.rank_claim = rank.rank;
            if (rank.rank == view.net.node_count()) {
                island.verdict = Verdict::Invertible;
            } else {
                island.verdict = Verdict::Singular;
                if (!any_singular && rank.null_basis) {
                    std::vector<Complex> witness(static_cast<std::size_t>(net.node_count()), Complex{});
                    for (std::size_t n = 0; n < view.global_node.size(); ++n)
                        witness[static_cast<std::size_t>(view.global_node[n])] = (*rank.null_basis)[n];
                    cert.null_witness = std::move(witness);
                }
                any_singular = true;
            }
        }
        total_rank += *island.rank_claim;
        cert.islands.push_back(island);
    }

    if (any_inconclusive) {
        cert.verdict = Verdict::Inconclusive;
        cert.null_witness.reset();
    } else if (any_singular) {
        cert.verdict = Verdict::Singular;
        cert.rank_claim = total_rank;
    } else {
        cert.verdict = Verdict::Invertible;
        cert.rank_claim = total_rank;
    }
    return cert;
}

}  // namespace ybcert

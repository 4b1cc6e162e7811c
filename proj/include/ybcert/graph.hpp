#pragma once

// Linear-time structural routines: parallel reduction, connectivity,
// spanning trees, tree tests, and extraction of the purely reactive
// subnetwork whose components drive the certification conditions.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <unordered_map>
#include <vector>

#include "ybcert/network.hpp"

namespace ybcert {

/// Network with parallel same-tap branches merged and per-node shunts
/// summed, plus the merge bookkeeping (original element indices per reduced
/// element).
struct ReducedNetwork {
    Network net;
    std::vector<std::vector<int>> branch_sources;  // reduced branch -> original branch indices
    std::vector<std::vector<int>> shunt_sources;   // reduced shunt  -> original shunt indices
};

namespace detail {

// Unordered node pair key for hashing.
inline std::uint64_t pair_key(int a, int b) {
    const std::uint64_t lo = static_cast<std::uint32_t>(a < b ? a : b);
    const std::uint64_t hi = static_cast<std::uint32_t>(a < b ? b : a);
    return (hi << 32) | lo;
}

// Compressed adjacency over an explicit branch subset. Branches appear on
// both endpoints.
struct Adjacency {
    std::vector<std::size_t> offset;
    std::vector<int> neighbor;
    std::vector<int> via_branch;

    Adjacency(const Network& net, std::span<const int> branch_ids) {
        offset.assign(static_cast<std::size_t>(net.node_count()) + 1, 0);
        for (int l : branch_ids) {
            const Branch& b = net.branches()[static_cast<std::size_t>(l)];
            ++offset[static_cast<std::size_t>(b.from) + 1];
            ++offset[static_cast<std::size_t>(b.to) + 1];
        }
        for (std::size_t i = 1; i < offset.size(); ++i) offset[i] += offset[i - 1];
        neighbor.resize(offset.back());
        via_branch.resize(offset.back());
        std::vector<std::size_t> next(offset.begin(), offset.end() - 1);
        for (int l : branch_ids) {
            const Branch& b = net.branches()[static_cast<std::size_t>(l)];
            neighbor[next[static_cast<std::size_t>(b.from)]] = b.to;
            via_branch[next[static_cast<std::size_t>(b.from)]++] = l;
            neighbor[next[static_cast<std::size_t>(b.to)]] = b.from;
            via_branch[next[static_cast<std::size_t>(b.to)]++] = l;
        }
    }
};

}  // namespace detail

/// Merge parallel branches that share a node pair and a tap ratio (within
/// tol, orientation-insensitive), and sum shunts per node. Branches between
/// the same pair with different taps are kept separate. Throws
/// ReductionError if a merge cancels to zero admittance.
inline ReducedNetwork reduce_parallels(const Network& net, double tol, std::size_t* ops = nullptr) {
    struct Slot {
        Complex canon_tap;
        std::size_t reduced_index;
    };
    std::unordered_map<std::uint64_t, std::vector<Slot>> buckets;
    buckets.reserve(net.branches().size());

    std::vector<Branch> reduced;
    std::vector<std::vector<int>> sources;
    std::vector<double> folded_abs;  // running sum of |y| folded into each slot
    reduced.reserve(net.branches().size());

    for (std::size_t l = 0; l < net.branches().size(); ++l) {
        const Branch& b = net.branches()[l];
        if (ops) ++*ops;
        const bool forward = b.from < b.to;
        const Complex canon = forward ? b.tap : Complex{1.0, 0.0} / b.tap;
        auto& bucket = buckets[detail::pair_key(b.from, b.to)];
        bool merged = false;
        for (Slot& slot : bucket) {
            if (std::abs(canon - slot.canon_tap) <= tol * std::max(1.0, std::abs(slot.canon_tap))) {
                Branch& rep = reduced[slot.reduced_index];
                // A reversed duplicate acts as a forward branch with tap
                // 1/a and series |a|^2 * y.
                const Complex add = (b.from == rep.from) ? b.y_series : std::norm(b.tap) * b.y_series;
                rep.y_series += add;
                folded_abs[slot.reduced_index] += std::abs(add);
                sources[slot.reduced_index].push_back(static_cast<int>(l));
                merged = true;
                break;
            }
        }
        if (!merged) {
            bucket.push_back({canon, reduced.size()});
            reduced.push_back(b);
            folded_abs.push_back(std::abs(b.y_series));
            sources.push_back({static_cast<int>(l)});
        }
    }
    for (std::size_t r = 0; r < reduced.size(); ++r) {
        if (sources[r].size() > 1 && std::abs(reduced[r].y_series) <= tol * std::max(1.0, folded_abs[r]))
            throw ReductionError("parallel merge of branches " + std::to_string(reduced[r].from) + "-" +
                                 std::to_string(reduced[r].to) + " cancels to zero admittance");
    }

    std::vector<Complex> node_shunt(static_cast<std::size_t>(net.node_count()), Complex{});
    std::vector<std::vector<int>> node_sources(static_cast<std::size_t>(net.node_count()));
    for (std::size_t t = 0; t < net.shunts().size(); ++t) {
        const Shunt& s = net.shunts()[t];
        if (ops) ++*ops;
        node_shunt[static_cast<std::size_t>(s.node)] += s.y;
        node_sources[static_cast<std::size_t>(s.node)].push_back(static_cast<int>(t));
    }
    std::vector<Shunt> shunts;
    std::vector<std::vector<int>> shunt_sources;
    for (int n = 0; n < net.node_count(); ++n) {
        if (node_sources[static_cast<std::size_t>(n)].empty()) continue;
        if (std::abs(node_shunt[static_cast<std::size_t>(n)]) <= tol) continue;  // cancelled: physically absent
        shunts.push_back({n, node_shunt[static_cast<std::size_t>(n)]});
        shunt_sources.push_back(std::move(node_sources[static_cast<std::size_t>(n)]));
    }

    return ReducedNetwork{Network(net.node_count(), std::move(reduced), std::move(shunts)), std::move(sources),
                          std::move(shunt_sources)};
}

/// BFS partition of the nodes into maximal connected sets. Shunts do not
/// connect nodes; ground is not a node.
inline std::vector<std::vector<int>> connected_components(const Network& net, std::size_t* ops = nullptr) {
    std::vector<int> all_branches(net.branches().size());
    for (std::size_t l = 0; l < all_branches.size(); ++l) all_branches[l] = static_cast<int>(l);
    detail::Adjacency adj(net, all_branches);

    std::vector<std::vector<int>> components;
    std::vector<int> label(static_cast<std::size_t>(net.node_count()), -1);
    std::deque<int> queue;
    for (int start = 0; start < net.node_count(); ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0) continue;
        const int id = static_cast<int>(components.size());
        components.emplace_back();
        label[static_cast<std::size_t>(start)] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            if (ops) ++*ops;
            components.back().push_back(n);
            for (std::size_t k = adj.offset[static_cast<std::size_t>(n)]; k < adj.offset[static_cast<std::size_t>(n) + 1];
                 ++k) {
                if (ops) ++*ops;
                const int m = adj.neighbor[k];
                if (label[static_cast<std::size_t>(m)] < 0) {
                    label[static_cast<std::size_t>(m)] = id;
                    queue.push_back(m);
                }
            }
        }
    }
    return components;
}

/// Tree test on the simple graph of distinct node pairs: parallel branches
/// between one pair count as a single structural edge. Assumes the subgraph
/// is connected.
inline bool is_tree(const Network& net, std::span<const int> nodes, std::span<const int> branch_ids,
                    std::size_t* ops = nullptr) {
    std::unordered_map<std::uint64_t, bool> seen;
    seen.reserve(branch_ids.size());
    std::size_t distinct = 0;
    for (int l : branch_ids) {
        if (ops) ++*ops;
        const Branch& b = net.branches()[static_cast<std::size_t>(l)];
        if (seen.emplace(detail::pair_key(b.from, b.to), true).second) ++distinct;
    }
    return distinct + 1 == nodes.size();
}

/// BFS spanning tree over an explicit subgraph. `parent[n] == n` marks the
/// root; nodes outside the subgraph keep parent -1.
struct SpanningTree {
    int root = -1;
    std::vector<int> parent;         // per node; -1 = not in subgraph
    std::vector<int> parent_branch;  // per node; branch id to the parent, -1 at root
    std::vector<int> order;          // BFS visitation order
};

inline SpanningTree spanning_tree(const Network& net, std::span<const int> nodes, std::span<const int> branch_ids,
                                  int root = -1, std::size_t* ops = nullptr) {
    SpanningTree tree;
    tree.parent.assign(static_cast<std::size_t>(net.node_count()), -1);
    tree.parent_branch.assign(static_cast<std::size_t>(net.node_count()), -1);
    if (nodes.empty()) return tree;
    tree.root = root >= 0 ? root : *std::min_element(nodes.begin(), nodes.end());

    detail::Adjacency adj(net, branch_ids);
    tree.parent[static_cast<std::size_t>(tree.root)] = tree.root;
    std::deque<int> queue{tree.root};
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        if (ops) ++*ops;
        tree.order.push_back(n);
        for (std::size_t k = adj.offset[static_cast<std::size_t>(n)]; k < adj.offset[static_cast<std::size_t>(n) + 1];
             ++k) {
            if (ops) ++*ops;
            const int m = adj.neighbor[k];
            if (tree.parent[static_cast<std::size_t>(m)] < 0) {
                tree.parent[static_cast<std::size_t>(m)] = n;
                tree.parent_branch[static_cast<std::size_t>(m)] = adj.via_branch[k];
                queue.push_back(m);
            }
        }
    }
    return tree;
}

/// Connected component of the purely reactive subnetwork. Indices refer to
/// the reduced network it was extracted from.
struct ReactiveComponent {
    std::vector<int> nodes;
    std::vector<int> branches;
    std::vector<int> shunts;
};

/// Extract the purely reactive branches (|Re y| <= tol), their non-isolated
/// endpoints, and the purely reactive shunts attached to those nodes, split
/// into connected components. May be empty.
inline std::vector<ReactiveComponent> reactive_subnetwork(const ReducedNetwork& reduced, double tol,
                                                          std::size_t* ops = nullptr) {
    const Network& net = reduced.net;
    std::vector<int> reactive_branches;
    for (std::size_t l = 0; l < net.branches().size(); ++l) {
        if (ops) ++*ops;
        if (std::abs(net.branches()[l].y_series.real()) <= tol) reactive_branches.push_back(static_cast<int>(l));
    }
    if (reactive_branches.empty()) return {};

    detail::Adjacency adj(net, reactive_branches);
    std::vector<int> comp_of(static_cast<std::size_t>(net.node_count()), -1);
    std::vector<ReactiveComponent> comps;
    std::deque<int> queue;
    for (int l : reactive_branches) {
        const int start = net.branches()[static_cast<std::size_t>(l)].from;
        if (comp_of[static_cast<std::size_t>(start)] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        comps.emplace_back();
        comp_of[static_cast<std::size_t>(start)] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            if (ops) ++*ops;
            comps[static_cast<std::size_t>(id)].nodes.push_back(n);
            for (std::size_t k = adj.offset[static_cast<std::size_t>(n)];
                 k < adj.offset[static_cast<std::size_t>(n) + 1]; ++k) {
                const int m = adj.neighbor[k];
                if (comp_of[static_cast<std::size_t>(m)] < 0) {
                    comp_of[static_cast<std::size_t>(m)] = id;
                    queue.push_back(m);
                }
            }
        }
    }
    for (int l : reactive_branches) {
        const int c = comp_of[static_cast<std::size_t>(net.branches()[static_cast<std::size_t>(l)].from)];
        comps[static_cast<std::size_t>(c)].branches.push_back(l);
    }
    for (std::size_t t = 0; t < net.shunts().size(); ++t) {
        if (ops) ++*ops;
        const Shunt& s = net.shunts()[t];
        const int c = comp_of[static_cast<std::size_t>(s.node)];
        if (c >= 0 && std::abs(s.y.real()) <= tol) comps[static_cast<std::size_t>(c)].shunts.push_back(static_cast<int>(t));
    }
    for (ReactiveComponent& comp : comps) std::sort(comp.nodes.begin(), comp.nodes.end());
    return comps;
}

}  // namespace ybcert

#include "test_helpers.hpp"

using namespace ybtest;

namespace {
const Complex kOne{1.0, 0.0};
const Complex kInd{0.0, -1.0};  // unit inductor
const Complex kCap{0.0, 1.0};   // unit capacitor

Network fig1_transformer(Complex y = Complex{0.9901, -9.901}) {
    return Network(2, {{0, 1, y, std::polar(1.05, 0.1)}}, {});
}
}  // namespace

TEST_CASE("assumption checks flag negative conductances", "[certify]") {
    Network net(2, {{0, 1, Complex{-0.01, 0.1}, kOne}}, {});
    const AssumptionReport rep = check_assumptions(reduce_parallels(net, 1e-12), 1e-12);
    REQUIRE_FALSE(rep.nonneg_branch_conductance);
    REQUIRE(rep.offending_elements.size() == 1);
    REQUIRE(rep.offending_elements[0].kind == "branch-conductance");
    REQUIRE(certify(net).verdict == Verdict::Inconclusive);
}

TEST_CASE("assumption checks pass on an all-passive connected network", "[certify]") {
    Network net(3, {{0, 1, Complex{1.0, -2.0}, kOne}, {1, 2, Complex{0.5, -1.0}, kOne}}, {{0, Complex{0.1, 0.2}}});
    const AssumptionReport rep = check_assumptions(reduce_parallels(net, 1e-12), 1e-12);
    REQUIRE(rep.connected);
    REQUIRE(rep.element_checks_pass());
}

TEST_CASE("disconnected networks are flagged but certified per island", "[certify]") {
    Network net(4, {{0, 1, Complex{1.0, -1.0}, kOne}, {2, 3, Complex{1.0, -1.0}, kOne}},
                {{0, Complex{0.0, 0.4}}, {2, Complex{0.0, 0.4}}});
    const Certificate cert = certify(net);
    REQUIRE_FALSE(cert.assumptions.connected);
    REQUIRE(cert.islands.size() == 2);
    REQUIRE(cert.verdict == Verdict::Invertible);
    REQUIRE(cert.rank_claim == 4);

    CertifyOptions strict;
    strict.strict_connectivity = true;
    REQUIRE(certify(net, strict).verdict == Verdict::Inconclusive);
}

TEST_CASE("uniform-sign condition", "[certify]") {
    // three inductive branches plus an inductive shunt
    Network ind(4, {{0, 1, kInd, kOne}, {1, 2, 2.0 * kInd, kOne}, {2, 3, 3.0 * kInd, kOne}}, {{1, 0.5 * kInd}});
    const ReducedNetwork red = reduce_parallels(ind, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE(comps.size() == 1);
    REQUIRE(check_condition_uniform(red.net, comps[0], 1e-12));

    // inductor plus capacitor
    Network mixed(3, {{0, 1, kInd, kOne}, {1, 2, kCap, kOne}}, {});
    const ReducedNetwork red2 = reduce_parallels(mixed, 1e-12);
    const auto comps2 = reactive_subnetwork(red2, 1e-12);
    REQUIRE_FALSE(check_condition_uniform(red2.net, comps2[0], 1e-12));

    // capacitor loop with a capacitive shunt: loops are fine for this condition
    Network loop(3, {{0, 1, kCap, kOne}, {1, 2, kCap, kOne}, {0, 2, kCap, kOne}}, {{0, 0.3 * kCap}});
    const ReducedNetwork red3 = reduce_parallels(loop, 1e-12);
    const auto comps3 = reactive_subnetwork(red3, 1e-12);
    REQUIRE(check_condition_uniform(red3.net, comps3[0], 1e-12));
    REQUIRE(certify(loop).verdict == Verdict::Invertible);
}

TEST_CASE("shunt-free tree condition", "[certify]") {
    Network radial(3, {{0, 1, kInd, kOne}, {1, 2, kCap, kOne}}, {});
    const ReducedNetwork red = reduce_parallels(radial, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE(check_condition_tree_no_shunt(red.net, comps[0]));

    Network with_shunt(3, {{0, 1, kInd, kOne}, {1, 2, kCap, kOne}}, {{1, kCap}});
    const ReducedNetwork red2 = reduce_parallels(with_shunt, 1e-12);
    const auto comps2 = reactive_subnetwork(red2, 1e-12);
    REQUIRE_FALSE(check_condition_tree_no_shunt(red2.net, comps2[0]));

    Network looped(3, {{0, 1, kInd, kOne}, {1, 2, kInd, kOne}, {0, 2, kInd, kOne}}, {});
    const ReducedNetwork red3 = reduce_parallels(looped, 1e-12);
    const auto comps3 = reactive_subnetwork(red3, 1e-12);
    REQUIRE_FALSE(check_condition_tree_no_shunt(red3.net, comps3[0]));
}

TEST_CASE("series resonance refuses the grounded-tree condition for the far root", "[certify]") {
    // Inductor 0-1 with the exactly compensating capacitor at node 1: seen
    // from root 0 the equivalent admittance of node 1 vanishes.
    Network net(2, {{0, 1, kInd, kOne}}, {{1, kCap}});
    const ReducedNetwork red = reduce_parallels(net, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE(comps.size() == 1);
    const GroundedTreeResult at0 = check_condition_grounded_tree(red.net, comps[0], 0, 1e-12);
    REQUIRE_FALSE(at0.ok);
    // From root 1 the dangling inductor contributes nothing and the shunt
    // keeps the root admittance nonzero, so the condition holds and the
    // matrix is in fact invertible.
    const GroundedTreeResult at1 = check_condition_grounded_tree(red.net, comps[0], 1, 1e-12);
    REQUIRE(at1.ok);
    const Certificate cert = certify(net);
    REQUIRE(cert.verdict == Verdict::Invertible);
    REQUIRE(dense_rank(dense_admittance(net), 1e-12).rank == 2);
}

TEST_CASE("root trial cap can stop the search before a passing root", "[certify]") {
    // Root 0 is refused by the resonance; root 1 passes. Capping the search
    // at one trial therefore turns a certifiable case inconclusive.
    Network net(2, {{0, 1, kInd, kOne}}, {{1, kCap}});
    CertifyOptions capped;
    capped.max_root_trials = 1;
    REQUIRE(certify(net, capped).verdict == Verdict::Inconclusive);
    REQUIRE(certify(net).verdict == Verdict::Invertible);
}

TEST_CASE("sub-tolerance series admittances fail the assumption check", "[certify]") {
    Network net(2, {{0, 1, Complex{0.0, 1e-15}, kOne}}, {{0, Complex{0.0, 0.5}}});
    const AssumptionReport rep = check_assumptions(reduce_parallels(net, 1e-12), 1e-12);
    REQUIRE_FALSE(rep.all_series_nonzero);
    REQUIRE(certify(net).verdict == Verdict::Inconclusive);
}

TEST_CASE("single inductor with inductive shunt passes from either root", "[certify]") {
    Network net(2, {{0, 1, kInd, kOne}}, {{1, 0.5 * kInd}});
    const ReducedNetwork red = reduce_parallels(net, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE(check_condition_grounded_tree(red.net, comps[0], 0, 1e-12).ok);
    REQUIRE(check_condition_grounded_tree(red.net, comps[0], 1, 1e-12).ok);
}

TEST_CASE("grounded-tree recursion visits leaves first", "[certify]") {
    // Five-node reactive tree patterned on a two-level feeder: branches
    // 0-1, 1-4, 4-2, 4-3, capacitive shunts at 1 and 3, rooted at 3.
    Network net(5, {{0, 1, kInd, kOne}, {1, 4, kInd, kOne}, {4, 2, kInd, kOne}, {4, 3, kInd, kOne}},
                {{1, 0.3 * kCap}, {3, 0.3 * kCap}});
    const ReducedNetwork red = reduce_parallels(net, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE(comps.size() == 1);
    const GroundedTreeResult res = check_condition_grounded_tree(red.net, comps[0], 3, 1e-12);
    REQUIRE(res.ok);
    // processing order: leaves {0, 2}, then 1, then 4, then the root 3
    auto position = [&](int node) {
        for (std::size_t i = 0; i < res.node_admittances.size(); ++i)
            if (res.node_admittances[i].first == node) return i;
        return res.node_admittances.size();
    };
    REQUIRE(position(0) < position(1));
    REQUIRE(position(2) < position(4));
    REQUIRE(position(1) < position(4));
    REQUIRE(position(4) < position(3));
    REQUIRE(res.node_admittances.back().first == 3);
}

TEST_CASE("grounded-tree condition requires a tree", "[certify][errors]") {
    Network loop(3, {{0, 1, kInd, kOne}, {1, 2, kInd, kOne}, {0, 2, kCap, kOne}}, {});
    const ReducedNetwork red = reduce_parallels(loop, 1e-12);
    const auto comps = reactive_subnetwork(red, 1e-12);
    REQUIRE_THROWS_AS(check_condition_grounded_tree(red.net, comps[0], 0, 1e-12), NotATreeError);
}

TEST_CASE("incidence rank of a tree with off-nominal taps", "[certify]") {
    Network net(4,
                {{0, 1, kInd, std::polar(1.05, 0.2)}, {1, 2, kCap, std::polar(0.93, -0.1)}, {1, 3, kInd, kOne}},
                {});
    std::vector<int> nodes{0, 1, 2, 3}, branches{0, 1, 2};
    const IncidenceRankResult res = incidence_rank(net, nodes, branches, 1e-12);
    REQUIRE(res.rank == 3);
    REQUIRE(res.null_basis.has_value());
    for (int n : nodes) REQUIRE(std::abs((*res.null_basis)[static_cast<std::size_t>(n)]) > 0.0);
    // A v = 0 row-wise: v_from - a * v_to
    const GeneralizedIncidence inc = build_incidence(net);
    for (std::size_t l = 0; l < inc.rows(); ++l) REQUIRE(std::abs(inc.apply_row(l, *res.null_basis)) <= 1e-12);
}

TEST_CASE("incidence rank with nominal taps yields the all-ones vector", "[certify]") {
    Network net(4, {{0, 1, kOne, kOne}, {1, 2, kOne, kOne}, {2, 3, kOne, kOne}, {3, 0, kOne, kOne}}, {});
    std::vector<int> nodes{0, 1, 2, 3}, branches{0, 1, 2, 3};
    const IncidenceRankResult res = incidence_rank(net, nodes, branches, 1e-12);
    REQUIRE(res.rank == 3);
    for (int n : nodes) REQUIRE(approx_complex((*res.null_basis)[static_cast<std::size_t>(n)], kOne, 1e-14));
}

TEST_CASE("a chord with mismatched tap product makes the incidence full rank", "[certify]") {
    Network net(2, {{0, 1, kInd, kOne}, {0, 1, 2.0 * kInd, Complex{1.1, 0.0}}}, {});
    std::vector<int> nodes{0, 1}, branches{0, 1};
    const IncidenceRankResult res = incidence_rank(net, nodes, branches, 1e-12);
    REQUIRE(res.rank == 2);
    REQUIRE_FALSE(res.null_basis.has_value());
    REQUIRE(dense_rank(dense_admittance(net), 1e-12).rank == 2);
}

TEST_CASE("ideal transformer is singular with witness parallel to (a, 1)", "[certify]") {
    const Complex a = std::polar(1.05, 0.1);
    const Network net = fig1_transformer();
    const Certificate cert = certify(net);
    REQUIRE(cert.verdict == Verdict::Singular);
    REQUIRE(cert.rank_claim == 1);
    REQUIRE(cert.null_witness.has_value());
    const auto& v = *cert.null_witness;
    REQUIRE(approx_complex(v[0] / v[1], a, 1e-12));
    REQUIRE(witness_residual(net, v) <= 1e-10 * inf_norm(v));

    // any nonzero shunt makes it invertible
    for (Complex sh : {Complex{0.5, 0.2}, kCap, kInd}) {
        for (int node : {0, 1}) {
            Network shunted(2, {net.branches()[0]}, {{node, sh}});
            const Certificate c2 = certify(shunted);
            REQUIRE(c2.verdict == Verdict::Invertible);
            REQUIRE(c2.rank_claim == 2);
        }
    }
}

TEST_CASE("island verdicts combine through the block-diagonal structure", "[certify]") {
    // island 0: invertible (shunted line), island 1: singular (bare transformer)
    Network net(4, {{0, 1, Complex{1.0, -1.0}, kOne}, {2, 3, Complex{1.0, -4.0}, Complex{1.02, 0.0}}},
                {{0, Complex{0.0, 0.4}}});
    const Certificate cert = certify(net);
    REQUIRE(cert.islands.size() == 2);
    REQUIRE(cert.islands[0].verdict == Verdict::Invertible);
    REQUIRE(cert.islands[1].verdict == Verdict::Singular);
    REQUIRE(cert.verdict == Verdict::Singular);
    REQUIRE(cert.rank_claim == 3);
    REQUIRE(cert.null_witness.has_value());
    // witness lives on the emitting island
    REQUIRE(std::abs((*cert.null_witness)[0]) == 0.0);
    REQUIRE(std::abs((*cert.null_witness)[2]) > 0.0);
    REQUIRE(witness_residual(net, *cert.null_witness) <= 1e-9 * inf_norm(*cert.null_witness));

    // an inconclusive island blocks any definite combination
    Network with_bad(6,
                     {{0, 1, Complex{1.0, -1.0}, kOne},
                      {2, 3, Complex{1.0, -4.0}, Complex{1.02, 0.0}},
                      {4, 5, Complex{-0.05, 1.0}, kOne}},
                     {{0, Complex{0.0, 0.4}}});
    REQUIRE(certify(with_bad).verdict == Verdict::Inconclusive);
}

TEST_CASE("degenerate networks certify consistently with the oracle", "[certify]") {
    // empty network: an empty matrix is trivially invertible
    const Certificate empty = certify(Network(0, {}, {}));
    REQUIRE(empty.verdict == Verdict::Invertible);
    REQUIRE(empty.rank_claim == 0);

    // a bare node has the 1x1 zero matrix
    const Certificate bare = certify(Network(1, {}, {}));
    REQUIRE(bare.verdict == Verdict::Singular);
    REQUIRE(bare.rank_claim == 0);
    REQUIRE(bare.null_witness.has_value());
    REQUIRE(std::abs((*bare.null_witness)[0]) == 1.0);
    REQUIRE(dense_rank(dense_admittance(Network(1, {}, {})), 1e-12).rank == 0);

    // a shunted node is invertible
    const Certificate shunted = certify(Network(1, {}, {{0, Complex{0.0, 0.7}}}));
    REQUIRE(shunted.verdict == Verdict::Invertible);
    REQUIRE(shunted.rank_claim == 1);
}

TEST_CASE("conditions are tried cheapest first", "[certify]") {
    // A shunt-free uniform tree satisfies all three conditions; the evidence
    // must record the uniform-sign one.
    Network net(3, {{0, 1, kInd, kOne}, {1, 2, kInd, kOne}}, {});
    const Certificate cert = certify(net);
    REQUIRE(cert.evidence.size() == 1);
    REQUIRE(cert.evidence[0].condition == SufficientCondition::UniformReactance);
}

TEST_CASE("deep off-nominal chains stay in range through the log domain", "[certify]") {
    const int n = 2000;
    std::vector<Branch> branches;
    for (int i = 0; i + 1 < n; ++i) branches.push_back({i, i + 1, kInd, Complex{1.2, 0.0}});
    Network net(n, std::move(branches), {});
    const Certificate cert = certify(net);  // 1.2^2000 overflows any double; potentials must not
    REQUIRE(cert.verdict == Verdict::Singular);
    REQUIRE(cert.rank_claim == n - 1);
    REQUIRE(cert.null_witness.has_value());
    double max_mag = 0.0;
    for (const Complex& z : *cert.null_witness) {
        REQUIRE(std::isfinite(z.real()));
        REQUIRE(std::abs(z) > 0.0);
        max_mag = std::max(max_mag, std::abs(z));
    }
    REQUIRE(max_mag == Catch::Approx(1.0));
    const GeneralizedIncidence inc = build_incidence(net);
    for (std::size_t l = 0; l < inc.rows(); l += 97) REQUIRE(std::abs(inc.apply_row(l, *cert.null_witness)) <= 1e-9);
}

TEST_CASE("scaling a certified uniform-sign component preserves the verdict", "[certify][property]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Network net = random_network(seed, NetProfile::ReactiveLoop);
        const Certificate before = certify(net);
        const double k = scale(rng);
        std::vector<Branch> branches = net.branches();
        for (Branch& b : branches) b.y_series *= k;
        std::vector<Shunt> shunts = net.shunts();
        for (Shunt& s : shunts) s.y *= k;
        const Certificate after = certify(Network(net.node_count(), std::move(branches), std::move(shunts)));
        REQUIRE(after.verdict == before.verdict);
        if (before.rank_claim) REQUIRE(after.rank_claim == before.rank_claim);
    }
}

TEST_CASE("loosening the tolerance never flips a definite verdict to its opposite", "[certify][property]") {
    const double tols[] = {1e-14, 1e-12, 1e-10, 1e-8};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        for (NetProfile profile : all_profiles()) {
            const Network net = random_network(seed, profile);
            Verdict prev = Verdict::Inconclusive;
            bool first = true;
            for (double tol : tols) {
                CertifyOptions opts;
                opts.tol = tol;
                Verdict v;
                try {
                    v = certify(net, opts).verdict;
                } catch (const ReductionError&) {
                    continue;  // a looser tol may merge a cancelling pair
                }
                if (!first) {
                    const bool direct_flip = (prev == Verdict::Invertible && v == Verdict::Singular) ||
                                             (prev == Verdict::Singular && v == Verdict::Invertible);
                    REQUIRE_FALSE(direct_flip);
                }
                prev = v;
                first = false;
            }
        }
    }
}

TEST_CASE("definite verdicts agree with the dense oracle", "[certify][property]") {
    int definite = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (NetProfile profile : all_profiles()) {
            const Network net = random_network(seed, profile);
            Certificate cert;
            try {
                cert = certify(net);
            } catch (const ReductionError&) {
                continue;
            }
            if (!cert.rank_claim) continue;
            ++definite;
            REQUIRE(dense_rank(dense_admittance(net), 1e-12).rank == *cert.rank_claim);
            if (cert.verdict == Verdict::Singular) {
                REQUIRE(cert.null_witness.has_value());
                const double bound = 1e-9 * inf_norm(*cert.null_witness) * build_admittance(net).max_abs();
                REQUIRE(witness_residual(net, *cert.null_witness) <= bound);
            }
        }
    }
    REQUIRE(definite > 50);  // the profiles must actually exercise definite verdicts
}

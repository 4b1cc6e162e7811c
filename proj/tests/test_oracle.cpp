#include "test_helpers.hpp"

using namespace ybtest;

TEST_CASE("dense rank distinguishes transpose from conjugate-transpose products", "[oracle]") {
    const Complex j{0.0, 1.0};
    const Eigen::MatrixXcd m = mat22(Complex{1.0, 0.0}, Complex{}, j, Complex{});
    REQUIRE(dense_rank(m, 1e-12).rank == 1);

    // M^T M vanishes identically: rank 0. M^H M keeps the rank.
    const Eigen::MatrixXcd mtm = m.transpose() * m;
    REQUIRE(mtm.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(dense_rank(mtm, 1e-12).rank == 0);
    REQUIRE(dense_rank(m.adjoint() * m, 1e-12).rank == 1);
}

TEST_CASE("dense rank of the identity", "[oracle]") {
    REQUIRE(dense_rank(Eigen::MatrixXcd::Identity(5, 5), 1e-12).rank == 5);
}

TEST_CASE("rank result reports descending singular values and the threshold", "[oracle]") {
    const RankResult res = dense_rank(mat22({2.0, 0.0}, {}, {}, {0.5, 0.0}), 1e-12);
    REQUIRE(res.singular_values.size() == 2);
    REQUIRE(res.singular_values[0] >= res.singular_values[1]);
    REQUIRE(res.threshold_used == Catch::Approx(1e-12 * 2.0 * 2.0));
    REQUIRE(res.rank == 2);
}

TEST_CASE("size cap is enforced", "[oracle][errors]") {
    REQUIRE_THROWS_AS(dense_rank(Eigen::MatrixXcd::Zero(3, 3), 1e-12, 2), SizeExceededError);
    REQUIRE_THROWS_AS(null_vector(Eigen::MatrixXcd::Zero(3, 3), 1e-12, 2), SizeExceededError);
}

TEST_CASE("null vector of the ideal transformer block", "[oracle]") {
    const Complex a = std::polar(1.05, 0.1);
    const Complex y{1.0, -5.0};
    const Eigen::MatrixXcd m = mat22(y, -a * y, -std::conj(a) * y, std::norm(a) * y);
    const auto v = null_vector(m, 1e-12);
    REQUIRE(v.has_value());
    REQUIRE(std::abs(v->norm() - 1.0) <= 1e-12);
    REQUIRE((m * *v).norm() <= 1e-12 * m.norm());
    REQUIRE(approx_complex((*v)(0) / (*v)(1), a, 1e-10));
}

TEST_CASE("null vector is absent for full-rank matrices", "[oracle]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = Complex{u(rng), u(rng)};
    m += 5.0 * Eigen::MatrixXcd::Identity(4, 4);  // diagonally dominant, certainly invertible
    REQUIRE_FALSE(null_vector(m, 1e-12).has_value());
}

TEST_CASE("null vector of the zero matrix is any unit vector", "[oracle]") {
    const auto v = null_vector(Eigen::MatrixXcd::Zero(3, 3), 1e-12);
    REQUIRE(v.has_value());
    REQUIRE(std::abs(v->norm() - 1.0) <= 1e-12);
}

TEST_CASE("rank of M^H M equals rank of M on random complex matrices", "[oracle][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 10);
    for (int it = 0; it < 200; ++it) {
        const int rows = dim(rng), cols = dim(rng);
        Eigen::MatrixXcd m(rows, cols);
        if (it % 2 == 0) {
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) m(r, c) = Complex{u(rng), u(rng)};
        } else {
            // force rank deficiency through a thin factorization
            const int inner = std::max(1, std::min(rows, cols) - 1 - (it % 3));
            Eigen::MatrixXcd a(rows, inner), b(inner, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < inner; ++c) a(r, c) = Complex{u(rng), u(rng)};
            for (int r = 0; r < inner; ++r)
                for (int c = 0; c < cols; ++c) b(r, c) = Complex{u(rng), u(rng)};
            m = a * b;
        }
        REQUIRE(dense_rank(m.adjoint() * m, 1e-12).rank == dense_rank(m, 1e-12).rank);
    }
}

TEST_CASE("dense rank is deterministic for fixed input", "[oracle]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) m(r, c) = Complex{u(rng), u(rng)};
    const RankResult a = dense_rank(m, 1e-12);
    const RankResult b = dense_rank(m, 1e-12);
    REQUIRE(a.rank == b.rank);
    REQUIRE(a.singular_values == b.singular_values);
}

TEST_CASE("random network profiles honor their contracts", "[oracle]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Network resistive = random_network(seed, NetProfile::Resistive);
        REQUIRE(connected_components(resistive).size() == 1);
        for (const Branch& b : resistive.branches()) REQUIRE(b.y_series.real() > 0.0);

        const Network rtree = random_network(seed, NetProfile::ReactiveTree);
        const auto comps = reactive_subnetwork(reduce_parallels(rtree, 1e-12), 1e-12);
        for (const ReactiveComponent& comp : comps) REQUIRE(is_tree(rtree, comp.nodes, comp.branches));

        const Network taps = random_network(seed, NetProfile::Taps);
        for (const Branch& b : taps.branches()) {
            REQUIRE(std::abs(b.tap) > 0.0);
        }
    }
}

TEST_CASE("mixed profile produces instances the certifier cannot decide", "[oracle]") {
    int inconclusive = 0, decided = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const Network net = random_network(seed, NetProfile::Mixed);
        Certificate cert;
        try {
            cert = certify(net);
        } catch (const ReductionError&) {
            continue;
        }
        const RankResult oracle = dense_rank(dense_admittance(net), 1e-12);
        if (cert.verdict == Verdict::Inconclusive) {
            ++inconclusive;
            REQUIRE(oracle.rank >= 0);  // oracle still decides the ground truth
        } else {
            ++decided;
            REQUIRE(oracle.rank == *cert.rank_claim);
        }
    }
    REQUIRE(inconclusive > 0);
    REQUIRE(decided > 0);
}

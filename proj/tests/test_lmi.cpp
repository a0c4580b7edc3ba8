#include "grasp/lmi.hpp"

#include <cmath>

#include "doctest.h"
#include "grasp/errors.hpp"
#include "grasp/rng.hpp"
#include "grasp/sdp.hpp"

using namespace grasp;

namespace {

DecisionVars random_vars(RandomStream& rs, std::uint64_t tag, int n, int m) {
    DecisionVars v;
    Eigen::MatrixXd R(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            R(r, c) = rs.uniform(tag * 1000 + 10 * r + c, -1.0, 1.0);
    v.P = R * R.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
    v.Y.setZero(m, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            v.Y(r, c) = rs.uniform(tag * 1000 + 500 + 10 * r + c, -1.0, 1.0);
    v.gamma = -rs.uniform(tag * 1000 + 999, 0.05, 1.0);
    return v;
}

// feasibility-style synthesis problem for a small plant: minimize gamma with
// a conditioning cap keeping the homogeneous ray bounded
SdpProblem synthesis_problem(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const DRegion& region) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    SdpProblem p;
    p.num_vars = num_decision_vars(n, m);
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    p.objective(p.num_vars - 1) = 1.0;
    p.lower = Eigen::VectorXd::Constant(p.num_vars, -1e3);
    p.upper = Eigen::VectorXd::Constant(p.num_vars, 1e3);
    p.lower(p.num_vars - 1) = -1e3;
    p.upper(p.num_vars - 1) = -1e-9;
    append_scenario_blocks(p, A, B, region);
    append_common_blocks(p, n, m);
    append_certificate_cap(p, n, m, 100.0);
    return p;
}

}  // namespace

TEST_CASE("scalar plant reduces to the textbook decay inequality") {
    const Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
    const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(1, 1);
    DRegion region;
    DecisionVars v;
    v.P = Eigen::MatrixXd::Identity(1, 1);
    v.Y = Eigen::MatrixXd::Constant(1, 1, 0.8);
    v.gamma = -0.05;

    const auto f = dregion_blocks(A, B, region, v);
    CHECK(f[0](0, 0) == -2.0 * 0.8 + 1.0);

    // gain above one half puts the pole left of -alpha, below does not
    v.Y(0, 0) = 0.6;
    CHECK(evaluate_constraint(v, A, B, region)(0) <= 0.0);
    v.Y(0, 0) = 0.4;
    CHECK(evaluate_constraint(v, A, B, region)(0) > 0.0);
}

TEST_CASE("mid cone angle weighs symmetric and skew parts equally") {
    RandomStream rs(0x77aa01u);
    DRegion region;
    region.theta = 0.25 * 3.14159265358979323846;
    const int n = 2;
    Eigen::MatrixXd A(n, n), B(n, 1);
    A << -0.3, 1.2, -0.7, -0.9;
    B << 1.0, 0.4;
    const DecisionVars v = random_vars(rs, 1, n, 1);

    const auto f = dregion_blocks(A, B, region, v);
    const Eigen::MatrixXd X = A * v.P - B * v.Y;
    const double w = std::cos(region.theta);
    Eigen::MatrixXd expected(2 * n, 2 * n);
    expected.topLeftCorner(n, n) = w * (X + X.transpose());
    expected.bottomRightCorner(n, n) = w * (X + X.transpose());
    expected.topRightCorner(n, n) = w * (X - X.transpose());
    expected.bottomLeftCorner(n, n) = -w * (X - X.transpose());
    CHECK((f[2] - expected).norm() <= 1e-13 * expected.norm());
}

TEST_CASE("zero input matrix degrades to the open-loop stability test") {
    RandomStream rs(0x77aa02u);
    DRegion region;
    Eigen::MatrixXd A(2, 2);
    A << -1.0, 0.4, -0.2, -2.0;
    const Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 1);
    const DecisionVars v = random_vars(rs, 2, 2, 1);

    const auto f = dregion_blocks(A, B, region, v);
    const Eigen::MatrixXd X = A * v.P;
    CHECK((f[0] - (X + X.transpose() + 2.0 * region.alpha * v.P)).norm() <= 1e-14);
    CHECK((f[1].topRightCorner(2, 2) - X).norm() <= 1e-14);
}

TEST_CASE("margins scale linearly with the variables") {
    RandomStream rs(0x77aa03u);
    DRegion region;
    Eigen::MatrixXd A(3, 3), B(3, 2);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) A(r, c) = rs.uniform(10 * r + c, -2.0, 2.0);
        for (int c = 0; c < 2; ++c) B(r, c) = rs.uniform(100 + 10 * r + c, -1.0, 1.0);
    }
    DecisionVars v = random_vars(rs, 3, 3, 2);
    const Eigen::VectorXd base = evaluate_constraint(v, A, B, region);

    const double scale = 3.7;
    v.P *= scale;
    v.Y *= scale;
    v.gamma *= scale;
    const Eigen::VectorXd scaled = evaluate_constraint(v, A, B, region);
    CHECK((scaled - scale * base).norm() <= 1e-10 * base.norm());
}

TEST_CASE("unstable plant shows a positive decay margin at the identity guess") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    A.diagonal() << 1.0, -2.0, -3.0;
    const Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 1);
    DecisionVars v;
    v.P = Eigen::MatrixXd::Identity(3, 3);
    v.Y = Eigen::MatrixXd::Zero(1, 3);
    v.gamma = -1.0;
    DRegion region;
    CHECK(evaluate_constraint(v, A, B, region)(0) > 0.0);
}

TEST_CASE("gain recovery inverts the certificate") {
    RandomStream rs(0x77aa04u);
    Eigen::MatrixXd M(3, 6);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 6; ++c) M(r, c) = rs.uniform(10 * r + c, -2.0, 2.0);

    CHECK((recover_gain(Eigen::MatrixXd::Identity(6, 6), M) - M).norm() <= 1e-12);
    CHECK((recover_gain(2.0 * Eigen::MatrixXd::Identity(6, 6), M) - 0.5 * M).norm() <=
          1e-12);

    const DecisionVars v = random_vars(rs, 5, 6, 3);
    const Eigen::MatrixXd L = recover_gain(v.P, v.Y);
    CHECK((L * v.P - v.Y).norm() <= 1e-8);

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(6, 6);
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(recover_gain(bad, M), DomainError);
}

TEST_CASE("gain is invariant under joint certificate scaling") {
    RandomStream rs(0x77aa05u);
    const DecisionVars v = random_vars(rs, 6, 6, 3);
    const Eigen::MatrixXd L1 = recover_gain(v.P, v.Y);
    const Eigen::MatrixXd L2 = recover_gain(4.2 * v.P, 4.2 * v.Y);
    CHECK((L1 - L2).norm() <= 1e-9 * L1.norm());
}

TEST_CASE("pole membership follows the three boundary conditions") {
    DRegion region;  // alpha 0.5, r 7, theta 30 degrees

    Eigen::MatrixXd good = Eigen::MatrixXd::Zero(2, 2);
    good.diagonal() << -1.0, -2.0;
    CHECK(pole_region_check(good, region).inside);

    Eigen::MatrixXd slow = Eigen::MatrixXd::Zero(2, 2);
    slow.diagonal() << -0.3, -2.0;
    const PoleCheck pc = pole_region_check(slow, region);
    CHECK(!pc.inside);
    CHECK((pc.margins[0] > 0.0) != (pc.margins[1] > 0.0));

    // pole pair -1 +/- 2i has damping 0.447, far below cos(30 deg)
    Eigen::MatrixXd ringing(2, 2);
    ringing << -1.0, 2.0, -2.0, -1.0;
    CHECK(!pole_region_check(ringing, region).inside);

    Eigen::MatrixXd fast = Eigen::MatrixXd::Zero(2, 2);
    fast.diagonal() << -8.0, -2.0;
    CHECK(!pole_region_check(fast, region).inside);
}

TEST_CASE("region parameters are validated") {
    DRegion region;
    region.alpha = -0.1;
    CHECK_THROWS_AS(region.validate(), DomainError);
    region.alpha = 0.5;
    region.r = 0.4;
    CHECK_THROWS_AS(region.validate(), DomainError);
    region.r = 7.0;
    region.theta = 1.6;
    CHECK_THROWS_AS(region.validate(), DomainError);
}

TEST_CASE("packed variables round trip and drive the same block values") {
    RandomStream rs(0x77aa06u);
    const int n = 6, m = 3;
    const DecisionVars v = random_vars(rs, 7, n, m);
    const Eigen::VectorXd x = pack_decision_vars(v);
    const DecisionVars back = unpack_decision_vars(x, n, m);
    CHECK((back.P - v.P).norm() == 0.0);
    CHECK((back.Y - v.Y).norm() == 0.0);
    CHECK(back.gamma == v.gamma);

    Eigen::MatrixXd A(n, n);
    Eigen::MatrixXd B(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) A(r, c) = rs.uniform(700 + 10 * r + c, -1.5, 1.5);
        for (int c = 0; c < m; ++c) B(r, c) = rs.uniform(900 + 10 * r + c, -1.0, 1.0);
    }
    DRegion region;
    const double eta = 1e-9;
    SdpProblem p;
    p.num_vars = num_decision_vars(n, m);
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    p.lower = Eigen::VectorXd::Constant(p.num_vars, -1e6);
    p.upper = Eigen::VectorXd::Constant(p.num_vars, 1e6);
    append_scenario_blocks(p, A, B, region, eta);
    append_common_blocks(p, n, m, eta);

    const auto f = dregion_blocks(A, B, region, v);
    for (int k = 0; k < 4; ++k) {
        const int d = static_cast<int>(f[k].rows());
        const Eigen::MatrixXd expected =
            f[k] - v.gamma * Eigen::MatrixXd::Identity(d, d) +
            eta * Eigen::MatrixXd::Identity(d, d);
        CHECK((p.blocks[static_cast<std::size_t>(k)].at(x) - expected).norm() <=
              1e-11 * std::max(1.0, expected.norm()));
    }
}

TEST_CASE("gain cap block measures the spectral norm") {
    RandomStream rs(0x77aa07u);
    const int n = 6, m = 3;
    const DecisionVars v = random_vars(rs, 8, n, m);
    SdpProblem p;
    p.num_vars = num_decision_vars(n, m);
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    p.lower = Eigen::VectorXd::Constant(p.num_vars, -1e6);
    p.upper = Eigen::VectorXd::Constant(p.num_vars, 1e6);
    const double mu = 2.5;
    append_gain_cap(p, n, m, mu);

    const Eigen::MatrixXd block = p.blocks[0].at(pack_decision_vars(v));
    const double top =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .maxCoeff();
    const double sigma = v.Y.jacobiSvd().singularValues()(0);
    CHECK(top == doctest::Approx(sigma - mu).epsilon(1e-10));
}

TEST_CASE("certified variables place the closed-loop poles in the region") {
    RandomStream rs(0x5CE4A1u);
    DRegion region;
    const int n = 2, m = 1;
    int solved = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Eigen::MatrixXd A(n, n), B(n, m);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c)
                A(r, c) = rs.uniform(100000u + 100u * trial + 10 * r + c, -2.0, 2.0);
            B(r, 0) = rs.uniform(200000u + 100u * trial + r, 0.5, 1.5);
        }
        const SdpSolution sol = solve_sdp(synthesis_problem(A, B, region));
        if (sol.status != SdpStatus::optimal) continue;
        ++solved;

        const DecisionVars v = unpack_decision_vars(sol.x, n, m);
        REQUIRE(v.gamma < 0.0);
        const Eigen::VectorXd margins = evaluate_constraint(v, A, B, region);
        REQUIRE(margins.maxCoeff() <= 1e-7);

        const Eigen::MatrixXd L = recover_gain(v.P, v.Y);
        const Eigen::MatrixXd A_cl = A - B * L;
        CHECK(pole_region_check(A_cl, region).inside);
    }
    CHECK(solved >= 450);
}

TEST_CASE("growing the region keeps certified variables feasible") {
    RandomStream rs(0x5CE4A2u);
    DRegion region;
    const int n = 2, m = 1;
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 40; ++trial) {
        Eigen::MatrixXd A(n, n), B(n, m);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c)
                A(r, c) = rs.uniform(300000u + 100u * trial + 10 * r + c, -2.0, 2.0);
            B(r, 0) = rs.uniform(400000u + 100u * trial + r, 0.5, 1.5);
        }
        const SdpSolution sol = solve_sdp(synthesis_problem(A, B, region));
        if (sol.status != SdpStatus::optimal) continue;
        ++checked;
        const DecisionVars v = unpack_decision_vars(sol.x, n, m);

        DRegion wide;
        wide.alpha = 0.5 * region.alpha;
        wide.r = 1.5 * region.r;
        wide.theta = region.theta + 0.4;
        const Eigen::VectorXd margins = evaluate_constraint(v, A, B, wide);
        CHECK(margins.maxCoeff() <= 1e-8);
    }
    CHECK(checked >= 40);
}

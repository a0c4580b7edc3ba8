#include <cmath>
#include <algorithm>

#include "doctest.h"
#include "grasp/grasp_map.hpp"
#include "grasp/rng.hpp"

using namespace grasp;

static HandObjectParams default_params() {
    HandObjectParams p;
    p.validate();
    return p;
}

TEST_CASE("grasp map matrix pattern") {
    const auto p = default_params();

    const Matrix34d G0 = grasp_map(0.0, p);
    CHECK(G0(0, 0) == 0.0);
    CHECK(G0(0, 1) == -1.0);
    CHECK(G0(0, 2) == 0.0);
    CHECK(G0(0, 3) == 1.0);
    CHECK(G0(1, 0) == 1.0);
    CHECK(G0(1, 1) == 0.0);
    CHECK(G0(1, 2) == -1.0);
    CHECK(G0(1, 3) == 0.0);
    CHECK(G0(2, 0) == doctest::Approx(0.0175).epsilon(1e-15));
    CHECK(G0(2, 1) == 0.0);
    CHECK(G0(2, 2) == doctest::Approx(0.0175).epsilon(1e-15));
    CHECK(G0(2, 3) == 0.0);

    const Matrix34d G5 = grasp_map(0.005, p);
    CHECK(G5(2, 3) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK((G5.topRows<2>() - G0.topRows<2>()).norm() == 0.0);

    CHECK_THROWS_AS((void)grasp_map(0.0051, p), DomainError);
    CHECK_THROWS_AS((void)grasp_map(-0.0041, p), DomainError);
}

TEST_CASE("world-frame grasp map rotates force rows only") {
    const auto p = default_params();
    const double th = 0.37;
    const Matrix34d G0 = grasp_map(0.002, p);
    const Matrix34d Gw = grasp_map_world(th, 0.002, p);
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK((Gw.topRows<2>() - R * G0.topRows<2>()).norm() <= 1e-15);
    CHECK((Gw.row(2) - G0.row(2)).norm() == 0.0);
}

TEST_CASE("pseudo-inverse is a right inverse") {
    const auto p = default_params();
    for (double delta : {-0.004, 0.0, 0.005}) {
        const Matrix34d G = grasp_map(delta, p);
        const Matrix43d Gd = grasp_pseudo_inverse(G);
        CHECK(((G * Gd) - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
    }
    const Matrix34d Gw = grasp_map_world(1.1, -0.003, p);
    CHECK(((Gw * grasp_pseudo_inverse(Gw)) - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
}

TEST_CASE("kernel direction") {
    const auto p = default_params();

    SUBCASE("nominal contact: pure symmetric squeeze") {
        const Eigen::Vector4d n = grasp_nullspace(grasp_map(0.0, p));
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(n(0)) <= 1e-14);
        CHECK(std::abs(n(2)) <= 1e-14);
        CHECK(n(1) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
        CHECK(n(3) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    }

    SUBCASE("shifted contact couples tangential components") {
        // kernel satisfies 2 r0 a = -delta d with a = c, b = d
        HandObjectParams wide = p;
        wide.delta_max = 0.02;
        const double delta = wide.r0;
        const Eigen::Vector4d n = grasp_nullspace(grasp_map(delta, wide));
        CHECK(std::abs(n(0) - n(2)) <= 1e-12);
        CHECK(std::abs(n(1) - n(3)) <= 1e-12);
        CHECK(std::abs(2.0 * wide.r0 * n(0) + delta * n(3)) <= 1e-12);
    }

    SUBCASE("frozen value at delta = 2 mm") {
        const Eigen::Vector4d n = grasp_nullspace(grasp_map(0.002, p));
        CHECK(n(0) == doctest::Approx(-0.040340293755055).epsilon(1e-9));
        CHECK(n(1) == doctest::Approx(0.705955140713456).epsilon(1e-9));
        CHECK(n(2) == doctest::Approx(-0.040340293755055).epsilon(1e-9));
        CHECK(n(3) == doctest::Approx(0.705955140713456).epsilon(1e-9));
    }

    SUBCASE("kernel property across the admissible interval") {
        RandomStream rs(20240511);
        for (std::uint64_t i = 0; i < 50; ++i) {
            const double delta = rs.uniform(i, p.delta_min, p.delta_max);
            const Matrix34d G = grasp_map(delta, p);
            const Eigen::Vector4d n = grasp_nullspace(G);
            CHECK((G * n).norm() <= 1e-10);
            CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
            CHECK(n(1) > 0.0);
            CHECK(n(3) > 0.0);
        }
    }
}

TEST_CASE("full row rank across the admissible interval") {
    const auto p = default_params();
    for (int i = 0; i <= 90; ++i) {
        const double delta =
            std::min(p.delta_min + (p.delta_max - p.delta_min) * i / 90.0, p.delta_max);
        Eigen::JacobiSVD<Matrix34d> svd(grasp_map(delta, p));
        CHECK(svd.singularValues()(2) > 1e-6);
    }
}

TEST_CASE("contact points carry the uncertainty on the left side") {
    const auto p = default_params();
    CHECK((contact_body_right(p) - Eigen::Vector2d(p.r0, 0.0)).norm() == 0.0);
    CHECK((contact_body_left(0.003, p) - Eigen::Vector2d(-p.r0, -0.003)).norm() == 0.0);
}

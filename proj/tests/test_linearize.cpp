#include "grasp/linearize.hpp"

#include <cmath>

#include "doctest.h"
#include "grasp/dynamics.hpp"
#include "grasp/grasp_map.hpp"
#include "grasp/kinematics.hpp"

using namespace grasp;

namespace {

const Eigen::Vector3d kPoseEq{0.0, 0.0665, 0.0};

// operating point away from the equilibrium, on the contact manifold, with
// both squeeze and motion torque applied
OperatingPoint moving_point(const HandObjectParams& p) {
    OperatingPoint op = equilibrium_operating_point(kPoseEq, 0.001, 0.7, p);
    op.x_o = Eigen::Vector3d{0.010, 0.060, 0.05};
    op.xdot_o = Eigen::Vector3d{0.02, -0.01, 0.3};
    op.q = inverse_kinematics(op.x_o, op.delta, p);
    const Eigen::Matrix4d Jh = hand_jacobian(op.q, op.x_o, p);
    const Matrix34d G = grasp_map_world(op.x_o(2), op.delta, p);
    const Eigen::Vector4d squeeze = grasp_nullspace(grasp_map(op.delta, p));
    const Eigen::Vector3d u{0.003, -0.002, 0.0001};
    op.tau = Jh.transpose() * (0.7 * squeeze + grasp_pseudo_inverse(G) * u);
    return op;
}

}  // namespace

TEST_CASE("structure rows are exact") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    const AffinePlant plant = linearize(op, op.delta, p);

    CHECK(plant.A.topLeftCorner<3, 3>().isZero(0.0));
    CHECK((plant.A.topRightCorner<3, 3>() - Eigen::Matrix3d::Identity()).isZero(0.0));
    CHECK(plant.B.topRows<3>().isZero(0.0));
}

TEST_CASE("equilibrium point with zero torque gives a double integrator top and zero V") {
    HandObjectParams p;
    OperatingPoint op = equilibrium_operating_point(kPoseEq, 0.0, 0.0, p);
    const AffinePlant plant = linearize(op, op.delta, p);

    CHECK(plant.V.norm() <= 1e-9);
    // no torque and no motion: the acceleration field vanishes identically
    // around the point, so the bottom blocks difference out to zero
    CHECK(plant.A.bottomLeftCorner<3, 3>().norm() <= 1e-9);
    CHECK(plant.A.bottomRightCorner<3, 3>().norm() <= 1e-9);
}

TEST_CASE("equilibrium point with squeeze torque still nulls V") {
    HandObjectParams p;
    const OperatingPoint op = equilibrium_operating_point(kPoseEq, 0.002, 0.9, p);
    const AffinePlant plant = linearize(op, op.delta, p);
    CHECK(plant.V.norm() <= 1e-9);
}

TEST_CASE("input matrix at the centered equilibrium matches the frozen reference") {
    HandObjectParams p;
    const OperatingPoint op = equilibrium_operating_point(kPoseEq, 0.0, 0.7, p);
    const AffinePlant plant = linearize(op, op.delta, p);
    const Eigen::Matrix3d Bb = plant.B.bottomRows<3>();

    CHECK(Bb(0, 0) == doctest::Approx(10.18573214442920).epsilon(1e-6));
    CHECK(Bb(1, 1) == doctest::Approx(11.85774728329473).epsilon(1e-6));
    CHECK(Bb(0, 2) == doctest::Approx(323.1677093142114).epsilon(1e-6));
    CHECK(Bb(2, 0) == doctest::Approx(323.1677093142114).epsilon(1e-6));
    CHECK(Bb(2, 2) == doctest::Approx(48847.94549375049).epsilon(1e-6));
    CHECK(std::abs(Bb(0, 1)) <= 1e-3);
    CHECK(std::abs(Bb(1, 0)) <= 1e-3);
    CHECK(std::abs(Bb(1, 2)) <= 5e-2);
    CHECK(std::abs(Bb(2, 1)) <= 5e-2);
}

TEST_CASE("input matrix equals the torque response of the nonlinear model") {
    HandObjectParams p;
    OperatingPoint op = moving_point(p);
    const double delta_hat = 0.0;  // deliberately different from op.delta
    const AffinePlant plant = linearize(op, delta_hat, p);

    const Matrix34d G_hat = grasp_map_world(op.x_o(2), delta_hat, p);
    const Matrix43d G_dag = grasp_pseudo_inverse(G_hat);
    const Eigen::Matrix4d Jh = hand_jacobian(op.q, op.x_o, p);
    const Eigen::Vector3d a0 =
        object_acceleration(op.q, op.x_o, op.xdot_o, op.tau, op.delta, p);
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d u = 1e-3 * Eigen::Vector3d::Unit(k);
        const Eigen::Vector4d tau = op.tau + Jh.transpose() * (G_dag * u);
        const Eigen::Vector3d a1 =
            object_acceleration(op.q, op.x_o, op.xdot_o, tau, op.delta, p);
        const Eigen::Vector3d col = (a1 - a0) / 1e-3;
        CHECK((col - plant.B.bottomRows<3>().col(k)).norm() <=
              1e-6 * plant.B.bottomRows<3>().col(k).norm());
    }
}

TEST_CASE("affine term reproduces the derivative at the operating point") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    const AffinePlant plant = linearize(op, op.delta, p);

    Vector6d dev;
    dev.head<3>() = op.x_o - op.x_eq;
    dev.tail<3>() = op.xdot_o;
    const Eigen::Matrix4d Jh = hand_jacobian(op.q, op.x_o, p);
    AggregationDetail detail;
    const Matrix34d G = grasp_map_world(op.x_o(2), op.delta, p);
    const Eigen::Vector4d qdot = Jh.partialPivLu().solve(G.transpose() * op.xdot_o);
    const ObjectLevelDynamics terms =
        dynamics_terms(op.q, op.x_o, qdot, op.xdot_o, op.delta, p, &detail);
    Vector6d model = plant.A * dev + plant.V;
    model.tail<3>() +=
        terms.M.ldlt().solve(detail.H.transpose() * (op.tau - op.tau_eq));

    Vector6d truth;
    truth.head<3>() = op.xdot_o;
    truth.tail<3>() = object_acceleration(op.q, op.x_o, op.xdot_o, op.tau, op.delta, p);
    CHECK((model - truth).norm() <= 1e-7 * std::max(1.0, truth.norm()));
}

TEST_CASE("validation ratio is near 4 for a correct model") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    const AffinePlant plant = linearize(op, op.delta, p);
    const double ratio = validate_linearization(plant, op, p, 1e-4);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("validation ratio drops to 2 for a corrupted model") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    AffinePlant plant = linearize(op, op.delta, p);

    int bi = 3, bj = 0;
    plant.A.bottomRows<3>().cwiseAbs().maxCoeff(&bi, &bj);
    plant.A(3 + bi, bj) *= 1.01;
    const double ratio = validate_linearization(plant, op, p, 1e-6);
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.5);
}

TEST_CASE("halving the difference step leaves the state matrix unchanged") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    const AffinePlant a = linearize(op, op.delta, p, 1e-6);
    const AffinePlant b = linearize(op, op.delta, p, 5e-7);
    CHECK((a.A - b.A).norm() <= 1e-4 * a.A.norm());
}

TEST_CASE("constraint flow matches inverse kinematics on the manifold") {
    HandObjectParams p;
    const Eigen::Vector3d x0{0.004, 0.058, -0.06};
    const double delta = -0.002;
    const Eigen::Vector4d q0 = inverse_kinematics(x0, delta, p);
    const Eigen::Vector3d x1 = x0 + Eigen::Vector3d{1e-4, -8e-5, 2e-3};
    const Eigen::Vector4d q_flow = constraint_flow_joints(q0, x0, x1, delta, p);
    const Eigen::Vector4d q_ik = inverse_kinematics(x1, delta, p);
    CHECK((q_flow - q_ik).norm() <= 1e-10);
}

TEST_CASE("detached joint configurations linearize cleanly") {
    HandObjectParams p;
    OperatingPoint op = moving_point(p);
    // joints deliberately off the contact manifold, as sampled points are
    op.q(0) += 0.035;
    op.q(3) -= 0.02;
    const AffinePlant plant = linearize(op, op.delta, p);
    CHECK(plant.A.allFinite());
    CHECK(plant.B.allFinite());
    CHECK(plant.V.allFinite());
    const double ratio = validate_linearization(plant, op, p, 1e-4);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("augmented plant carries the affine term as a frozen state") {
    HandObjectParams p;
    const OperatingPoint op = moving_point(p);
    const AffinePlant plant = linearize(op, op.delta, p);
    const AugmentedPlant aug = augment(plant);

    CHECK((aug.A.topLeftCorner<6, 6>() - plant.A).isZero(0.0));
    CHECK((aug.A.topRightCorner<6, 1>() - plant.V).isZero(0.0));
    CHECK(aug.A.bottomRows<1>().isZero(0.0));
    CHECK((aug.B.topRows<6>() - plant.B).isZero(0.0));
    CHECK(aug.B.bottomRows<1>().isZero(0.0));

    // lifted flow on [x; 1] reproduces the affine flow
    Eigen::Matrix<double, 7, 1> z;
    z << 0.01, -0.02, 0.1, 0.3, -0.2, 0.5, 1.0;
    const Eigen::Matrix<double, 7, 1> zdot = aug.A * z;
    const Vector6d flat = plant.A * z.head<6>() + plant.V;
    CHECK((zdot.head<6>() - flat).norm() <= 1e-15);
    CHECK(zdot(6) == 0.0);

    // spectrum gains exactly the frozen zero mode
    const Eigen::EigenSolver<Eigen::Matrix<double, 7, 7>> es(aug.A);
    double closest = 1e300;
    for (int i = 0; i < 7; ++i)
        closest = std::min(closest, std::abs(es.eigenvalues()(i)));
    CHECK(closest <= 1e-9);
}

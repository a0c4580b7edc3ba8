#include "grasp/linearize.hpp"

#include <cmath>

#include "grasp/grasp_map.hpp"
#include "grasp/kinematics.hpp"

namespace grasp {

namespace {

// joint velocity that keeps the contacts attached while the object moves
// along direction d at pose x
Eigen::Vector4d flow_rate(const Eigen::Vector4d& q, const Eigen::Vector3d& x,
                          const Eigen::Vector3d& d, double delta,
                          const HandObjectParams& params) {
    const Eigen::Matrix4d Jh = hand_jacobian(q, x, params);
    const Matrix34d G = grasp_map_world(x(2), delta, params);
    return Jh.partialPivLu().solve(G.transpose() * d);
}

}  // namespace

Eigen::Vector4d constraint_flow_joints(const Eigen::Vector4d& q,
                                       const Eigen::Vector3d& x_from,
                                       const Eigen::Vector3d& x_to, double delta,
                                       const HandObjectParams& params) {
    const Eigen::Vector3d d = x_to - x_from;
    if (d.squaredNorm() == 0.0) return q;
    const Eigen::Vector3d x_mid = x_from + 0.5 * d;
    const Eigen::Vector4d k1 = flow_rate(q, x_from, d, delta, params);
    const Eigen::Vector4d k2 = flow_rate(q + 0.5 * k1, x_mid, d, delta, params);
    const Eigen::Vector4d k3 = flow_rate(q + 0.5 * k2, x_mid, d, delta, params);
    const Eigen::Vector4d k4 = flow_rate(q + k3, x_to, d, delta, params);
    return q + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

AffinePlant linearize(const OperatingPoint& op, double delta_hat,
                      const HandObjectParams& params, double fd_step) {
    AffinePlant out;
    out.A.setZero();
    out.A.topRightCorner<3, 3>().setIdentity();

    const auto accel = [&](const Eigen::Vector3d& x_o, const Eigen::Vector3d& xdot_o) {
        const Eigen::Vector4d q =
            constraint_flow_joints(op.q, op.x_o, x_o, op.delta, params);
        return object_acceleration(q, x_o, xdot_o, op.tau, op.delta, params);
    };

    for (int j = 0; j < 6; ++j) {
        const double base = j < 3 ? op.x_o(j) : op.xdot_o(j - 3);
        const double h = fd_step * std::max(1.0, std::abs(base));
        Eigen::Vector3d xp = op.x_o;
        Eigen::Vector3d xm = op.x_o;
        Eigen::Vector3d vp = op.xdot_o;
        Eigen::Vector3d vm = op.xdot_o;
        if (j < 3) {
            xp(j) += h;
            xm(j) -= h;
        } else {
            vp(j - 3) += h;
            vm(j - 3) -= h;
        }
        out.A.block<3, 1>(3, j) = (accel(xp, vp) - accel(xm, vm)) / (2.0 * h);
    }

    const Eigen::Matrix4d Jh = hand_jacobian(op.q, op.x_o, params);
    const Matrix34d G = grasp_map_world(op.x_o(2), op.delta, params);
    const Eigen::Vector4d qdot = Jh.partialPivLu().solve(G.transpose() * op.xdot_o);
    AggregationDetail detail;
    const ObjectLevelDynamics terms =
        dynamics_terms(op.q, op.x_o, qdot, op.xdot_o, op.delta, params, &detail);
    const auto M_ldlt = terms.M.ldlt();

    const Matrix34d G_hat = grasp_map_world(op.x_o(2), delta_hat, params);
    out.B.setZero();
    out.B.bottomRows<3>() = M_ldlt.solve(G * grasp_pseudo_inverse(G_hat));

    Vector6d F;
    F.head<3>() = op.xdot_o;
    F.tail<3>() = object_acceleration(op.q, op.x_o, op.xdot_o, op.tau, op.delta, params);
    Vector6d dev;
    dev.head<3>() = op.x_o - op.x_eq;
    dev.tail<3>() = op.xdot_o;
    out.V = F - out.A * dev;
    out.V.tail<3>() -= M_ldlt.solve(detail.H.transpose() * (op.tau - op.tau_eq));
    return out;
}

AugmentedPlant augment(const AffinePlant& plant) {
    AugmentedPlant out;
    out.A.setZero();
    out.A.topLeftCorner<6, 6>() = plant.A;
    out.A.topRightCorner<6, 1>() = plant.V;
    out.B.setZero();
    out.B.topRows<6>() = plant.B;
    return out;
}

double validate_linearization(const AffinePlant& plant, const OperatingPoint& op,
                              const HandObjectParams& params, double scale) {
    const auto model_error = [&](double h) {
        double sq = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double base = j < 3 ? op.x_o(j) : op.xdot_o(j - 3);
            const double step = h * std::max(1.0, std::abs(base));
            Eigen::Vector3d x = op.x_o;
            Eigen::Vector3d v = op.xdot_o;
            if (j < 3) {
                x(j) += step;
            } else {
                v(j - 3) += step;
            }
            const Eigen::Vector4d q =
                constraint_flow_joints(op.q, op.x_o, x, op.delta, params);
            Vector6d truth;
            truth.head<3>() = v;
            truth.tail<3>() = object_acceleration(q, x, v, op.tau, op.delta, params);
            Vector6d dev;
            dev.head<3>() = x - op.x_o;
            dev.tail<3>() = v - op.xdot_o;
            Vector6d base_flow;
            base_flow.head<3>() = op.xdot_o;
            base_flow.tail<3>() =
                object_acceleration(op.q, op.x_o, op.xdot_o, op.tau, op.delta, params);
            sq += (truth - base_flow - plant.A * dev).squaredNorm();
        }
        return std::sqrt(sq);
    };

    const double coarse = model_error(scale);
    const double fine = model_error(0.5 * scale);
    if (fine <= 0.0) return 4.0;
    return coarse / fine;
}

OperatingPoint equilibrium_operating_point(const Eigen::Vector3d& pose, double delta,
                                           double lambda,
                                           const HandObjectParams& params) {
    OperatingPoint op;
    op.x_o = pose;
    op.xdot_o.setZero();
    op.delta = delta;
    op.q = inverse_kinematics(pose, delta, params);
    const Eigen::Matrix4d Jh = hand_jacobian(op.q, pose, params);
    const Eigen::Vector4d squeeze = grasp_nullspace(grasp_map(delta, params));
    op.tau = Jh.transpose() * (lambda * squeeze);
    op.x_eq = pose;
    op.tau_eq = op.tau;
    return op;
}

}  // namespace grasp

#include "grasp/dynamics.hpp"

#include <cmath>

namespace grasp {

ObjectLevelDynamics dynamics_terms(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                                   const Eigen::Vector4d& qdot, const Eigen::Vector3d& xdot_o,
                                   double delta, const HandObjectParams& params,
                                   AggregationDetail* detail) {
    const double th = x_o(2);
    const double th_dot = xdot_o(2);

    const Eigen::Matrix4d Jh = hand_jacobian(q, x_o, params);
    const Eigen::Matrix4d Jh_dot = hand_jacobian_dot(q, qdot, th, th_dot, params);
    const Eigen::Matrix4d Mh = hand_mass(params, q);
    const Eigen::Matrix4d Ch = hand_coriolis(params, q, qdot);
    const Matrix34d G = grasp_map_world(th, delta, params);

    Eigen::PartialPivLU<Eigen::Matrix4d> lu(Jh);
    const Matrix43d H = lu.solve(G.transpose());

    // d(G^T)/dt: the force columns rotate with the object, the torque column
    // is constant
    Eigen::Matrix2d Rt, W;
    Rt << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    W << 0, -1, 1, 0;
    const Eigen::Matrix<double, 2, 4> A = grasp_map(delta, params).topRows<2>();
    Matrix43d Gt_dot = Matrix43d::Zero();
    Gt_dot.leftCols<2>() = -th_dot * (A.transpose() * Rt * W);
    const Matrix43d H_dot = lu.solve(Gt_dot - Jh_dot * H);

    ObjectLevelDynamics out;
    Eigen::Matrix3d Mo = Eigen::Matrix3d::Zero();
    Mo.diagonal() << params.object_mass, params.object_mass, params.object_inertia;
    out.M = Mo + H.transpose() * Mh * H;
    out.M = 0.5 * (out.M + out.M.transpose()).eval();
    out.C = H.transpose() * (Mh * H_dot + Ch * H);
    out.N.setZero();

    if (detail) {
        detail->Jh = Jh;
        detail->Jh_dot = Jh_dot;
        detail->Mh = Mh;
        detail->Ch = Ch;
        detail->G = G;
        detail->H = H;
        detail->H_dot = H_dot;
    }
    return out;
}

Eigen::Vector3d object_acceleration(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                                    const Eigen::Vector3d& xdot_o, const Eigen::Vector4d& tau,
                                    double delta, const HandObjectParams& params) {
    AggregationDetail detail;
    // joint rates follow the object velocity through the constraint
    const Eigen::Matrix4d Jh = hand_jacobian(q, x_o, params);
    const Matrix34d G = grasp_map_world(x_o(2), delta, params);
    const Eigen::Vector4d qdot = Jh.partialPivLu().solve(G.transpose() * xdot_o);
    const ObjectLevelDynamics dyn = dynamics_terms(q, x_o, qdot, xdot_o, delta, params, &detail);
    const Eigen::Vector3d force = detail.H.transpose() * tau - dyn.C * xdot_o - dyn.N;
    return dyn.M.ldlt().solve(force);
}

Vector6d nonlinear_derivative(const Vector6d& x, const Eigen::Vector4d& tau,
                              double delta, const HandObjectParams& params) {
    const Eigen::Vector3d x_o = x.head<3>();
    const Eigen::Vector3d xdot_o = x.tail<3>();
    const Eigen::Vector4d q = inverse_kinematics(x_o, delta, params);
    Vector6d dx;
    dx.head<3>() = xdot_o;
    dx.tail<3>() = object_acceleration(q, x_o, xdot_o, tau, delta, params);
    return dx;
}

}  // namespace grasp

#pragma once
#include <Eigen/Dense>

#include "grasp/kinematics.hpp"

namespace grasp {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// object-level dynamics terms: M xdd + C xd + N = G J_h^{-T} tau
struct ObjectLevelDynamics {
    Eigen::Matrix3d M;
    Eigen::Matrix3d C;
    Eigen::Vector3d N;  // zero, gravity neglected
};

// intermediate aggregation quantities, exposed for callers that need them
struct AggregationDetail {
    Eigen::Matrix4d Jh;
    Eigen::Matrix4d Jh_dot;
    Eigen::Matrix4d Mh;
    Eigen::Matrix4d Ch;
    Matrix34d G;        // world-frame grasp map
    Matrix43d H;        // J_h^{-1} G^T, maps object velocity to joint rates
    Matrix43d H_dot;
};

// Reduce the finger dynamics onto the object coordinates through the contact
// constraint. q need not satisfy the constraint for (x_o, delta); the formula
// extends smoothly off the constraint manifold. Throws SingularityError via
// hand_jacobian.
ObjectLevelDynamics dynamics_terms(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                                   const Eigen::Vector4d& qdot, const Eigen::Vector3d& xdot_o,
                                   double delta, const HandObjectParams& params,
                                   AggregationDetail* detail = nullptr);

// Object acceleration for explicit joint state: qdot is taken as H xdot_o.
Eigen::Vector3d object_acceleration(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                                    const Eigen::Vector3d& xdot_o, const Eigen::Vector4d& tau,
                                    double delta, const HandObjectParams& params);

// Full state derivative of the coupled system in object coordinates,
// x = (x_o, xdot_o); joints are reconstructed from the contact constraint.
Vector6d nonlinear_derivative(const Vector6d& x, const Eigen::Vector4d& tau,
                              double delta, const HandObjectParams& params);

}  // namespace grasp

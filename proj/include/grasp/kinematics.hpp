#pragma once
#include <Eigen/Dense>

#include "grasp/grasp_map.hpp"
#include "grasp/params.hpp"

namespace grasp {

// Joint layout: q = (q0, q1) right finger then (q2, q3) left finger. For each
// finger the first angle is the absolute shoulder angle from world +x and the
// second the relative elbow angle (0 = straight arm).
struct JointConfig {
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    Eigen::Vector4d qdot = Eigen::Vector4d::Zero();
};

// fixed elbow branch per finger: both elbows point away from the object
inline constexpr double kElbowSign[2] = {+1.0, -1.0};

// fingertip position of one finger, world frame
Eigen::Vector2d finger_tip(const HandObjectParams& params, int finger,
                           const Eigen::Vector2d& q);

// analytic tip Jacobian and its time derivative for one finger
Eigen::Matrix2d finger_jacobian(const HandObjectParams& params, int finger,
                                const Eigen::Vector2d& q);
Eigen::Matrix2d finger_jacobian_dot(const HandObjectParams& params, int finger,
                                    const Eigen::Vector2d& q,
                                    const Eigen::Vector2d& qdot);

// joint-space mass matrix and Coriolis matrix of one finger
Eigen::Matrix2d finger_mass(const HandObjectParams& params, int finger,
                            const Eigen::Vector2d& q);
Eigen::Matrix2d finger_coriolis(const HandObjectParams& params, int finger,
                                const Eigen::Vector2d& q,
                                const Eigen::Vector2d& qdot);

// both fingertips for a full joint vector
void forward_kinematics(const HandObjectParams& params, const Eigen::Vector4d& q,
                        Eigen::Vector2d& tip_right, Eigen::Vector2d& tip_left);

// Joint angles placing the fingertips on the object contact points for pose
// x_o and contact uncertainty delta, using the fixed elbow branches. Throws
// UnreachableError when a contact lies outside a finger workspace.
Eigen::Vector4d inverse_kinematics(const Eigen::Vector3d& x_o, double delta,
                                   const HandObjectParams& params);

// Hand Jacobian: maps qdot to contact-frame velocity coordinates, ordered as
// the grasp-map columns (tangential right, normal right, tangential left,
// normal left, all in object body axes). Throws SingularityError above the
// configured condition limit.
Eigen::Matrix4d hand_jacobian(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                              const HandObjectParams& params);

// time derivative of hand_jacobian along (qdot, theta_dot)
Eigen::Matrix4d hand_jacobian_dot(const Eigen::Vector4d& q,
                                  const Eigen::Vector4d& qdot, double theta,
                                  double theta_dot,
                                  const HandObjectParams& params);

// block-diagonal joint-space mass and Coriolis matrices of the whole hand
Eigen::Matrix4d hand_mass(const HandObjectParams& params, const Eigen::Vector4d& q);
Eigen::Matrix4d hand_coriolis(const HandObjectParams& params, const Eigen::Vector4d& q,
                              const Eigen::Vector4d& qdot);

}  // namespace grasp

#pragma once
#include <Eigen/Dense>

#include "grasp/params.hpp"

namespace grasp {

using Matrix34d = Eigen::Matrix<double, 3, 4>;
using Matrix43d = Eigen::Matrix<double, 4, 3>;

// Wrench basis of the grasp in the object body frame. Columns are unit contact
// forces expressed in body coordinates: (tangential, normal) at the right
// contact (r0, 0), then (tangential, normal) at the left contact (-r0, -delta).
// delta is the translation uncertainty of the left contact along the object
// edge. Throws DomainError when delta is outside the admissible interval.
Matrix34d grasp_map(double delta, const HandObjectParams& params);

// Same wrench basis with the force rows rotated into the world frame for an
// object orientation theta. The torque row is frame invariant.
Matrix34d grasp_map_world(double theta, double delta, const HandObjectParams& params);

// Moore-Penrose right inverse; G * result = I3. Throws SingularityError when G
// loses row rank.
Matrix43d grasp_pseudo_inverse(const Matrix34d& G);

// Unit basis of the one-dimensional kernel of G, oriented so the normal-force
// components (entries 1 and 3) are positive: the squeeze direction. Throws
// SingularityError when the kernel dimension is not 1.
Eigen::Vector4d grasp_nullspace(const Matrix34d& G);

// Contact positions in the object body frame.
Eigen::Vector2d contact_body_right(const HandObjectParams& params);
Eigen::Vector2d contact_body_left(double delta, const HandObjectParams& params);

}  // namespace grasp

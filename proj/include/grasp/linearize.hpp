#pragma once
#include <Eigen/Dense>

#include "grasp/dynamics.hpp"

namespace grasp {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;

// Point the plant is linearized around, together with the equilibrium the
// deviation coordinates are measured from. q need not satisfy the contact
// constraint for (x_o, delta); sampled operating points move the joints
// freely inside their box.
struct OperatingPoint {
    Eigen::Vector3d x_o = Eigen::Vector3d::Zero();
    Eigen::Vector3d xdot_o = Eigen::Vector3d::Zero();
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    Eigen::Vector4d tau = Eigen::Vector4d::Zero();
    double delta = 0.0;

    Eigen::Vector3d x_eq = Eigen::Vector3d::Zero();   // equilibrium pose
    Eigen::Vector4d tau_eq = Eigen::Vector4d::Zero();
};

// x = (pose deviation, velocity deviation); the model is
// xdot = A x + B u + V with u the object-level control input
struct AffinePlant {
    Matrix6d A;
    Matrix63d B;
    Vector6d V;
};

// lifted form carrying the affine term as a frozen extra state
struct AugmentedPlant {
    Eigen::Matrix<double, 7, 7> A;
    Eigen::Matrix<double, 7, 3> B;
};

// Extend the joint configuration from one object pose to a nearby one by
// following the contact constraint flow along the straight pose segment.
// Coincides with inverse kinematics when q already satisfies the constraint
// at x_from, and extends smoothly when it does not.
Eigen::Vector4d constraint_flow_joints(const Eigen::Vector4d& q,
                                       const Eigen::Vector3d& x_from,
                                       const Eigen::Vector3d& x_to, double delta,
                                       const HandObjectParams& params);

// Affine plant at the operating point. Velocity rows of A are exact; the
// acceleration rows come from central differences with relative step fd_step.
// The input matrix absorbs the controller-side grasp-map estimate built from
// delta_hat. Throws SingularityError on ill-conditioned configurations.
AffinePlant linearize(const OperatingPoint& op, double delta_hat,
                      const HandObjectParams& params, double fd_step = 1e-6);

AugmentedPlant augment(const AffinePlant& plant);

// Ratio between the affine-model flow error at perturbation scale h and at
// h/2; a correct first-order model gives about 4.
double validate_linearization(const AffinePlant& plant, const OperatingPoint& op,
                              const HandObjectParams& params, double scale = 1e-3);

// Operating point at rest at the given pose, with a pure squeeze torque of
// magnitude lambda along the grasp kernel; also used as its own equilibrium
// reference.
OperatingPoint equilibrium_operating_point(const Eigen::Vector3d& pose, double delta,
                                           double lambda,
                                           const HandObjectParams& params);

}  // namespace grasp

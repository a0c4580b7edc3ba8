#include "grasp/kinematics.hpp"

#include <cmath>

namespace grasp {

namespace {

double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0) a += 2.0 * M_PI;
    return a - M_PI;
}

Eigen::Vector2d ik_finger(const Eigen::Vector2d& base, const Eigen::Vector2d& target,
                          double l1, double l2, double sigma) {
    const Eigen::Vector2d t = target - base;
    const double d2 = t.squaredNorm();
    const double ce = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if (ce > 1.0 || ce < -1.0)
        throw UnreachableError("contact target outside finger workspace");
    const double q2 = sigma * std::acos(std::clamp(ce, -1.0, 1.0));
    const double q1 = std::atan2(t.y(), t.x()) -
                      std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
    return {wrap_angle(q1), q2};
}

Eigen::Matrix2d body_axis_rows(int finger) {
    // rows select the contact coordinates from body-frame (x, y) components:
    // right contact is (+y, -x), left contact is (-y, +x)
    Eigen::Matrix2d S;
    if (finger == 0)
        S << 0, 1, -1, 0;
    else
        S << 0, -1, 1, 0;
    return S;
}

}  // namespace

Eigen::Vector2d finger_tip(const HandObjectParams& params, int finger,
                           const Eigen::Vector2d& q) {
    const double l1 = params.link_length[finger][0];
    const double l2 = params.link_length[finger][1];
    const double a = q(0), b = q(0) + q(1);
    return params.base[finger] +
           Eigen::Vector2d(l1 * std::cos(a) + l2 * std::cos(b),
                           l1 * std::sin(a) + l2 * std::sin(b));
}

Eigen::Matrix2d finger_jacobian(const HandObjectParams& params, int finger,
                                const Eigen::Vector2d& q) {
    const double l1 = params.link_length[finger][0];
    const double l2 = params.link_length[finger][1];
    const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
    const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
    Eigen::Matrix2d J;
    J << -l1 * s1 - l2 * s12, -l2 * s12,
         l1 * c1 + l2 * c12, l2 * c12;
    return J;
}

Eigen::Matrix2d finger_jacobian_dot(const HandObjectParams& params, int finger,
                                    const Eigen::Vector2d& q,
                                    const Eigen::Vector2d& qdot) {
    const double l1 = params.link_length[finger][0];
    const double l2 = params.link_length[finger][1];
    const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
    const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
    const double w1 = qdot(0), w12 = qdot(0) + qdot(1);
    Eigen::Matrix2d Jd;
    Jd << -l1 * c1 * w1 - l2 * c12 * w12, -l2 * c12 * w12,
          -l1 * s1 * w1 - l2 * s12 * w12, -l2 * s12 * w12;
    return Jd;
}

Eigen::Matrix2d finger_mass(const HandObjectParams& params, int finger,
                            const Eigen::Vector2d& q) {
    const double l1 = params.link_length[finger][0];
    const double lc1 = 0.5 * params.link_length[finger][0];
    const double lc2 = 0.5 * params.link_length[finger][1];
    const double m1 = params.link_mass[finger][0];
    const double m2 = params.link_mass[finger][1];
    const double I1 = params.link_inertia[finger][0];
    const double I2 = params.link_inertia[finger][1];
    const double a1 = m1 * lc1 * lc1 + I1 + m2 * (l1 * l1 + lc2 * lc2) + I2;
    const double a2 = m2 * l1 * lc2;
    const double a3 = m2 * lc2 * lc2 + I2;
    const double c2 = std::cos(q(1));
    Eigen::Matrix2d M;
    M << a1 + 2.0 * a2 * c2, a3 + a2 * c2,
         a3 + a2 * c2, a3;
    return M;
}

Eigen::Matrix2d finger_coriolis(const HandObjectParams& params, int finger,
                                const Eigen::Vector2d& q,
                                const Eigen::Vector2d& qdot) {
    const double l1 = params.link_length[finger][0];
    const double lc2 = 0.5 * params.link_length[finger][1];
    const double m2 = params.link_mass[finger][1];
    const double h = -m2 * l1 * lc2 * std::sin(q(1));
    Eigen::Matrix2d C;
    C << h * qdot(1), h * (qdot(0) + qdot(1)),
         -h * qdot(0), 0.0;
    return C;
}

void forward_kinematics(const HandObjectParams& params, const Eigen::Vector4d& q,
                        Eigen::Vector2d& tip_right, Eigen::Vector2d& tip_left) {
    tip_right = finger_tip(params, 0, q.head<2>());
    tip_left = finger_tip(params, 1, q.tail<2>());
}

Eigen::Vector4d inverse_kinematics(const Eigen::Vector3d& x_o, double delta,
                                   const HandObjectParams& params) {
    const double th = x_o(2);
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Vector2d p = x_o.head<2>();
    const Eigen::Vector2d cR = p + R * contact_body_right(params);
    const Eigen::Vector2d cL = p + R * contact_body_left(delta, params);
    Eigen::Vector4d q;
    q.head<2>() = ik_finger(params.base[0], cR, params.link_length[0][0],
                            params.link_length[0][1], kElbowSign[0]);
    q.tail<2>() = ik_finger(params.base[1], cL, params.link_length[1][0],
                            params.link_length[1][1], kElbowSign[1]);
    return q;
}

Eigen::Matrix4d hand_jacobian(const Eigen::Vector4d& q, const Eigen::Vector3d& x_o,
                              const HandObjectParams& params) {
    const double th = x_o(2);
    Eigen::Matrix2d Rt;
    Rt << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J.topLeftCorner<2, 2>() =
        body_axis_rows(0) * Rt * finger_jacobian(params, 0, q.head<2>());
    J.bottomRightCorner<2, 2>() =
        body_axis_rows(1) * Rt * finger_jacobian(params, 1, q.tail<2>());
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(J);
    const auto& s = svd.singularValues();
    if (!(s(3) > 0) || s(0) / s(3) > params.jacobian_cond_limit)
        throw SingularityError("hand Jacobian near singular");
    return J;
}

Eigen::Matrix4d hand_jacobian_dot(const Eigen::Vector4d& q,
                                  const Eigen::Vector4d& qdot, double theta,
                                  double theta_dot,
                                  const HandObjectParams& params) {
    Eigen::Matrix2d Rt;
    Rt << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    // d(R^T)/dt = -theta_dot * R^T * W with W the unit spin matrix
    Eigen::Matrix2d W;
    W << 0, -1, 1, 0;
    const Eigen::Matrix2d Rt_dot = -theta_dot * Rt * W;
    Eigen::Matrix4d Jd = Eigen::Matrix4d::Zero();
    Jd.topLeftCorner<2, 2>() =
        body_axis_rows(0) *
        (Rt_dot * finger_jacobian(params, 0, q.head<2>()) +
         Rt * finger_jacobian_dot(params, 0, q.head<2>(), qdot.head<2>()));
    Jd.bottomRightCorner<2, 2>() =
        body_axis_rows(1) *
        (Rt_dot * finger_jacobian(params, 1, q.tail<2>()) +
         Rt * finger_jacobian_dot(params, 1, q.tail<2>(), qdot.tail<2>()));
    return Jd;
}

Eigen::Matrix4d hand_mass(const HandObjectParams& params, const Eigen::Vector4d& q) {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    M.topLeftCorner<2, 2>() = finger_mass(params, 0, q.head<2>());
    M.bottomRightCorner<2, 2>() = finger_mass(params, 1, q.tail<2>());
    return M;
}

Eigen::Matrix4d hand_coriolis(const HandObjectParams& params, const Eigen::Vector4d& q,
                              const Eigen::Vector4d& qdot) {
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
    C.topLeftCorner<2, 2>() = finger_coriolis(params, 0, q.head<2>(), qdot.head<2>());
    C.bottomRightCorner<2, 2>() = finger_coriolis(params, 1, q.tail<2>(), qdot.tail<2>());
    return C;
}

}  // namespace grasp

#include "grasp/grasp_map.hpp"

#include <cmath>

namespace grasp {

Matrix34d grasp_map(double delta, const HandObjectParams& params) {
    if (delta < params.delta_min || delta > params.delta_max)
        throw DomainError("delta outside admissible interval");
    const double r0 = params.r0;
    Matrix34d G;
    G << 0, -1, 0, 1,
         1, 0, -1, 0,
         r0, 0, r0, delta;
    return G;
}

Matrix34d grasp_map_world(double theta, double delta, const HandObjectParams& params) {
    Matrix34d G = grasp_map(delta, params);
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta),
         std::sin(theta), std::cos(theta);
    G.topRows<2>() = (R * G.topRows<2>()).eval();
    return G;
}

Matrix43d grasp_pseudo_inverse(const Matrix34d& G) {
    Eigen::JacobiSVD<Matrix34d> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(2) < 1e-12 * s(0))
        throw SingularityError("grasp map lost row rank");
    return svd.solve(Eigen::Matrix3d::Identity());
}

Eigen::Vector4d grasp_nullspace(const Matrix34d& G) {
    Eigen::JacobiSVD<Matrix34d> svd(G, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(2) < 1e-12 * s(0))
        throw SingularityError("kernel dimension exceeds 1");
    Eigen::Vector4d n = svd.matrixV().col(3);
    if (n(1) + n(3) < 0) n = -n;
    return n;
}

Eigen::Vector2d contact_body_right(const HandObjectParams& params) {
    return {params.r0, 0.0};
}

Eigen::Vector2d contact_body_left(double delta, const HandObjectParams& params) {
    return {-params.r0, -delta};
}

}  // namespace grasp

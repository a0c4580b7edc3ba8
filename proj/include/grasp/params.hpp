#pragma once
#include <Eigen/Dense>

#include "grasp/errors.hpp"

namespace grasp {

// Physical description of the planar two-finger hand and the grasped object.
// All quantities are SI (m, kg, s, rad); config files may use mm/g/deg and are
// converted on load. Finger 0 is the right finger (base on +x), finger 1 the
// left. Link centers of mass sit at mid-link.
struct HandObjectParams {
    Eigen::Vector2d base[2] = {{0.035, 0.0}, {-0.035, 0.0}};
    double link_length[2][2] = {{0.045, 0.045}, {0.045, 0.045}};
    double link_mass[2][2] = {{0.05, 0.05}, {0.05, 0.05}};
    // inertia about the link center of mass
    double link_inertia[2][2] = {{8.4375e-6, 8.4375e-6}, {8.4375e-6, 8.4375e-6}};

    double object_mass = 0.02;
    double object_inertia = 6.208333333333333e-6;
    // half of the object width; the two nominal contacts sit at body-frame
    // x = +r0 (right) and x = -r0 (left)
    double r0 = 0.0175;

    double mu_f = 0.8;    // friction coefficient at the contacts
    double f_min = 0.5;   // minimum admissible normal force, N

    // admissible interval of the contact translation uncertainty
    double delta_min = -0.004;
    double delta_max = 0.005;

    // J_h is treated as singular above this condition number
    double jacobian_cond_limit = 1e10;

    void validate() const {
        for (int f = 0; f < 2; ++f)
            for (int l = 0; l < 2; ++l)
                if (link_length[f][l] <= 0 || link_mass[f][l] <= 0 ||
                    link_inertia[f][l] <= 0)
                    throw DomainError("link parameters must be strictly positive");
        if (object_mass <= 0 || object_inertia <= 0)
            throw DomainError("object mass and inertia must be strictly positive");
        if (r0 <= 0) throw DomainError("r0 must be strictly positive");
        if (mu_f <= 0) throw DomainError("mu_f must be strictly positive");
        if (f_min < 0) throw DomainError("f_min must be non-negative");
        if (delta_min > delta_max) throw DomainError("empty delta interval");
        if (!(base[0] - base[1]).allFinite())
            throw DomainError("base positions must be finite");
    }
};

}  // namespace grasp

#pragma once
#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "grasp/sdp.hpp"

namespace grasp {

// closed-loop pole region: half-plane left of -alpha, disc of radius r,
// damping cone of half-angle theta about the negative real axis
struct DRegion {
    double alpha = 0.5;
    double r = 7.0;
    double theta = 0.5235987755982988;  // 30 degrees, damping ratio cos(theta)

    void validate() const;
};

// P and gamma shape the certificate, Y carries the gain
struct DecisionVars {
    Eigen::MatrixXd P;
    Eigen::MatrixXd Y;
    double gamma = 0.0;
};

struct Controller {
    Eigen::MatrixXd gain;
    Eigen::MatrixXd P;
    Eigen::MatrixXd Y;
    double gamma = 0.0;
    std::uint64_t scenario_seed = 0;
    DRegion region;
    double delta_hat = 0.0;  // gap estimate the design assumed
};

// packed variable layout: P upper triangle column-major, Y column-major,
// gamma last
int num_decision_vars(int n, int m);
Eigen::VectorXd pack_decision_vars(const DecisionVars& vars);
DecisionVars unpack_decision_vars(const Eigen::VectorXd& x, int n, int m);

// constraint matrices evaluated at the given variables, each required to sit
// below gamma I: decay, radius, cone, and positivity of P
std::array<Eigen::MatrixXd, 4> dregion_blocks(const Eigen::MatrixXd& A,
                                              const Eigen::MatrixXd& B,
                                              const DRegion& region,
                                              const DecisionVars& vars);

// max eigenvalue of each block minus gamma I; all nonpositive means the
// variables certify this plant
Eigen::VectorXd evaluate_constraint(const DecisionVars& vars, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const DRegion& region);

// L_c = Y P^-1; requires P positive definite
Eigen::MatrixXd recover_gain(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y);

struct PoleCheck {
    bool inside = false;
    std::vector<double> margins;  // per pole, negative when inside
};

PoleCheck pole_region_check(const Eigen::MatrixXd& A_cl, const DRegion& region);

// affine constraint blocks over the packed variables, normalized to
// f(vars) + eta I <= 0 form for the cone solver

// the three plant-dependent blocks of one scenario
void append_scenario_blocks(SdpProblem& problem, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const DRegion& region,
                            double eta = 1e-9);

// the plant-independent positivity block -P - gamma I
void append_common_blocks(SdpProblem& problem, int n, int m, double eta = 1e-9);

// P <= mu I, conditioning cap on the certificate
void append_certificate_cap(SdpProblem& problem, int n, int m, double mu);

// spectral-norm cap [[ -mu I, Y ], [ Y^T, -mu I ]] <= 0
void append_gain_cap(SdpProblem& problem, int n, int m, double mu);

}  // namespace grasp

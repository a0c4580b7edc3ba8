#pragma once
#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <ctime>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "grasp/linearize.hpp"
#include "grasp/lmi.hpp"
#include "grasp/params.hpp"
#include "grasp/sample_bounds.hpp"
#include "grasp/sdp.hpp"

namespace grasp {

// sampled coordinate order: q1..q4, px, py, ptheta, vx, vy, omega, delta
inline constexpr int kScenarioCoords = 11;
extern const std::array<const char*, kScenarioCoords> kScenarioCoordNames;

// scenario joint angles describe each finger in its own frame; the left
// finger's frame is mirrored, so its shoulder reflects across the vertical
// and its elbow flips sign in the world convention of the kinematics.
// The map is an involution, so it also converts world angles back.
Eigen::Vector4d reflect_left_finger(const Eigen::Vector4d& q);

struct Scenario {
    Eigen::Vector4d q = Eigen::Vector4d::Zero();  // per-finger frames
    Eigen::Vector3d x_o = Eigen::Vector3d::Zero();
    Eigen::Vector3d xdot_o = Eigen::Vector3d::Zero();
    double delta = 0.0;

    Eigen::Matrix<double, kScenarioCoords, 1> coords() const;
    static Scenario from_coords(const Eigen::Matrix<double, kScenarioCoords, 1>& c);
};

struct BoxCoordinate {
    double lo = 0.0;
    double hi = 0.0;
    bool frozen = false;
    double nominal = 0.0;  // value used while frozen
};

struct UncertaintyBox {
    std::array<BoxCoordinate, kScenarioCoords> coords;

    int free_count() const;  // dimension the sampling actually explores
    void validate() const;

    // joint-angle, grasp-height, and gap uncertainty of the standard protocol
    static UncertaintyBox experiment_default();
    // joint-angle uncertainty only; gap and object pose pinned at nominal
    static UncertaintyBox experiment_restricted();
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::uint64_t seed = 0;
    std::time_t generated_at = 0;  // bookkeeping only, never serialized
};

ScenarioSet draw_scenarios(const UncertaintyBox& box, int N, std::uint64_t seed);

// decision count entering the sample bounds: sym(P) + Y entries, the scale
// variable excluded
int scenario_decision_count(int n, int m);

struct LipschitzEstimate {
    double L_A = 0.0;
    double L_B = 0.0;
    int skipped = 0;  // singular draws left out of the maximum
};

using PlantFn =
    std::function<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>(const Scenario&)>;

// max finite-difference slope of the plant pair over K sampled scenario
// pairs, inflated by a fixed safety factor; pair k reuses draws 2k and 2k+1
// of draw_scenarios(box, 2K, seed)
LipschitzEstimate estimate_plant_lipschitz(const UncertaintyBox& box, int K,
                                           std::uint64_t seed, const PlantFn& plant);

LipschitzEstimate estimate_dynamics_lipschitz(const UncertaintyBox& box, int K,
                                              std::uint64_t seed,
                                              const HandObjectParams& params,
                                              double delta_hat = 0.0);

struct OptimalityConfig {
    double epsilon = 0.99;
    double beta = 0.999;
    double mu = 1e4;              // shared bound on the certificate and gain
    double L_A = 0.0;
    double L_B = 0.0;
    LipschitzLmi block_constants; // from lipschitz_lmi(mu, theta, L_A, L_B)
    int n_xi = 6;
    double alpha_tight = 0.0;     // L * epsilon^(1/n_xi)

    void validate() const;
};

// filled by empirical_violation
struct ViolationEstimate {
    double rate = 0.0;
    Interval ci;
    int violations = 0;
    int samples = 0;
};

struct ScenarioCertificate {
    double epsilon = 0.0;
    double beta = 0.0;
    int decision_count = 0;
    int sample_count = 0;
    long sample_requirement = 0;        // bound for (epsilon, beta) at this count
    double alpha_tight = 0.0;           // zero in plain feasibility designs
    double worst_training_margin = 0.0;
    std::optional<ViolationEstimate> violation;
};

struct ScpOptions {
    double delta_hat = 0.0;  // gap the controller assumes when inverting the grasp
    double eta = 1e-9;
    double gamma_min = -1e6;
    double gamma_max = -1e-9;
    double var_bound = 1e6;
    double mu_feas = 1e4;    // certificate cap keeping the scale ray bounded
    double epsilon = 0.5;
    double beta = 1e-3;
    Eigen::Vector3d x_eq_pose = Eigen::Vector3d(0.0, 0.0665, 0.0);
    SdpSolveOptions sdp;
};

struct ScpResult {
    SdpStatus status = SdpStatus::numerical_failure;
    Controller controller;
    ScenarioCertificate certificate;
    SdpSolution solution;
    DecisionVars vars;
};

// operating point a scenario induces: at rest with zero torque (internal
// squeeze cannot accelerate the object), equilibrium reference at the
// option pose, joints converted to the world convention
OperatingPoint scenario_operating_point(const Scenario& s,
                                        const HandObjectParams& params,
                                        const Eigen::Vector3d& x_eq_pose);

// shared certificate over all scenario plants; the returned gamma is the
// constraint level the design was certified at, not a minimized one
ScpResult solve_feasibility_scp(const ScenarioSet& set, const DRegion& region,
                                const HandObjectParams& params,
                                const ScpOptions& options = {});

// tightened variant with certificate and gain caps at mu; every training
// constraint clears the level by at least the tightening
ScpResult solve_optimality_scp(const ScenarioSet& set, const DRegion& region,
                               const HandObjectParams& params,
                               const OptimalityConfig& cfg,
                               const ScpOptions& options = {});

// same machinery fed a deterministic gap grid at the fixed equilibrium pose
ScpResult solve_grid_baseline(const std::vector<double>& delta_grid,
                              const DRegion& region, const HandObjectParams& params,
                              const ScpOptions& options = {});

std::vector<double> uniform_grid(double lo, double hi, int count);

// fraction of M fresh draws on which the controller's certificate fails some
// block, with a Clopper-Pearson 95% interval
ViolationEstimate empirical_violation(const ScpResult& design, const UncertaintyBox& box,
                                      int M, std::uint64_t seed,
                                      const HandObjectParams& params);

}  // namespace grasp

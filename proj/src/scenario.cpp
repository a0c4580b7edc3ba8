#include "grasp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grasp/dynamics.hpp"
#include "grasp/errors.hpp"
#include "grasp/kinematics.hpp"
#include "grasp/rng.hpp"

namespace grasp {

const std::array<const char*, kScenarioCoords> kScenarioCoordNames = {
    "q1", "q2", "q3", "q4", "px", "py", "ptheta", "vx", "vy", "omega", "delta"};

Eigen::Matrix<double, kScenarioCoords, 1> Scenario::coords() const {
    Eigen::Matrix<double, kScenarioCoords, 1> c;
    c.segment<4>(0) = q;
    c.segment<3>(4) = x_o;
    c.segment<3>(7) = xdot_o;
    c(10) = delta;
    return c;
}

Scenario Scenario::from_coords(const Eigen::Matrix<double, kScenarioCoords, 1>& c) {
    Scenario s;
    s.q = c.segment<4>(0);
    s.x_o = c.segment<3>(4);
    s.xdot_o = c.segment<3>(7);
    s.delta = c(10);
    return s;
}

int UncertaintyBox::free_count() const {
    int n = 0;
    for (const BoxCoordinate& c : coords)
        if (!c.frozen) ++n;
    return n;
}

void UncertaintyBox::validate() const {
    for (int i = 0; i < kScenarioCoords; ++i) {
        const BoxCoordinate& c = coords[i];
        if (!(c.lo <= c.hi))
            throw DomainError("scenario: box interval empty for " +
                              std::string(kScenarioCoordNames[i]));
        if (c.nominal < c.lo || c.nominal > c.hi)
            throw DomainError("scenario: nominal outside interval for " +
                              std::string(kScenarioCoordNames[i]));
    }
    if (free_count() < 1) throw DomainError("scenario: box has no free coordinate");
}

UncertaintyBox UncertaintyBox::experiment_default() {
    UncertaintyBox b;
    const auto free = [&](int i, double lo, double hi, double nominal) {
        b.coords[i] = BoxCoordinate{lo, hi, false, nominal};
    };
    const auto pin = [&](int i, double v) {
        b.coords[i] = BoxCoordinate{v, v, true, v};
    };
    // finger joints, each finger described in its own frame
    free(0, 0.6632, 0.9250, 0.5 * (0.6632 + 0.9250));
    free(1, 1.1170, 1.7453, 0.5 * (1.1170 + 1.7453));
    free(2, 0.6632, 0.9250, 0.5 * (0.6632 + 0.9250));
    free(3, 1.0472, 1.7453, 0.5 * (1.0472 + 1.7453));
    pin(4, 0.0);                      // px
    free(5, 0.0365, 0.0665, 0.0665);  // py, nominal at the grasp height
    pin(6, 0.0);                      // ptheta
    pin(7, 0.0);                      // vx
    pin(8, 0.0);                      // vy
    pin(9, 0.0);                      // omega
    free(10, -0.004, 0.005, 0.0);     // delta
    return b;
}

UncertaintyBox UncertaintyBox::experiment_restricted() {
    UncertaintyBox b = experiment_default();
    b.coords[5].frozen = true;   // py at nominal
    b.coords[10].frozen = true;  // delta at nominal
    return b;
}

Eigen::Vector4d reflect_left_finger(const Eigen::Vector4d& q) {
    constexpr double pi = 3.14159265358979323846;
    return Eigen::Vector4d(q(0), q(1), pi - q(2), -q(3));
}

ScenarioSet draw_scenarios(const UncertaintyBox& box, int N, std::uint64_t seed) {
    if (N < 1) throw DomainError("scenario: sample count must be positive");
    box.validate();
    ScenarioSet out;
    out.seed = seed;
    out.generated_at = std::time(nullptr);
    out.scenarios.reserve(static_cast<std::size_t>(N));
    RandomStream rs(seed);
    for (int i = 0; i < N; ++i) {
        Eigen::Matrix<double, kScenarioCoords, 1> c;
        for (int j = 0; j < kScenarioCoords; ++j) {
            const BoxCoordinate& bc = box.coords[j];
            // every coordinate owns a counter slot whether or not it is
            // frozen, so freezing one leaves the others' draws unchanged
            const std::uint64_t idx =
                static_cast<std::uint64_t>(i) * kScenarioCoords + j;
            c(j) = bc.frozen ? bc.nominal : rs.uniform(idx, bc.lo, bc.hi);
        }
        out.scenarios.push_back(Scenario::from_coords(c));
    }
    return out;
}

int scenario_decision_count(int n, int m) {
    if (n < 1 || m < 1) throw DomainError("scenario: bad plant dimensions");
    return n * (n + 1) / 2 + n * m;
}

namespace {

double spectral_norm(const Eigen::MatrixXd& M) {
    return M.jacobiSvd().singularValues()(0);
}

}  // namespace

LipschitzEstimate estimate_plant_lipschitz(const UncertaintyBox& box, int K,
                                           std::uint64_t seed, const PlantFn& plant) {
    if (K < 2) throw DomainError("scenario: need at least two probe pairs");
    const ScenarioSet draws = draw_scenarios(box, 2 * K, seed);
    LipschitzEstimate est;
    double slope_A = 0.0;
    double slope_B = 0.0;
    for (int k = 0; k < K; ++k) {
        const Scenario& a = draws.scenarios[2 * k];
        const Scenario& b = draws.scenarios[2 * k + 1];
        const double dist = (a.coords() - b.coords()).norm();
        if (dist < 1e-15) continue;
        std::pair<Eigen::MatrixXd, Eigen::MatrixXd> pa, pb;
        try {
            pa = plant(a);
            pb = plant(b);
        } catch (const SingularityError&) {
            ++est.skipped;
            continue;
        } catch (const UnreachableError&) {
            ++est.skipped;
            continue;
        }
        slope_A = std::max(slope_A, spectral_norm(pa.first - pb.first) / dist);
        slope_B = std::max(slope_B, spectral_norm(pa.second - pb.second) / dist);
    }
    est.L_A = 1.5 * slope_A;
    est.L_B = 1.5 * slope_B;
    return est;
}

LipschitzEstimate estimate_dynamics_lipschitz(const UncertaintyBox& box, int K,
                                              std::uint64_t seed,
                                              const HandObjectParams& params,
                                              double delta_hat) {
    const Eigen::Vector3d x_eq_pose = ScpOptions{}.x_eq_pose;
    const PlantFn plant = [&params, delta_hat, x_eq_pose](const Scenario& s) {
        const OperatingPoint op = scenario_operating_point(s, params, x_eq_pose);
        const AffinePlant pl = linearize(op, delta_hat, params);
        return std::make_pair(Eigen::MatrixXd(pl.A), Eigen::MatrixXd(pl.B));
    };
    return estimate_plant_lipschitz(box, K, seed, plant);
}

void OptimalityConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("scenario: epsilon must be in (0,1)");
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("scenario: beta must be in (0,1)");
    if (!(mu > 0.0)) throw DomainError("scenario: mu must be positive");
    if (n_xi < 1) throw DomainError("scenario: n_xi must be at least 1");
    if (!(alpha_tight >= 0.0) || !std::isfinite(alpha_tight))
        throw DomainError("scenario: alpha_tight must be finite and nonnegative");
    if (L_A < 0.0 || L_B < 0.0)
        throw DomainError("scenario: Lipschitz constants must be nonnegative");
}

OperatingPoint scenario_operating_point(const Scenario& s,
                                        const HandObjectParams&,
                                        const Eigen::Vector3d& x_eq_pose) {
    // design points sit at rest with zero torque: internal squeeze lives in
    // the grasp-map kernel and never accelerates the object, so the plant
    // family varies only through the input map
    OperatingPoint op;
    op.q = reflect_left_finger(s.q);
    op.x_o = s.x_o;
    op.xdot_o = s.xdot_o;
    op.delta = s.delta;
    op.x_eq = x_eq_pose;
    op.tau.setZero();
    op.tau_eq.setZero();
    return op;
}

namespace {

// shared assembly behind the feasibility, optimality, and grid designs;
// tightening shifts only the scenario blocks, the caps are spectral bounds
ScpResult run_scp(const ScenarioSet& set, const DRegion& region,
                  const HandObjectParams& params, const ScpOptions& options,
                  double tightening, double cap, bool gain_cap) {
    if (set.scenarios.empty()) throw DomainError("scenario: empty scenario set");

    ScpResult out;
    // no pole satisfies both the decay and the radius bound
    if (!(region.r > region.alpha)) {
        out.status = SdpStatus::infeasible;
        return out;
    }
    region.validate();

    const int n = 6;
    const int m = 3;
    const int nv = num_decision_vars(n, m);

    SdpProblem prob;
    prob.num_vars = nv;
    // pure feasibility search; any interior point of the LMI system is a
    // valid design, and the level variable stays part of the certificate
    prob.objective = Eigen::VectorXd::Zero(nv);
    prob.lower = Eigen::VectorXd::Constant(nv, -options.var_bound);
    prob.upper = Eigen::VectorXd::Constant(nv, options.var_bound);
    prob.lower(nv - 1) = options.gamma_min;
    prob.upper(nv - 1) = options.gamma_max;

    std::vector<std::pair<Matrix6d, Matrix63d>> plants;
    plants.reserve(set.scenarios.size());
    for (const Scenario& s : set.scenarios) {
        const OperatingPoint op = scenario_operating_point(s, params, options.x_eq_pose);
        const AffinePlant pl = linearize(op, options.delta_hat, params);
        append_scenario_blocks(prob, pl.A, pl.B, region, options.eta + tightening);
        plants.emplace_back(pl.A, pl.B);
    }
    append_common_blocks(prob, n, m, options.eta);
    append_certificate_cap(prob, n, m, cap);
    if (gain_cap) append_gain_cap(prob, n, m, cap);

    out.solution = solve_sdp(prob, options.sdp);
    out.status = out.solution.status;
    if (out.status != SdpStatus::optimal) return out;

    out.vars = unpack_decision_vars(out.solution.x, n, m);
    out.controller.P = out.vars.P;
    out.controller.Y = out.vars.Y;
    out.controller.gamma = out.vars.gamma;
    out.controller.gain = recover_gain(out.vars.P, out.vars.Y);
    out.controller.scenario_seed = set.seed;
    out.controller.region = region;
    out.controller.delta_hat = options.delta_hat;

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [A, B] : plants)
        worst = std::max(worst,
                         evaluate_constraint(out.vars, A, B, region).maxCoeff());
    out.certificate.worst_training_margin = worst;
    return out;
}

}  // namespace

ScpResult solve_feasibility_scp(const ScenarioSet& set, const DRegion& region,
                                const HandObjectParams& params,
                                const ScpOptions& options) {
    ScpResult out = run_scp(set, region, params, options, 0.0, options.mu_feas, false);
    out.certificate.epsilon = options.epsilon;
    out.certificate.beta = options.beta;
    out.certificate.decision_count = scenario_decision_count(6, 3);
    out.certificate.sample_count = static_cast<int>(set.scenarios.size());
    out.certificate.sample_requirement = sample_size_feasibility(
        options.epsilon, options.beta, out.certificate.decision_count);
    out.certificate.alpha_tight = 0.0;
    return out;
}

ScpResult solve_optimality_scp(const ScenarioSet& set, const DRegion& region,
                               const HandObjectParams& params,
                               const OptimalityConfig& cfg,
                               const ScpOptions& options) {
    cfg.validate();
    ScpResult out =
        run_scp(set, region, params, options, cfg.alpha_tight, cfg.mu, true);
    out.certificate.epsilon = cfg.epsilon;
    out.certificate.beta = cfg.beta;
    out.certificate.decision_count = scenario_decision_count(6, 3);
    out.certificate.sample_count = static_cast<int>(set.scenarios.size());
    out.certificate.sample_requirement =
        cfg.block_constants.L > 0.0
            ? sample_size_optimality(cfg.epsilon, cfg.beta, cfg.n_xi,
                                     cfg.block_constants.L,
                                     out.certificate.decision_count)
                  .N
            : 0;
    out.certificate.alpha_tight = cfg.alpha_tight;
    return out;
}

ScpResult solve_grid_baseline(const std::vector<double>& delta_grid,
                              const DRegion& region, const HandObjectParams& params,
                              const ScpOptions& options) {
    if (delta_grid.empty()) throw DomainError("scenario: empty gap grid");
    ScenarioSet set;
    set.seed = 0;
    set.generated_at = std::time(nullptr);
    set.scenarios.reserve(delta_grid.size());
    for (const double delta : delta_grid) {
        Scenario s;
        s.q = reflect_left_finger(inverse_kinematics(options.x_eq_pose, delta, params));
        s.x_o = options.x_eq_pose;
        s.xdot_o.setZero();
        s.delta = delta;
        set.scenarios.push_back(s);
    }
    ScpResult out = run_scp(set, region, params, options, 0.0, options.mu_feas, false);
    out.certificate.decision_count = scenario_decision_count(6, 3);
    out.certificate.sample_count = static_cast<int>(delta_grid.size());
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
    if (count < 1) throw DomainError("scenario: grid needs at least one point");
    if (!(lo <= hi)) throw DomainError("scenario: grid interval empty");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        g.push_back(0.5 * (lo + hi));
        return g;
    }
    for (int i = 0; i + 1 < count; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
    g.push_back(hi);
    return g;
}

ViolationEstimate empirical_violation(const ScpResult& design, const UncertaintyBox& box,
                                      int M, std::uint64_t seed,
                                      const HandObjectParams& params) {
    if (M < 1) throw DomainError("scenario: need at least one evaluation draw");
    if (design.vars.P.size() == 0)
        throw DomainError("scenario: design carries no certificate");
    const Eigen::Vector3d x_eq_pose = ScpOptions{}.x_eq_pose;
    const ScenarioSet fresh = draw_scenarios(box, M, seed);
    int violations = 0;
    for (const Scenario& s : fresh.scenarios) {
        bool bad = false;
        try {
            const OperatingPoint op = scenario_operating_point(s, params, x_eq_pose);
            const AffinePlant pl = linearize(op, design.controller.delta_hat, params);
            bad = evaluate_constraint(design.vars, pl.A, pl.B,
                                      design.controller.region)
                      .maxCoeff() > 0.0;
        } catch (const SingularityError&) {
            bad = true;
        } catch (const UnreachableError&) {
            bad = true;
        }
        if (bad) ++violations;
    }
    ViolationEstimate est;
    est.samples = M;
    est.violations = violations;
    est.rate = static_cast<double>(violations) / static_cast<double>(M);
    est.ci = clopper_pearson(violations, M);
    return est;
}

}  // namespace grasp

#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

namespace grasp {

// affine symmetric-matrix constraint F0 + sum_i x_i coeff[i], required
// negative semidefinite
struct LmiBlock {
    Eigen::MatrixXd F0;
    std::vector<Eigen::MatrixXd> coeff;

    int dim() const { return static_cast<int>(F0.rows()); }
    Eigen::MatrixXd at(const Eigen::VectorXd& x) const;
};

// minimize objective . x subject to every block being negative semidefinite
// and the variables staying inside their (possibly infinite) box
struct SdpProblem {
    int num_vars = 0;
    Eigen::VectorXd objective;
    std::vector<LmiBlock> blocks;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    void validate() const;
};

enum class SdpStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SdpStatus status);

struct SdpSolveOptions {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    int max_iter = 2000;
    bool parallel = true;
};

struct SdpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    SdpStatus status = SdpStatus::numerical_failure;
    double primal_residual = 0.0;  // max constraint eigenvalue at x
    double solve_seconds = 0.0;
    int iterations = 0;
};

// Barrier interior-point solve. Iterates stay strictly inside the cone, so an
// optimal status always comes with a nonpositive primal residual; the residual
// itself is recomputed with a dense eigenvalue decomposition independent of
// the factorizations the solver iterates on.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpSolveOptions& opts = {});

// max eigenvalue over all constraint blocks at x (the quantity tol_feas bounds)
double max_constraint_eigenvalue(const SdpProblem& problem, const Eigen::VectorXd& x);

// line-oriented sparse dump for offline inspection: header, objective entries,
// then one line per nonzero of each block matrix
std::string dump_problem(const SdpProblem& problem);

namespace detail {

// coefficients conjugated by the inverse Cholesky factor of the slack,
// out[i] = L^-1 coeff[i] L^-T; parallel over i
void transform_coefficients(const Eigen::LLT<Eigen::MatrixXd>& slack_llt,
                            const std::vector<Eigen::MatrixXd>& coeff,
                            std::vector<Eigen::MatrixXd>& out, bool parallel);

// barrier gradient and Hessian contribution of one block given transformed
// coefficients: g_i += tr(Ft[i]), H_ik += <Ft[i], Ft[k]>. Parallel over the
// independent entries of the upper triangle, so threaded and serial runs
// produce identical floating-point results.
void accumulate_block_terms(const std::vector<Eigen::MatrixXd>& Ft,
                            Eigen::VectorXd& grad, Eigen::MatrixXd& hess,
                            bool parallel);

}  // namespace detail

}  // namespace grasp

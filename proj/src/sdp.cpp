#include "grasp/sdp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "grasp/errors.hpp"

#ifdef SCENGRASP_HAVE_OPENMP
#include <omp.h>
#endif

namespace grasp {

Eigen::MatrixXd LmiBlock::at(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd M = F0;
    for (int i = 0; i < static_cast<int>(coeff.size()); ++i) M += x(i) * coeff[i];
    return M;
}

void SdpProblem::validate() const {
    if (num_vars <= 0) throw DomainError("sdp: no decision variables");
    if (objective.size() != num_vars) throw DomainError("sdp: objective size mismatch");
    if (lower.size() != num_vars || upper.size() != num_vars)
        throw DomainError("sdp: box bound size mismatch");
    for (int i = 0; i < num_vars; ++i)
        if (!(lower(i) <= upper(i))) throw DomainError("sdp: empty box interval");
    for (const LmiBlock& b : blocks) {
        if (b.F0.rows() != b.F0.cols()) throw DomainError("sdp: block not square");
        if (static_cast<int>(b.coeff.size()) != num_vars)
            throw DomainError("sdp: block coefficient count mismatch");
        const double scale = std::max(1.0, b.F0.norm());
        if ((b.F0 - b.F0.transpose()).norm() > 1e-10 * scale)
            throw DomainError("sdp: block constant not symmetric");
        for (const Eigen::MatrixXd& C : b.coeff) {
            if (C.rows() != b.F0.rows() || C.cols() != b.F0.cols())
                throw DomainError("sdp: block coefficient shape mismatch");
            if ((C - C.transpose()).norm() > 1e-10 * std::max(1.0, C.norm()))
                throw DomainError("sdp: block coefficient not symmetric");
        }
    }
}

const char* to_string(SdpStatus status) {
    switch (status) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::unbounded: return "unbounded";
        case SdpStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

double max_constraint_eigenvalue(const SdpProblem& problem, const Eigen::VectorXd& x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const LmiBlock& b : problem.blocks) {
        Eigen::MatrixXd M = b.at(x);
        M = 0.5 * (M + M.transpose().eval());
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                                Eigen::EigenvaluesOnly);
        worst = std::max(worst, es.eigenvalues().maxCoeff());
    }
    return worst;
}

std::string dump_problem(const SdpProblem& problem) {
    std::ostringstream os;
    os.precision(17);
    os << "sdp " << problem.num_vars << " " << problem.blocks.size() << "\n";
    for (int i = 0; i < problem.num_vars; ++i) {
        if (problem.objective(i) != 0.0) os << "c " << i << " " << problem.objective(i) << "\n";
        if (std::isfinite(problem.lower(i))) os << "l " << i << " " << problem.lower(i) << "\n";
        if (std::isfinite(problem.upper(i))) os << "u " << i << " " << problem.upper(i) << "\n";
    }
    for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
        const LmiBlock& b = problem.blocks[j];
        os << "block " << j << " " << b.dim() << "\n";
        const auto dump_matrix = [&](int term, const Eigen::MatrixXd& M) {
            for (int r = 0; r < M.rows(); ++r)
                for (int c = r; c < M.cols(); ++c)
                    if (M(r, c) != 0.0)
                        os << "e " << j << " " << term << " " << r << " " << c << " "
                           << M(r, c) << "\n";
        };
        dump_matrix(0, b.F0);
        for (int i = 0; i < problem.num_vars; ++i) dump_matrix(i + 1, b.coeff[i]);
    }
    return os.str();
}

namespace detail {

void transform_coefficients(const Eigen::LLT<Eigen::MatrixXd>& slack_llt,
                            const std::vector<Eigen::MatrixXd>& coeff,
                            std::vector<Eigen::MatrixXd>& out, bool parallel) {
    const int n = static_cast<int>(coeff.size());
    out.resize(n);
#ifdef SCENGRASP_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd half = slack_llt.matrixL().solve(coeff[i]);
        Eigen::MatrixXd full = slack_llt.matrixL().solve(half.transpose()).transpose();
        out[i] = 0.5 * (full + full.transpose().eval());
    }
    (void)parallel;
}

void accumulate_block_terms(const std::vector<Eigen::MatrixXd>& Ft,
                            Eigen::VectorXd& grad, Eigen::MatrixXd& hess,
                            bool parallel) {
    const int n = static_cast<int>(Ft.size());
#ifdef SCENGRASP_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int i = 0; i < n; ++i) grad(i) += Ft[i].trace();

    // each upper-triangle entry is an independent job with a single writer,
    // so the threaded result is bitwise equal to the serial one
    const int entries = n * (n + 1) / 2;
#ifdef SCENGRASP_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int t = 0; t < entries; ++t) {
        int i = static_cast<int>((std::sqrt(8.0 * t + 1.0) - 1.0) / 2.0);
        while ((i + 1) * (i + 2) / 2 <= t) ++i;
        while (i * (i + 1) / 2 > t) --i;
        const int k = t - i * (i + 1) / 2;
        const double v = Ft[i].cwiseProduct(Ft[k]).sum();
        hess(i, k) += v;
        if (i != k) hess(k, i) += v;
    }
    (void)parallel;
}

}  // namespace detail

namespace {

constexpr double kDivergeLimit = 1e13;

// view over the problem's blocks in equilibrated coordinates: variable i of
// the original problem is colscale(i) times the working variable, and block
// j is divided by blockscale[j]; when slack is set a trailing variable is
// subtracted on every working-block diagonal.  Nothing is copied per block.
struct BarrierProblem {
    const std::vector<LmiBlock>* blocks = nullptr;
    bool slack = false;
    Eigen::VectorXd colscale;
    std::vector<double> blockscale;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd c;
    bool parallel = false;

    int base_vars() const {
        return static_cast<int>(c.size()) - (slack ? 1 : 0);
    }

    Eigen::MatrixXd block_at(std::size_t j, const Eigen::VectorXd& x) const {
        const LmiBlock& b = (*blocks)[j];
        Eigen::MatrixXd M = b.F0;
        for (int i = 0; i < base_vars(); ++i)
            if (x(i) != 0.0) M += (colscale(i) * x(i)) * b.coeff[i];
        M /= blockscale[j];
        if (slack) M.diagonal().array() -= x(x.size() - 1);
        return M;
    }

    int barrier_degree() const {
        int m = 0;
        for (const LmiBlock& b : *blocks) m += b.dim();
        for (int i = 0; i < lower.size(); ++i) {
            if (std::isfinite(lower(i))) ++m;
            if (std::isfinite(upper(i))) ++m;
        }
        return m;
    }
};

bool strictly_inside_box(const BarrierProblem& bp, const Eigen::VectorXd& x) {
    for (int i = 0; i < x.size(); ++i) {
        if (std::isfinite(bp.lower(i)) && x(i) <= bp.lower(i)) return false;
        if (std::isfinite(bp.upper(i)) && x(i) >= bp.upper(i)) return false;
    }
    return true;
}

// barrier value, +inf outside the strict interior
double barrier_value(const BarrierProblem& bp, const Eigen::VectorXd& x) {
    const double inf = std::numeric_limits<double>::infinity();
    if (!strictly_inside_box(bp, x)) return inf;
    double phi = 0.0;
    for (std::size_t j = 0; j < bp.blocks->size(); ++j) {
        Eigen::MatrixXd S = -bp.block_at(j, x);
        S = 0.5 * (S + S.transpose().eval());
        const Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) return inf;
        double logdet = 0.0;
        for (int i = 0; i < S.rows(); ++i) {
            const double d = llt.matrixLLT()(i, i);
            if (!(d > 0.0)) return inf;
            logdet += std::log(d);
        }
        phi -= 2.0 * logdet;
    }
    for (int i = 0; i < x.size(); ++i) {
        if (std::isfinite(bp.lower(i))) phi -= std::log(x(i) - bp.lower(i));
        if (std::isfinite(bp.upper(i))) phi -= std::log(bp.upper(i) - x(i));
    }
    return phi;
}

// gradient and Hessian of the barrier at a strictly feasible x
bool barrier_derivatives(const BarrierProblem& bp, const Eigen::VectorXd& x,
                         Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    const int n = static_cast<int>(x.size());
    grad.setZero(n);
    hess.setZero(n, n);
    std::vector<Eigen::MatrixXd> Ft;
    for (std::size_t j = 0; j < bp.blocks->size(); ++j) {
        const LmiBlock& b = (*bp.blocks)[j];
        Eigen::MatrixXd S = -bp.block_at(j, x);
        S = 0.5 * (S + S.transpose().eval());
        const Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) return false;
        detail::transform_coefficients(llt, b.coeff, Ft, bp.parallel);
        // fold the equilibration into the transformed coefficients so the
        // derivatives are those of the working-variable problem
        const double inv_bs = 1.0 / bp.blockscale[j];
        for (int i = 0; i < bp.base_vars(); ++i)
            Ft[static_cast<std::size_t>(i)] *= bp.colscale(i) * inv_bs;
        if (bp.slack) {
            // same congruence as the stored coefficients, applied to -I
            const int d = b.dim();
            const Eigen::MatrixXd W =
                llt.matrixL().solve(Eigen::MatrixXd::Identity(d, d));
            Ft.push_back(-W * W.transpose());
        }
        detail::accumulate_block_terms(Ft, grad, hess, bp.parallel);
    }
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(bp.lower(i))) {
            const double d = x(i) - bp.lower(i);
            grad(i) -= 1.0 / d;
            hess(i, i) += 1.0 / (d * d);
        }
        if (std::isfinite(bp.upper(i))) {
            const double d = bp.upper(i) - x(i);
            grad(i) += 1.0 / d;
            hess(i, i) += 1.0 / (d * d);
        }
    }
    return true;
}

enum class CenterOutcome { converged, interrupted, stalled, budget_exhausted, diverged };

// loose centering tolerance for intermediate rungs of the path; the duality
// gap bound only needs a tight center at the rung where it is claimed
constexpr double kLooseDecrement = 0.05;
constexpr double kTightDecrement = 2e-11;

// damped Newton descent on t * c.x + barrier(x).  Runs until the squared
// Newton decrement falls below tol_dec2 or the shared step budget runs out;
// a returned `converged` therefore always means a point centered to the
// requested tolerance.  The stop predicate is checked at every iterate so a
// phase-one search can end at the first point it accepts instead of
// finishing the centering.
template <typename Stop>
CenterOutcome center(const BarrierProblem& bp, double t, Eigen::VectorXd& x,
                     int& newton_used, int newton_budget, double tol_dec2, Stop stop) {
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    // relative Levenberg damping carried across iterations; stays zero while
    // full Newton steps keep passing the descent test, and decays once the
    // undamped direction starts winning again
    double lm = 0.0;
    while (true) {
        if (stop(x)) return CenterOutcome::interrupted;
        if (!barrier_derivatives(bp, x, grad, hess)) return CenterOutcome::stalled;
        const Eigen::VectorXd psi_grad = t * bp.c + grad;
        // box terms spread the Hessian diagonal over many orders once a
        // coordinate approaches its bound; factoring in Jacobi-scaled form
        // keeps the weakly curved directions above the roundoff floor of a
        // raw factorization
        const Eigen::VectorXd dinv =
            hess.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd hs = dinv.asDiagonal() * hess * dinv.asDiagonal();
        hs.diagonal().array() += 1e-13;
        const Eigen::VectorXd gs = dinv.cwiseProduct(psi_grad);
        const Eigen::VectorXd dxs = hs.ldlt().solve((-gs).eval());
        if (!dxs.allFinite()) return CenterOutcome::stalled;
        // the convergence certificate always uses the undamped decrement
        const double decrement_sq = -gs.dot(dxs);
        // a decrement below the rounding noise of the merit evaluation cannot
        // be verified by any descent test, so it counts as centered
        const double psi0 = t * bp.c.dot(x) + barrier_value(bp, x);
        const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                                   (1.0 + std::abs(psi0));
        if (decrement_sq <= std::max(tol_dec2, noise_floor))
            return CenterOutcome::converged;

        // candidate step one: the Newton direction with a backtracking
        // descent test, the right move wherever the quadratic model holds
        const double slope_newton = gs.dot(dxs);
        double psi_bt = std::numeric_limits<double>::infinity();
        double alpha_bt = 0.0;
        Eigen::VectorXd x_bt;
        for (double alpha = 1.0; alpha > 1e-13; alpha *= 0.5) {
            const Eigen::VectorXd cand = x + alpha * dinv.cwiseProduct(dxs);
            const double psi = t * bp.c.dot(cand) + barrier_value(bp, cand);
            if (std::isfinite(psi) && psi <= psi0 + 0.25 * alpha * slope_newton) {
                psi_bt = psi;
                alpha_bt = alpha;
                x_bt = cand;
                break;
            }
        }

        // candidate step two, tried only when the full Newton step was
        // rejected: a Levenberg-damped full step.  Down a long shallow
        // valley the damped direction advances by the bend rate the merit
        // supports, where a shortened Newton step only creeps.
        double psi_lm = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_lm;
        if (alpha_bt < 1.0) {
            double cand_lm = lm == 0.0 ? 1e-10 : lm;
            for (int tries = 0; tries < 40; ++tries) {
                Eigen::MatrixXd hd = hs;
                hd.diagonal().array() += cand_lm;
                const Eigen::VectorXd ds = hd.ldlt().solve((-gs).eval());
                if (ds.allFinite()) {
                    const double slope = gs.dot(ds);
                    const Eigen::VectorXd cand = x + dinv.cwiseProduct(ds);
                    const double psi = t * bp.c.dot(cand) + barrier_value(bp, cand);
                    if (std::isfinite(psi) && psi <= psi0 + 0.25 * slope) {
                        psi_lm = psi;
                        x_lm = cand;
                        lm = cand_lm;
                        break;
                    }
                }
                cand_lm *= 32.0;
                if (cand_lm > 1e14) break;
            }
        }

        if (psi_lm < psi_bt) {
            x = x_lm;
        } else if (std::isfinite(psi_bt)) {
            x = x_bt;
            // only a clean full Newton step says the quadratic model is back;
            // a shortened one that merely outran the damped candidate does not
            if (alpha_bt == 1.0) lm = lm < 4e-13 ? 0.0 : 0.25 * lm;
        } else {
            return decrement_sq <= 16.0 * noise_floor ? CenterOutcome::converged
                                                      : CenterOutcome::stalled;
        }
        if (++newton_used >= newton_budget) return CenterOutcome::budget_exhausted;
        if (x.cwiseAbs().maxCoeff() > kDivergeLimit) return CenterOutcome::diverged;
    }
}

struct PathResult {
    CenterOutcome outcome = CenterOutcome::converged;
    bool early_stop = false;
};

// follow the central path until the barrier gap certificate meets tol_gap
// relative to the objective, or stop_early accepts the iterate
template <typename EarlyStop>
PathResult follow_path(const BarrierProblem& bp, Eigen::VectorXd& x, double tol_gap,
                       int& newton_used, int newton_budget, EarlyStop stop_early) {
    const double m = static_cast<double>(bp.barrier_degree());

    // start where the objective pull and the barrier gradient are comparable;
    // a colder start spends hundreds of steps centering rungs whose objective
    // weight is negligible
    double t = 1.0;
    {
        const double cmax = bp.c.cwiseAbs().maxCoeff();
        Eigen::VectorXd g;
        Eigen::MatrixXd h;
        if (cmax > 0.0 && barrier_derivatives(bp, x, g, h))
            t = std::min(std::max(1.0, g.cwiseAbs().maxCoeff() / cmax), 1e8);
    }

    PathResult res;
    for (int outer = 0; outer < 80; ++outer) {
        res.outcome =
            center(bp, t, x, newton_used, newton_budget, kLooseDecrement, stop_early);
        if (res.outcome == CenterOutcome::interrupted) {
            res.outcome = CenterOutcome::converged;
            res.early_stop = true;
            return res;
        }
        if (res.outcome != CenterOutcome::converged) return res;
        if (m / t <= tol_gap * std::max(1.0, std::abs(bp.c.dot(x)))) {
            res.outcome = center(bp, t, x, newton_used, newton_budget,
                                 kTightDecrement, stop_early);
            if (res.outcome == CenterOutcome::interrupted) {
                res.outcome = CenterOutcome::converged;
                res.early_stop = true;
            }
            return res;
        }
        t *= 10.0;
    }
    return res;
}

Eigen::VectorXd initial_box_point(const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper) {
    Eigen::VectorXd x(lower.size());
    for (int i = 0; i < lower.size(); ++i) {
        const bool lo = std::isfinite(lower(i));
        const bool hi = std::isfinite(upper(i));
        if (lo && hi) {
            // a same-sign box spanning decades is a log-scale quantity; its
            // arithmetic midpoint sits at the extreme end of the range
            if (lower(i) * upper(i) > 0.0)
                x(i) = (lower(i) > 0.0 ? 1.0 : -1.0) * std::sqrt(lower(i) * upper(i));
            else
                x(i) = 0.5 * (lower(i) + upper(i));
        } else if (lo)
            x(i) = lower(i) + 1.0;
        else if (hi)
            x(i) = upper(i) - 1.0;
        else
            x(i) = 0.0;
    }
    return x;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpSolveOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();
    problem.validate();

    SdpSolution sol;
    int newton_used = 0;
    const auto finish = [&](SdpStatus status, const Eigen::VectorXd& x) {
        sol.status = status;
        sol.x = x;
        sol.iterations = newton_used;
        sol.objective = problem.objective.dot(x);
        sol.primal_residual = problem.blocks.empty()
                                  ? 0.0
                                  : max_constraint_eigenvalue(problem, x);
        sol.solve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        if (status == SdpStatus::optimal && sol.primal_residual > opts.tol_feas)
            sol.status = SdpStatus::numerical_failure;
        return sol;
    };

    // one round of equilibration: bring every variable's largest coefficient,
    // then every block, to unit size.  The Newton decrement is affine
    // invariant, so this changes nothing in exact arithmetic; it keeps the
    // factorizations and the Hessian ridge proportionate in floating point
    // when coefficient magnitudes span many orders.
    Eigen::VectorXd colmax = Eigen::VectorXd::Zero(problem.num_vars);
    for (const LmiBlock& b : problem.blocks)
        for (int i = 0; i < problem.num_vars; ++i)
            colmax(i) = std::max(colmax(i), b.coeff[i].cwiseAbs().maxCoeff());
    Eigen::VectorXd colscale(problem.num_vars);
    for (int i = 0; i < problem.num_vars; ++i)
        colscale(i) = colmax(i) > 0.0 ? 1.0 / colmax(i) : 1.0;
    std::vector<double> blockscale(problem.blocks.size(), 1.0);
    for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
        const LmiBlock& b = problem.blocks[j];
        double m = b.F0.cwiseAbs().maxCoeff();
        for (int i = 0; i < problem.num_vars; ++i)
            m = std::max(m, colscale(i) * b.coeff[i].cwiseAbs().maxCoeff());
        if (m > 0.0) blockscale[j] = m;
    }

    BarrierProblem base;
    base.parallel = opts.parallel;
    base.blocks = &problem.blocks;
    base.colscale = colscale;
    base.blockscale = blockscale;
    base.lower = problem.lower.cwiseQuotient(colscale);
    base.upper = problem.upper.cwiseQuotient(colscale);
    base.c = problem.objective.cwiseProduct(colscale);

    const auto unscaled = [&](const Eigen::VectorXd& v) {
        return colscale.cwiseProduct(v.head(problem.num_vars)).eval();
    };

    Eigen::VectorXd w = initial_box_point(base.lower, base.upper);

    // phase one: drive the worst working-block eigenvalue strictly negative
    // by minimizing a shared slack shift
    double shift0 = 0.0;
    if (!problem.blocks.empty()) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
            Eigen::MatrixXd M = base.block_at(j, w);
            M = 0.5 * (M + M.transpose().eval());
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                M, Eigen::EigenvaluesOnly);
            worst = std::max(worst, es.eigenvalues().maxCoeff());
        }
        shift0 = worst + 1.0;
    }
    if (!problem.blocks.empty() && shift0 > 1.0 - 1e-12) {
        BarrierProblem phase1 = base;
        phase1.slack = true;
        const int n1 = problem.num_vars + 1;
        phase1.lower.conservativeResize(n1);
        phase1.upper.conservativeResize(n1);
        phase1.lower(n1 - 1) = -(std::abs(shift0) + 1e6);
        phase1.upper(n1 - 1) = shift0 + 10.0;
        phase1.c = Eigen::VectorXd::Zero(n1);
        phase1.c(n1 - 1) = 1.0;

        Eigen::VectorXd y(n1);
        y.head(problem.num_vars) = w;
        y(n1 - 1) = shift0;
        const auto feasible_enough = [&](const Eigen::VectorXd& cur) {
            // the sweep over every block is the expensive half of a Newton
            // step; the slack cannot certify a margin while it is positive
            if (cur(cur.size() - 1) >= 0.0) return false;
            return max_constraint_eigenvalue(problem, unscaled(cur)) <= -1e-9;
        };
        const PathResult pr = follow_path(phase1, y, 1e-6, newton_used, opts.max_iter,
                                          feasible_enough);
        w = y.head(problem.num_vars);
        if (pr.outcome == CenterOutcome::budget_exhausted ||
            pr.outcome == CenterOutcome::stalled || pr.outcome == CenterOutcome::diverged)
            return finish(SdpStatus::numerical_failure, unscaled(w));
        if (!pr.early_stop && !feasible_enough(y))
            return finish(SdpStatus::infeasible, unscaled(w));
    }

    // a zero objective asks for nothing beyond feasibility, and w is a
    // strictly feasible point already
    if (problem.objective.isZero(0.0))
        return finish(SdpStatus::optimal, unscaled(w));

    // phase two: follow the central path of the actual objective
    const PathResult pr = follow_path(base, w, opts.tol_gap, newton_used,
                                      opts.max_iter,
                                      [](const Eigen::VectorXd&) { return false; });
    switch (pr.outcome) {
        case CenterOutcome::converged: return finish(SdpStatus::optimal, unscaled(w));
        case CenterOutcome::diverged: return finish(SdpStatus::unbounded, unscaled(w));
        case CenterOutcome::budget_exhausted:
        case CenterOutcome::stalled:
            return finish(SdpStatus::numerical_failure, unscaled(w));
    }
    return finish(SdpStatus::numerical_failure, unscaled(w));
}

}  // namespace grasp

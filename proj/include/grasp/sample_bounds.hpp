#pragma once

namespace grasp {

// P[Bin(N, eps) <= d-1], i.e. the sum of the first d binomial terms.
// Computed in log space; good to ~1e-13 relative for N up to ~1e7.
double binomial_tail(long N, double eps, long d);

// Minimal N with binomial_tail(N, eps, d) <= beta.
// Exponential bracketing then binary search; the tail is non-increasing in N.
long sample_size_feasibility(double eps, double beta, long d);

struct OptimalitySampleSize {
  long N = 0;
  double alpha_tight = 0.0;  // constraint tightening L_xi * eps^(1/n_xi)
  double p_net = 0.0;        // (eps / L_xi)^n_xi fed to the tail bound
  bool clamped = false;      // p_net fell outside (0,1) and was clamped
};

// Sample size for the optimality-level guarantee: N(p_net, beta) with
// p_net = (eps/L_xi)^n_xi, plus the tightening constant.
OptimalitySampleSize sample_size_optimality(double eps, double beta, int n_xi,
                                            double L_xi, long d);

struct LipschitzLmi {
  double L1 = 0.0;  // decay-rate block
  double L2 = 0.0;  // disk block
  double L3 = 0.0;  // sector block
  double L = 0.0;   // stacked constraint (max over blocks)
};

// Closed-form Lipschitz constants of the three region blocks with respect to
// the plant pair, for variables bounded by ||P|| <= mu, ||Y|| <= mu.
// theta is the sector half-angle in radians.
LipschitzLmi lipschitz_lmi(double mu, double theta, double L_A, double L_B);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Two-sided Clopper-Pearson interval for k successes in n trials.
Interval clopper_pearson(long k, long n, double confidence = 0.95);

// Regularized incomplete beta I_x(a, b). Exposed so tests can cross-check
// binomial_tail through the beta identity.
double reg_inc_beta(double a, double b, double x);

}  // namespace grasp

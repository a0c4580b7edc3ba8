#include "grasp/sample_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace grasp {

double binomial_tail(long N, double eps, long d) {
  if (d < 1) throw std::invalid_argument("binomial_tail: d must be >= 1");
  if (N < d) throw std::invalid_argument("binomial_tail: need N >= d");
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("binomial_tail: eps outside [0,1]");
  if (eps == 0.0) return 1.0;
  if (eps == 1.0) return 0.0;

  const long k = d - 1;
  const long double le = std::log(static_cast<long double>(eps));
  const long double l1e = std::log1p(static_cast<long double>(-eps));
  const long double lgN = std::lgammal(static_cast<long double>(N) + 1.0L);

  std::vector<long double> lt(static_cast<std::size_t>(k) + 1);
  long double lmax = -1e30L;
  for (long i = 0; i <= k; ++i) {
    const long double l = lgN - std::lgammal(static_cast<long double>(i) + 1.0L)
                        - std::lgammal(static_cast<long double>(N - i) + 1.0L)
                        + static_cast<long double>(i) * le
                        + static_cast<long double>(N - i) * l1e;
    lt[static_cast<std::size_t>(i)] = l;
    lmax = std::max(lmax, l);
  }
  long double s = 0.0L;
  for (long i = 0; i <= k; ++i) s += std::exp(lt[static_cast<std::size_t>(i)] - lmax);
  const long double r = std::exp(lmax) * s;
  return static_cast<double>(std::min(r, 1.0L));
}

long sample_size_feasibility(double eps, double beta, long d) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
  if (d < 1) throw std::invalid_argument("d must be >= 1");

  long hi = d;
  if (binomial_tail(hi, eps, d) <= beta) return hi;
  long lo = hi;
  while (binomial_tail(hi, eps, d) > beta) {
    lo = hi;
    if (hi > (1L << 40)) throw std::runtime_error("sample size search diverged");
    hi *= 2;
  }
  while (lo + 1 < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (binomial_tail(mid, eps, d) <= beta)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

OptimalitySampleSize sample_size_optimality(double eps, double beta, int n_xi,
                                            double L_xi, long d) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must be in (0,1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
  if (n_xi < 1) throw std::invalid_argument("n_xi must be >= 1");
  if (!(L_xi > 0.0)) throw std::invalid_argument("L_xi must be > 0");

  OptimalitySampleSize out;
  double p = std::pow(eps / L_xi, static_cast<double>(n_xi));
  if (p >= 1.0) {
    p = 1.0 - 1e-12;
    out.clamped = true;
  } else if (p <= 0.0) {
    p = 1e-300;
    out.clamped = true;
  }
  out.p_net = p;
  out.alpha_tight = L_xi * std::pow(eps, 1.0 / static_cast<double>(n_xi));
  const double b = std::min(beta, 1.0 - 1e-15);
  out.N = sample_size_feasibility(p, b, d);
  return out;
}

LipschitzLmi lipschitz_lmi(double mu, double theta, double L_A, double L_B) {
  if (!(mu > 0.0) || L_A < 0.0 || L_B < 0.0 || !(L_A + L_B > 0.0))
    throw std::invalid_argument("lipschitz_lmi: need mu > 0 and L_A + L_B > 0");
  if (!(theta > 0.0 && theta < M_PI / 2))
    throw std::invalid_argument("lipschitz_lmi: theta must be in (0, pi/2)");
  LipschitzLmi out;
  const double base = mu * (L_A + L_B);
  const double trig = std::fabs(std::sin(theta)) + std::fabs(std::cos(theta));
  out.L1 = 2.0 * base;
  out.L2 = base;
  out.L3 = 2.0 * base * trig;
  out.L = 2.0 * base * std::max(1.0, trig);
  return out;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

Interval clopper_pearson(long k, long n, double confidence) {
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("clopper_pearson: bad k/n");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must be in (0,1)");
  const double alpha = 1.0 - confidence;

  auto beta_quantile = [](double a, double b, double q) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (reg_inc_beta(a, b, mid) < q)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  Interval out;
  out.lo = (k == 0) ? 0.0
                    : beta_quantile(static_cast<double>(k),
                                    static_cast<double>(n - k + 1), alpha / 2.0);
  out.hi = (k == n) ? 1.0
                    : beta_quantile(static_cast<double>(k + 1),
                                    static_cast<double>(n - k), 1.0 - alpha / 2.0);
  return out;
}

}  // namespace grasp

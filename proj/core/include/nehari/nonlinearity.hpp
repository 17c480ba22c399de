#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nehari/expr.hpp"

namespace nehari {

// Pointwise nonlinearity f(x,t) that is asymptotically linear in t: the slope
// ratio(x,t) = f(x,t)/t (extended continuously by alpha(x) at t = 0) is
// nondecreasing in |t| with limits alpha(x) at 0 and eta(x) at +-infinity.
// F is the primitive of f in t with F(x,0) = 0, and beta(x) is the limit of
// f(x,t) t / 2 - F(x,t) as |t| -> infinity, which may be +infinity.
class Nonlinearity {
 public:
  virtual ~Nonlinearity() = default;

  virtual double f(const Point& x, double t) const = 0;
  virtual double F(const Point& x, double t) const = 0;
  virtual double ratio(const Point& x, double t) const = 0;
  virtual double alpha(const Point& x) const = 0;
  virtual double eta(const Point& x) const = 0;
  virtual double beta(const Point& x) const = 0;

  // Defect f(x,t) t / 2 - F(x,t), the quantity whose |t| -> infinity limit is
  // beta(x).  The default evaluates the difference literally, which loses all
  // precision once the eta t^2 / 2 bulk of both terms dwarfs the O(beta)
  // result; families override it with a cancellation-free closed form.
  virtual double gap(const Point& x, double t) const {
    return 0.5 * f(x, t) * t - F(x, t);
  }

  // False for user-supplied kernels whose beta must be probed numerically.
  virtual bool has_analytic_beta() const { return true; }
  virtual bool is_odd() const = 0;
  virtual std::string name() const = 0;
  // Canonical parameter string for config digests and reports.
  virtual std::string describe() const = 0;
};

// f(x,t) = t * (alpha + (eta - alpha) t^2/(1+t^2)).  The slope interpolates
// smoothly between alpha at 0 and eta at infinity; f t / 2 - F diverges
// logarithmically, so beta is +infinity wherever eta > alpha.
class SmoothSaturation final : public Nonlinearity {
 public:
  SmoothSaturation(Weight alpha, Weight eta);

  double f(const Point& x, double t) const override;
  double F(const Point& x, double t) const override;
  double ratio(const Point& x, double t) const override;
  double gap(const Point& x, double t) const override;
  double alpha(const Point& x) const override { return alpha_(x); }
  double eta(const Point& x) const override { return eta_(x); }
  double beta(const Point& x) const override;
  bool is_odd() const override { return true; }
  std::string name() const override { return "smooth_saturation"; }
  std::string describe() const override;

 private:
  Weight alpha_;
  Weight eta_;
};

// f(x,t) = eta t - c t (1+t^2)^{-3/2} with 0 < c <= essinf eta.  The slope
// rises from alpha = eta - c to eta so fast that f t / 2 - F converges:
// beta = c exactly, the prototypical finite-beta (strong resonance) kernel.
class StrongResonance final : public Nonlinearity {
 public:
  StrongResonance(Weight eta, double c);

  double f(const Point& x, double t) const override;
  double F(const Point& x, double t) const override;
  double ratio(const Point& x, double t) const override;
  double gap(const Point& x, double t) const override;
  double alpha(const Point& x) const override { return eta_(x) - c_; }
  double eta(const Point& x) const override { return eta_(x); }
  double beta(const Point&) const override { return c_; }
  bool is_odd() const override { return true; }
  std::string name() const override { return "strong_resonance"; }
  std::string describe() const override;

  double c() const noexcept { return c_; }

 private:
  Weight eta_;
  double c_;
};

struct F1Witness {
  Point x;
  double t1;
  double t2;
  std::string what;
};

struct F1Report {
  bool passed = true;
  long checks = 0;
  std::vector<F1Witness> failures;  // capped; first witnesses in scan order
};

// Symmetric log-spaced |t| grid over [1e-3, 1e3], both signs, zero excluded.
std::vector<double> default_t_grid();

// Verifies the asymptotic-linearity hypotheses on sample points and a t-grid:
// ratio nondecreasing in |t| (strictly increasing where alpha < eta), the
// limits alpha at 0 and eta at +-1e6 (within limit_tol), alpha >= 0,
// eta >= alpha, and three structural consequences used downstream:
// f t / 2 - F increasing in |t|, F/t^2 increasing in |t|, and
// f/t > 2 F / t^2 for t != 0.
F1Report validate_f1(const Nonlinearity& nl, std::span<const Point> xs,
                     std::span<const double> t_grid, double limit_tol = 1e-6);

// Limit of f t / 2 - F at x.  Uses the family's analytic value when
// available; otherwise probes at t_probe and 2 t_probe, declaring +infinity
// on sustained growth and otherwise returning the first-order Richardson
// extrapolation of the two probes.
double beta_pointwise(const Nonlinearity& nl, const Point& x, double t_probe = 1e6);

}  // namespace nehari

#include "nehari/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// s - log1p(s) without cancellation for small s >= 0.
double sub_log1p(double s) {
  if (s < 1e-4) {
    // series: s^2/2 - s^3/3 + s^4/4 - ...
    return s * s * (0.5 + s * (-1.0 / 3.0 + s * (0.25 - s / 5.0)));
  }
  return s - std::log1p(s);
}

// t^2 / (1 + t^2), saturating safely for huge t.
double saturation(double t) {
  const double t2 = t * t;
  if (!std::isfinite(t2)) return 1.0;
  return t2 / (1.0 + t2);
}

// 1 - (1+t^2)^{-1/2} in a cancellation-free form.
double one_minus_invsqrt1p(double t2) {
  if (!std::isfinite(t2)) return 1.0;
  const double r = std::sqrt(1.0 + t2);
  return t2 / (r * (1.0 + r));
}

}  // namespace

SmoothSaturation::SmoothSaturation(Weight alpha, Weight eta)
    : alpha_(std::move(alpha)), eta_(std::move(eta)) {
  if (alpha_.is_constant() && alpha_.constant_value() < 0.0)
    throw ModelError("smooth_saturation: alpha must be nonnegative");
  if (alpha_.is_constant() && eta_.is_constant() &&
      !(eta_.constant_value() > alpha_.constant_value()))
    throw ModelError("smooth_saturation: eta must exceed alpha");
}

double SmoothSaturation::ratio(const Point& x, double t) const {
  const double a = alpha_(x);
  return a + (eta_(x) - a) * saturation(t);
}

double SmoothSaturation::f(const Point& x, double t) const {
  return t * ratio(x, t);
}

double SmoothSaturation::F(const Point& x, double t) const {
  const double a = alpha_(x);
  const double t2 = t * t;
  return 0.5 * a * t2 + 0.5 * (eta_(x) - a) * sub_log1p(t2);
}

double SmoothSaturation::gap(const Point& x, double t) const {
  // f t / 2 - F = (eta - alpha)/2 * (log(1 + t^2) - t^2/(1 + t^2)): the
  // alpha t^2 / 2 bulk cancels in closed form, so nothing is lost to
  // round-off at large |t|.
  const double y = t * t;
  double h;
  if (y < 1e-4) {
    // log(1+y) - y/(1+y) = y^2/2 - 2y^3/3 + 3y^4/4 - ...
    h = y * y * (0.5 + y * (-2.0 / 3.0 + y * (0.75 - 0.8 * y)));
  } else if (y <= 1.0) {
    h = std::log1p(y) - y / (1.0 + y);
  } else {
    // log(1+y) = log y + log1p(1/y) avoids overflow for huge t.
    const double inv = 1.0 / y;
    h = std::log(y) + std::log1p(inv) - 1.0 / (1.0 + inv);
  }
  return 0.5 * (eta_(x) - alpha_(x)) * h;
}

double SmoothSaturation::beta(const Point& x) const {
  return eta_(x) > alpha_(x) ? kInf : 0.0;
}

std::string SmoothSaturation::describe() const {
  return "smooth_saturation(alpha=" + alpha_.describe() + ",eta=" + eta_.describe() + ")";
}

StrongResonance::StrongResonance(Weight eta, double c) : eta_(std::move(eta)), c_(c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ModelError("strong_resonance: c must be positive and finite");
  if (eta_.is_constant() && c > eta_.constant_value())
    throw ModelError("strong_resonance: c must not exceed the infimum of eta");
}

double StrongResonance::ratio(const Point& x, double t) const {
  const double t2 = t * t;
  const double w = std::isfinite(t2) ? std::pow(1.0 + t2, -1.5) : 0.0;
  return eta_(x) - c_ * w;
}

double StrongResonance::f(const Point& x, double t) const {
  return t * ratio(x, t);
}

double StrongResonance::F(const Point& x, double t) const {
  const double t2 = t * t;
  return 0.5 * eta_(x) * t2 - c_ * one_minus_invsqrt1p(t2);
}

double StrongResonance::gap(const Point&, double t) const {
  // f t / 2 - F = c (1 - w - t^2 w^3 / 2) with w = (1+t^2)^{-1/2}; the eta
  // part cancels in closed form and the remainder factors into the pure
  // product c s^2 (w + 2) / (2 (1 + w)^2) with s = t^2/(1+t^2), so the value
  // is accurate at every magnitude of t.
  const double t2 = t * t;
  const double s = 1.0 / (1.0 + 1.0 / t2);  // t = 0 gives 1/inf = 0
  const double w = 1.0 / std::sqrt(1.0 + t2);
  return c_ * s * s * (w + 2.0) / (2.0 * (1.0 + w) * (1.0 + w));
}

std::string StrongResonance::describe() const {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c_);
  return "strong_resonance(eta=" + eta_.describe() + ",c=" + std::string(buf) + ")";
}

std::vector<double> default_t_grid() {
  std::vector<double> pos;
  const int per_decade = 12;
  const double lo = 1e-3, hi = 1e3;
  const int steps = static_cast<int>(per_decade * std::log10(hi / lo));
  pos.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i)
    pos.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
  std::vector<double> grid;
  grid.reserve(2 * pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
  for (double t : pos) grid.push_back(t);
  return grid;
}

namespace {

void record(F1Report& rep, const Point& x, double t1, double t2, const char* what) {
  rep.passed = false;
  if (rep.failures.size() < 16) rep.failures.push_back({x, t1, t2, what});
}

}  // namespace

F1Report validate_f1(const Nonlinearity& nl, std::span<const Point> xs,
                     std::span<const double> t_grid, double limit_tol) {
  F1Report rep;
  if (xs.empty()) throw ModelError("validate_f1: no sample points");
  if (t_grid.size() < 4) throw ModelError("validate_f1: t grid too small");

  std::vector<double> pos;
  for (double t : t_grid)
    if (t > 0.0) pos.push_back(t);
  std::sort(pos.begin(), pos.end());
  if (pos.empty() || pos.back() < 999.0)
    throw ModelError("validate_f1: t grid must reach 1e3");

  for (const Point& x : xs) {
    const double a = nl.alpha(x);
    const double e = nl.eta(x);
    const double scale = 1.0 + std::fabs(a) + std::fabs(e);
    const double tol = 1e-12 * scale;

    if (!(a >= 0.0)) record(rep, x, 0, 0, "alpha(x) < 0");
    if (!(e >= a)) record(rep, x, 0, 0, "eta(x) < alpha(x)");
    if (!std::isfinite(e)) record(rep, x, 0, 0, "eta(x) not finite");
    ++rep.checks;

    // Limits of the slope at zero and at +-1e6.
    if (std::fabs(nl.ratio(x, 0.0) - a) > tol)
      record(rep, x, 0, 0, "ratio(x,0) != alpha(x)");
    for (double s : {-1e6, 1e6})
      if (std::fabs(nl.ratio(x, s) - e) > limit_tol * (1.0 + std::fabs(e)))
        record(rep, x, s, s, "ratio at |t|=1e6 missed eta(x)");
    ++rep.checks;

    const bool strict_band = a + 1e-12 * scale < e;

    // Odd symmetry of f when the family claims it.
    if (nl.is_odd()) {
      for (double t : {0.37, 2.0, 41.5}) {
        const double fp = nl.f(x, t), fm = nl.f(x, -t);
        if (std::fabs(fp + fm) > 1e-12 * (1.0 + std::fabs(fp)))
          record(rep, x, -t, t, "f not odd");
        ++rep.checks;
      }
    }

    double prev_t = 0.0;
    double prev_ratio = nl.ratio(x, 0.0);
    double prev_g = 0.0;       // f t / 2 - F at prev_t
    double prev_q = a;         // 2 F / t^2 limit at 0 is alpha
    bool have_prev_q = false;  // start comparisons once t > 0

    for (double t : pos) {
      const double r = nl.ratio(x, t);
      const double Ft = nl.F(x, t);
      const double g = nl.gap(x, t);
      const double q = 2.0 * Ft / (t * t);

      // Slope monotone nondecreasing in |t|; strict on the moderate band
      // when the limits actually separate.
      if (r < prev_ratio - tol)
        record(rep, x, prev_t, t, "ratio decreasing in |t|");
      else if (strict_band && t >= 1e-2 && t <= 1e2 && prev_t >= 1e-2 && !(r > prev_ratio))
        record(rep, x, prev_t, t, "ratio not strictly increasing");

      // f t / 2 - F increasing in |t|.
      if (g < prev_g - tol)
        record(rep, x, prev_t, t, "f t/2 - F decreasing in |t|");

      // 2 F / t^2 increasing in |t| (value at 0+ is alpha).
      if (have_prev_q && q < prev_q - tol)
        record(rep, x, prev_t, t, "F/t^2 decreasing in |t|");

      // Slope strictly above the mean slope 2F/t^2 away from zero.
      if (strict_band && !(r > q - tol))
        record(rep, x, t, t, "f/t <= 2F/t^2");

      rep.checks += 4;
      prev_t = t;
      prev_ratio = r;
      prev_g = g;
      prev_q = q;
      have_prev_q = true;
    }

    // Even symmetry of the slope: negative side mirrors the positive side.
    for (double t : {pos.front(), pos[pos.size() / 2], pos.back()}) {
      if (std::fabs(nl.ratio(x, -t) - nl.ratio(x, t)) > 1e-10 * scale)
        record(rep, x, -t, t, "ratio not even in t");
      ++rep.checks;
    }
  }
  return rep;
}

double beta_pointwise(const Nonlinearity& nl, const Point& x, double t_probe) {
  if (nl.has_analytic_beta()) return nl.beta(x);
  if (!(t_probe > 0.0)) throw ModelError("beta_pointwise: probe must be positive");
  const double g1 = nl.gap(x, t_probe);
  const double g2 = nl.gap(x, 2.0 * t_probe);
  // Sustained growth under probe doubling marks a divergent limit.
  if (g2 > 1.5 * std::max(g1, 0.0) + 1e-300) return kInf;
  // First-order Richardson step assuming an O(1/t) tail.
  return 2.0 * g2 - g1;
}

}  // namespace nehari

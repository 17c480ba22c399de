#include "nehari/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nehari/errors.hpp"

namespace nehari {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryRelTol = 1e-10;
}  // namespace

EnergyModel::EnergyModel(std::shared_ptr<const Grid> grid,
                         std::shared_ptr<const Nonlinearity> nl)
    : grid_(std::move(grid)), nl_(std::move(nl)), stiffness_(grid_) {
  if (!grid_ || !nl_) throw ModelError("energy model needs a grid and a nonlinearity");
  const std::size_t n = grid_->num_nodes();
  coords_.resize(n);
  alpha_.resize(n);
  eta_.resize(n);
  beta_.resize(n);
  eta_sup_ = -kInf;
  vol_ = grid_->cell_volume();
  for (std::size_t i = 0; i < n; ++i) {
    coords_[i] = grid_->node(i);
    alpha_[i] = nl_->alpha(coords_[i]);
    eta_[i] = nl_->eta(coords_[i]);
    beta_[i] = nl_->beta(coords_[i]);
    if (!std::isfinite(alpha_[i]) || alpha_[i] < 0.0)
      throw ModelError("alpha(x) must be finite and nonnegative on the grid");
    if (!std::isfinite(eta_[i]))
      throw ModelError("eta(x) must be finite on the grid");
    if (eta_[i] < alpha_[i])
      throw ModelError("eta(x) must dominate alpha(x) on the grid");
    eta_sup_ = std::max(eta_sup_, eta_[i]);
  }
}

double EnergyModel::energy(const Field& u) const {
  if (u.grid() != *grid_) throw GridError("energy: field grid mismatch");
  const std::size_t n = u.size();
  std::vector<double> ku(n);
  apply_stiffness(*grid_, u.values().data(), ku.data());
  const double quad = kahan_dot(u.values().data(), ku.data(), n);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = nl_->F(coords_[i], u[i]) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return 0.5 * quad - s * vol_;
}

Field EnergyModel::energy_gradient(const Field& u) const {
  if (u.grid() != *grid_) throw GridError("energy_gradient: field grid mismatch");
  const std::size_t n = u.size();
  // K g = K u - load(f(.,u))  <=>  <g,v>_{H10} = I'(u) v.
  std::vector<double> rhs(n);
  apply_stiffness(*grid_, u.values().data(), rhs.data());
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] -= vol_ * nl_->f(coords_[i], u[i]);
  std::vector<double> g(n);
  stiffness_.solve(rhs.data(), g.data());
  return Field(grid_, std::move(g));
}

AMembership EnergyModel::membership(const Field& u) const {
  if (u.grid() != *grid_) throw GridError("membership: field grid mismatch");
  const std::size_t n = u.size();
  std::vector<double> ku(n);
  apply_stiffness(*grid_, u.values().data(), ku.data());
  const double norm2 = kahan_dot(u.values().data(), ku.data(), n);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = eta_[i] * u[i] * u[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  const double mass = s * vol_;
  const double margin = mass - norm2;
  if (norm2 == 0.0) return {Region::outside, 0.0};
  const double band = kBoundaryRelTol * std::max(mass, norm2);
  if (margin > band) return {Region::inside, margin};
  if (margin < -band) return {Region::outside, margin};
  return {Region::boundary, margin};
}

double EnergyModel::phi(const Field& u, double t) const {
  if (u.grid() != *grid_) throw GridError("phi: field grid mismatch");
  const std::size_t n = u.size();
  std::vector<double> ku(n);
  apply_stiffness(*grid_, u.values().data(), ku.data());
  const double norm2 = kahan_dot(u.values().data(), ku.data(), n);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    if (ui == 0.0) continue;
    const double y = nl_->ratio(coords_[i], t * ui) * ui * ui - c;
    const double tt = s + y;
    c = (tt - s) - y;
    s = tt;
  }
  return norm2 - s * vol_;
}

FiberingResult EnergyModel::fibering(const Field& u, const FiberingOptions& opts) const {
  const AMembership mem = membership(u);
  if (mem.region != Region::inside)
    throw NotInAError("fibering: field is not inside the cone A", mem.margin);

  const std::size_t n = u.size();
  std::vector<double> ku(n);
  apply_stiffness(*grid_, u.values().data(), ku.data());
  const double norm2 = kahan_dot(u.values().data(), ku.data(), n);
  const double phi_floor = opts.phi_tol * norm2;

  auto phi_at = [&](double t) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = u[i];
      if (ui == 0.0) continue;
      const double y = nl_->ratio(coords_[i], t * ui) * ui * ui - c;
      const double tt = s + y;
      c = (tt - s) - y;
      s = tt;
    }
    return norm2 - s * vol_;
  };

  FiberingResult res;
  int iters = 0;

  auto finish = [&](double t, double lo, double hi, double phi_t) {
    res.t = t;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.iterations = iters;
    res.phi_at_t = phi_t;
    res.psi = energy(scaled(u, t));
    return res;
  };

  double lo = 0.0, hi = 0.0;
  double phi_lo = 0.0, phi_hi = 0.0;
  bool bracketed = false;

  // Warm start: a tight bracket around the hint, widened while the signs
  // do not yet straddle the root.
  if (opts.hint > 0.0) {
    lo = opts.hint * 0.96;
    hi = opts.hint * 1.04;
    phi_lo = phi_at(lo);
    ++iters;
    if (std::fabs(phi_lo) <= phi_floor) return finish(lo, lo, lo, phi_lo);
    phi_hi = phi_at(hi);
    ++iters;
    if (std::fabs(phi_hi) <= phi_floor) return finish(hi, hi, hi, phi_hi);
    for (int widen = 0; widen < 6 && iters < opts.max_iterations; ++widen) {
      if (phi_lo > 0.0 && phi_hi < 0.0) {
        bracketed = true;
        break;
      }
      if (phi_lo <= 0.0) {
        lo *= 0.5;
        phi_lo = phi_at(lo);
        ++iters;
      }
      if (phi_hi >= 0.0) {
        hi *= 2.0;
        phi_hi = phi_at(hi);
        ++iters;
      }
    }
    if (!bracketed && phi_lo > 0.0 && phi_hi < 0.0) bracketed = true;
  }

  if (!bracketed) {
    // Cold start from t = 1: phi decreases in t, positive near zero for
    // admissible slopes, negative for large t when u is inside A.
    double t = 1.0;
    double phi_t = phi_at(t);
    ++iters;
    if (std::fabs(phi_t) <= phi_floor) return finish(t, t, t, phi_t);
    if (phi_t > 0.0) {
      lo = t;
      phi_lo = phi_t;
      hi = 2.0 * t;
      for (;;) {
        if (hi > opts.overflow)
          throw BracketOverflowError(
              "fibering: maximizer exceeds the overflow cap; the field is "
              "numerically on the boundary of A",
              hi);
        phi_hi = phi_at(hi);
        ++iters;
        if (std::fabs(phi_hi) <= phi_floor) return finish(hi, lo, hi, phi_hi);
        if (phi_hi < 0.0) break;
        lo = hi;
        phi_lo = phi_hi;
        hi *= 2.0;
        if (iters >= opts.max_iterations)
          throw FiberingError("fibering: bracketing exhausted the iteration cap");
      }
    } else {
      hi = t;
      phi_hi = phi_t;
      lo = 0.5 * t;
      for (;;) {
        if (lo < 1e-300)
          throw FiberingError(
              "fibering: no maximizer above zero (slope at zero already "
              "exceeds the norm)");
        phi_lo = phi_at(lo);
        ++iters;
        if (std::fabs(phi_lo) <= phi_floor) return finish(lo, lo, hi, phi_lo);
        if (phi_lo > 0.0) break;
        hi = lo;
        phi_hi = phi_lo;
        lo *= 0.5;
        if (iters >= opts.max_iterations)
          throw FiberingError("fibering: bracketing exhausted the iteration cap");
      }
    }
  }

  // Bisection; phi is decreasing across the bracket.
  double mid = 0.5 * (lo + hi);
  double phi_mid = 0.0;
  while (iters < opts.max_iterations) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine width
    phi_mid = phi_at(mid);
    ++iters;
    if (std::fabs(phi_mid) <= phi_floor && (hi - lo) <= opts.rel_width * mid)
      return finish(mid, lo, hi, phi_mid);
    if (phi_mid > 0.0)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-15 * mid) break;
  }
  mid = 0.5 * (lo + hi);
  return finish(mid, lo, hi, phi_at(mid));
}

Field EnergyModel::scaled(const Field& u, double t) const {
  std::vector<double> v(u.values());
  for (double& x : v) x *= t;
  return Field(u.grid_ptr(), std::move(v));
}

EnergyModel::PsiEval EnergyModel::psi_eval(const Field& u,
                                           const FiberingOptions& opts) const {
  if (u.grid() != *grid_) throw GridError("psi_eval: field grid mismatch");
  const std::size_t n = u.size();
  std::vector<double> ku(n);
  apply_stiffness(*grid_, u.values().data(), ku.data());
  const double norm2 = kahan_dot(u.values().data(), ku.data(), n);
  if (std::fabs(norm2 - 1.0) > 2e-8)
    throw ModelError("psi_eval: field must lie on the H10 unit sphere");

  FiberingResult fib = fibering(u, opts);
  const double t = fib.t;

  // Riesz gradient of I at t u, scaled by t, then projected tangentially.
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = t * (ku[i] * t - vol_ * nl_->f(coords_[i], t * u[i]));
  std::vector<double> w(n);
  stiffness_.solve(rhs.data(), w.data());

  // Two projection passes pin the tangency down to rounding.
  for (int pass = 0; pass < 2; ++pass) {
    const double radial =
        kahan_dot(ku.data(), w.data(), n) / norm2;  // <u, w>_{H10} / |u|^2
    for (std::size_t i = 0; i < n; ++i) w[i] -= radial * u[i];
  }

  PsiEval out{std::move(fib), 0.0, Field(grid_, std::move(w))};
  out.psi = out.fibering.psi;
  return out;
}

Field EnergyModel::psi_gradient(const Field& u) const { return psi_eval(u).gradient; }

double EnergyModel::beta_support_estimate(const Field& u) const {
  if (u.grid() != *grid_) throw GridError("beta_support_estimate: field grid mismatch");
  const double thr = kSupportThresholdRel * u.max_abs();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::fabs(u[i]) > thr) {
      if (beta_[i] == kInf) return kInf;
      s += beta_[i];
    }
  }
  return s * vol_;
}

std::pair<Field, Field> split_signs(const Field& u) {
  std::vector<double> plus(u.size()), minus(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    plus[i] = std::max(u[i], 0.0);
    minus[i] = std::min(u[i], 0.0);
  }
  return {Field(u.grid_ptr(), std::move(plus)), Field(u.grid_ptr(), std::move(minus))};
}

int count_sign_changes(const Field& u, double threshold) {
  if (u.grid().dim() != 1)
    throw GridError("count_sign_changes: only defined on 1d grids");
  int changes = 0;
  int last = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::fabs(u[i]) <= threshold) continue;
    const int s = u[i] > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace nehari

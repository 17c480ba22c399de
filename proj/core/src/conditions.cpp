#include "nehari/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nehari/rng.hpp"

namespace nehari {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void axpy(Field& y, double a, const Field& x) {
  double* yd = y.values().data();
  const double* xd = x.values().data();
  for (std::size_t i = 0; i < y.size(); ++i) yd[i] += a * xd[i];
}

void scale_field(Field& y, double a) {
  for (double& v : y.values()) v *= a;
}

bool unit_normalize(Field& u) {
  const double nrm = h10_norm(u);
  if (!(nrm > 0.0)) return false;
  scale_field(u, 1.0 / nrm);
  return true;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "unknown";
}

F2Result check_f2(const EnergyModel& model, const ConditionOptions& opts) {
  F2Result out;
  const double margin = opts.eigen_margin;

  out.lambda1_alpha = lambda1(model.grid_ptr(), model.alpha_nodes(), opts.eigs);

  // Grow the eta eigensolve until an eigenvalue at or above 1 appears, so the
  // below-1 part of the spectrum is complete.
  const std::size_t n = model.grid().num_nodes();
  int count = 8;
  const int cap = static_cast<int>(std::min<std::size_t>(n, 128));
  SpectrumResult spec;
  bool crossed = false;
  for (;;) {
    spec = weighted_eigs(model.grid_ptr(), model.eta_nodes(),
                         std::min(count, cap), opts.eigs);
    if (spec.theta_identically_zero || spec.pairs.empty()) break;
    if (spec.pairs.back().lambda >= 1.0) {
      crossed = true;
      break;
    }
    if (count >= cap) break;
    count *= 2;
  }
  out.lambda1_eta =
      spec.pairs.empty() ? kInf : spec.pairs.front().lambda;

  out.m = 0;
  out.lambda_m_eta = kNaN;
  out.lambda_next_eta = kInf;
  bool near_one = false;
  for (const EigenPair& p : spec.pairs) {
    if (std::abs(p.lambda - 1.0) <= margin) near_one = true;
    if (p.lambda < 1.0) {
      ++out.m;
      out.lambda_m_eta = p.lambda;
    } else {
      out.lambda_next_eta = std::min(out.lambda_next_eta, p.lambda);
    }
  }
  out.s_m = 0;
  bool first_cluster = true;
  for (const EigenCluster& c : spec.clusters) {
    if (!(c.lambda < 1.0)) break;
    out.s_m += first_cluster ? 1 : c.multiplicity;
    first_cluster = false;
  }
  if (out.m > 0 && out.s_m == 0) out.s_m = 1;  // cluster mean straddled 1

  if (!crossed && !spec.theta_identically_zero && !spec.pairs.empty() &&
      out.m == static_cast<int>(spec.pairs.size())) {
    out.notes.push_back(
        "all computed eta eigenvalues lie below 1 (search capped at " +
        std::to_string(cap) + "); the crossing index is a lower bound");
  }
  for (const std::string& w : spec.warnings) out.notes.push_back(w);
  out.eta_spectrum = std::move(spec);

  // Verdict: m >= 1 with clearance on the eta side, and the alpha-weighted
  // first eigenvalue clear of 1 from above.
  const bool alpha_near_one =
      std::isfinite(out.lambda1_alpha) && std::abs(out.lambda1_alpha - 1.0) <= margin;
  if (out.m == 0) {
    out.verdict = near_one ? Verdict::inconclusive : Verdict::fails;
    out.notes.push_back("no eta-weighted eigenvalue lies below 1");
    return out;
  }
  if (out.lambda1_alpha < 1.0 || alpha_near_one) {
    out.verdict = alpha_near_one ? Verdict::inconclusive : Verdict::fails;
    out.notes.push_back("first alpha-weighted eigenvalue does not exceed 1");
    return out;
  }
  out.verdict = near_one ? Verdict::inconclusive : Verdict::holds;
  if (near_one)
    out.notes.push_back("an eta-weighted eigenvalue sits within the margin of 1");
  return out;
}

namespace {

// Value and tangential H^1_0 gradient of u -> t_u on the unit sphere, by
// implicit differentiation of the scalar root equation
//   phi(u, t) = |u|^2 - integral ratio(x, t u) u^2 = 0:
//   dt/du_i = -(dphi/du_i) / (dphi/dt),
// with the one-dimensional ratio derivative taken by central differences.
struct TauGradient {
  double t = 0.0;
  Field gradient;  // tangential, Riesz-lifted to H10
};

TauGradient tau_gradient(const EnergyModel& model, const Field& u,
                         const FiberingOptions& fib) {
  TauGradient out;
  const FiberingResult root = model.fibering(u, fib);
  out.t = root.t;

  const Grid& g = model.grid();
  const double vol = g.cell_volume();
  const std::size_t n = u.size();
  const Nonlinearity& nl = model.nonlinearity();

  // dphi/dt by central differences on the scalar map (phi is strictly
  // decreasing in t, so the denominator is safely negative).
  const double dt = 1e-6 * std::max(root.t, 1e-6);
  const double dphidt =
      (model.phi(u, root.t + dt) - model.phi(u, root.t - dt)) / (2.0 * dt);

  std::vector<double> ku = apply_stiffness(g, u.values());
  std::vector<double> dphi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = g.node(i);
    const double s = root.t * u[i];
    const double ds = 1e-6 * (1.0 + std::abs(s));
    const double ratio_s = (nl.ratio(x, s + ds) - nl.ratio(x, s - ds)) / (2.0 * ds);
    dphi[i] = 2.0 * ku[i] -
              vol * (root.t * ratio_s * u[i] * u[i] + 2.0 * nl.ratio(x, s) * u[i]);
  }

  // Euclidean partials of t, then the Riesz lift and tangential projection.
  Field grad(u.grid_ptr());
  if (std::abs(dphidt) < 1e-300) {
    out.gradient = std::move(grad);
    return out;  // flat fibering slope; report a zero gradient
  }
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -dphi[i] / dphidt;
  model.stiffness().solve(rhs.data(), grad.values().data());
  const double radial = h10_inner(grad, u);
  axpy(grad, -radial, u);
  out.gradient = std::move(grad);
  return out;
}

struct DescentOutcome {
  double best = kInf;  // smallest (or largest, negated) t seen
  bool refined = false;
};

// Riemannian Armijo descent of u -> t_u on the sphere, staying inside A by a
// margin floor.  Every successful fibering evaluation updates the bound.
DescentOutcome descend_tau(const EnergyModel& model, Field u,
                           const ConditionOptions& opts) {
  DescentOutcome out;
  const AMembership m0 = model.membership(u);
  if (m0.region != Region::inside) return out;
  const double floor = opts.boundary_floor_factor * m0.margin;

  FiberingOptions fib;
  TauGradient cur;
  try {
    cur = tau_gradient(model, u, fib);
  } catch (const FiberingError&) {
    return out;
  }
  out.best = cur.t;
  fib.hint = cur.t;
  const double t0 = cur.t;

  for (int it = 0; it < opts.tau_max_iterations; ++it) {
    const double gnorm = h10_norm(cur.gradient);
    if (gnorm <= opts.tau_grad_tol * std::max(1.0, cur.t)) break;

    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
      Field cand = u;
      axpy(cand, -step, cur.gradient);
      if (!unit_normalize(cand)) continue;
      const AMembership mc = model.membership(cand);
      if (mc.region != Region::inside || mc.margin < floor) continue;
      TauGradient trial;
      try {
        trial = tau_gradient(model, cand, fib);
      } catch (const FiberingError&) {
        continue;
      }
      out.best = std::min(out.best, trial.t);
      if (trial.t <= cur.t - 1e-4 * step * gnorm * gnorm) {
        u = std::move(cand);
        cur = std::move(trial);
        fib.hint = cur.t;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  out.refined = out.best < t0 * (1.0 - 1e-12);
  return out;
}

// Random field inside A: a combination over the below-1 eigenfunctions plus a
// rough nodal perturbation shrunk until membership holds.
bool random_start_in_A(const EnergyModel& model, const std::vector<const Field*>& basis,
                       SplitRng rng, Field& out) {
  Field base(model.grid_ptr());
  for (const Field* e : basis) axpy(base, rng.normal(), *e);
  if (!unit_normalize(base)) return false;

  Field rough(model.grid_ptr());
  for (double& v : rough.values()) v = rng.normal();
  if (!unit_normalize(rough)) return false;

  double eps = 0.5;
  for (int k = 0; k < 24; ++k, eps *= 0.5) {
    Field cand = base;
    axpy(cand, eps, rough);
    if (!unit_normalize(cand)) continue;
    if (model.membership(cand).region == Region::inside) {
      out = std::move(cand);
      return true;
    }
  }
  if (model.membership(base).region == Region::inside) {
    out = std::move(base);
    return true;
  }
  return false;
}

std::vector<const Field*> inside_eigenfunctions(const EnergyModel& model,
                                                const SpectrumResult& spec) {
  std::vector<const Field*> basis;
  for (const EigenPair& p : spec.pairs)
    if (p.lambda < 1.0 && model.membership(p.e).region == Region::inside)
      basis.push_back(&p.e);
  return basis;
}

}  // namespace

TauEstimate estimate_tau(const EnergyModel& model, const SpectrumResult& eta_spectrum,
                         const ConditionOptions& opts) {
  TauEstimate est;
  const std::vector<const Field*> basis = inside_eigenfunctions(model, eta_spectrum);
  if (basis.empty())
    throw ModelError("tau estimation: no eigenfunction start lies inside A "
                     "(hypothesis check must hold first)");

  std::vector<Field> starts;
  for (const Field* e : basis) starts.push_back(*e);
  SplitRng rng(opts.seed);
  int missed = 0;
  for (int r = 0; r < opts.tau_samples; ++r) {
    Field u;
    if (random_start_in_A(model, basis, rng.split("tau-start", static_cast<std::uint64_t>(r)), u))
      starts.push_back(std::move(u));
    else
      ++missed;
  }
  if (missed > 0)
    est.notes.push_back(std::to_string(missed) + " random start(s) failed to land inside A");
  est.low_confidence = opts.tau_samples == 0;
  if (est.low_confidence)
    est.notes.push_back("eigenfunction starts only (samples = 0); low confidence");

  est.value = kInf;
  for (const Field& s : starts) {
    const DescentOutcome d = descend_tau(model, s, opts);
    if (!std::isfinite(d.best)) continue;
    ++est.starts;
    if (d.refined) ++est.refined;
    est.value = std::min(est.value, d.best);
  }
  if (!std::isfinite(est.value))
    throw ModelError("tau estimation: every start failed its fibering solve");
  return est;
}

TauEstimate estimate_tau_m(const EnergyModel& model, const SpectrumResult& eta_spectrum,
                           const ConditionOptions& opts) {
  TauEstimate est;
  const int k = std::min<int>(eta_spectrum.s_m,
                              static_cast<int>(eta_spectrum.pairs.size()));
  if (k < 1)
    throw ModelError("tau_m estimation: empty eigenspan (hypothesis check must hold first)");

  std::vector<const Field*> basis;
  for (int j = 0; j < k; ++j) basis.push_back(&eta_spectrum.pairs[static_cast<std::size_t>(j)].e);

  const bool odd = model.nonlinearity().is_odd();
  FiberingOptions fib;

  auto span_field = [&](const std::vector<double>& c) {
    Field u(model.grid_ptr());
    for (int j = 0; j < k; ++j) axpy(u, c[static_cast<std::size_t>(j)], *basis[static_cast<std::size_t>(j)]);
    return u;
  };
  auto t_of = [&](const std::vector<double>& c, bool* ok) -> double {
    Field u = span_field(c);
    if (!unit_normalize(u) || model.membership(u).region != Region::inside) {
      *ok = false;
      return 0.0;
    }
    try {
      const double t = model.fibering(u, fib).t;
      *ok = true;
      return t;
    } catch (const FiberingError&) {
      *ok = false;
      return 0.0;
    }
  };
  auto normalize_coeffs = [&](std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    s = std::sqrt(s);
    if (!(s > 0.0)) return false;
    for (double& v : c) v /= s;
    return true;
  };

  est.value = 0.0;
  std::vector<double> best_c;

  auto consider = [&](const std::vector<double>& c) {
    bool ok = false;
    const double t = t_of(c, &ok);
    if (!ok) return;
    ++est.starts;
    if (t > est.value) {
      est.value = t;
      best_c = c;
    }
  };

  // Axes (both signs unless the kernel is odd), then random directions.
  for (int j = 0; j < k; ++j) {
    std::vector<double> c(static_cast<std::size_t>(k), 0.0);
    c[static_cast<std::size_t>(j)] = 1.0;
    consider(c);
    if (!odd) {
      c[static_cast<std::size_t>(j)] = -1.0;
      consider(c);
    }
  }
  SplitRng rng(opts.seed);
  if (k > 1) {
    for (int r = 0; r < opts.tau_m_samples; ++r) {
      SplitRng sub = rng.split("tau-m-sample", static_cast<std::uint64_t>(r));
      std::vector<double> c(static_cast<std::size_t>(k));
      for (double& v : c) v = sub.normal();
      if (normalize_coeffs(c)) consider(c);
    }
  } else {
    est.notes.push_back("one-dimensional span: value is exact (sphere is the antipodal pair)");
  }

  if (best_c.empty())
    throw ModelError("tau_m estimation: no span direction admitted a fibering solve");

  // Local ascent from the best sample: projected finite-difference gradient
  // in coefficient space (the span dimension is small).
  if (k > 1) {
    std::vector<double> c = best_c;
    const double fd = 1e-5;
    for (int it = 0; it < opts.tau_max_iterations; ++it) {
      bool ok = false;
      const double t0 = t_of(c, &ok);
      if (!ok) break;
      std::vector<double> grad(static_cast<std::size_t>(k), 0.0);
      for (int j = 0; j < k; ++j) {
        std::vector<double> cp = c;
        std::vector<double> cm = c;
        cp[static_cast<std::size_t>(j)] += fd;
        cm[static_cast<std::size_t>(j)] -= fd;
        normalize_coeffs(cp);
        normalize_coeffs(cm);
        bool okp = false;
        bool okm = false;
        const double tp = t_of(cp, &okp);
        const double tm = t_of(cm, &okm);
        if (!okp || !okm) {
          grad.assign(static_cast<std::size_t>(k), 0.0);
          break;
        }
        grad[static_cast<std::size_t>(j)] = (tp - tm) / (2.0 * fd);
      }
      double radial = 0.0;
      for (int j = 0; j < k; ++j) radial += grad[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j)];
      double gnorm2 = 0.0;
      for (int j = 0; j < k; ++j) {
        grad[static_cast<std::size_t>(j)] -= radial * c[static_cast<std::size_t>(j)];
        gnorm2 += grad[static_cast<std::size_t>(j)] * grad[static_cast<std::size_t>(j)];
      }
      if (gnorm2 <= opts.tau_grad_tol * opts.tau_grad_tol * std::max(1.0, t0 * t0)) break;

      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
        std::vector<double> cand = c;
        for (int j = 0; j < k; ++j) cand[static_cast<std::size_t>(j)] += step * grad[static_cast<std::size_t>(j)];
        if (!normalize_coeffs(cand)) continue;
        bool okc = false;
        const double tc = t_of(cand, &okc);
        if (!okc) continue;
        if (tc > est.value) {
          est.value = tc;
          best_c = cand;
        }
        if (tc >= t0 + 1e-4 * step * gnorm2) {
          c = std::move(cand);
          moved = true;
          est.refined = 1;
          break;
        }
      }
      if (!moved) break;
    }
  }
  est.low_confidence = (k > 1 && opts.tau_m_samples == 0);
  return est;
}

namespace {

ConditionReport assemble(const EnergyModel& model, bool want_tau, bool want_tau_m,
                         const ConditionOptions& opts, const double* ground_level) {
  ConditionReport rep;
  F2Result f2 = check_f2(model, opts);
  rep.verdict_f2 = f2.verdict;
  rep.m = f2.m;
  rep.s_m = f2.s_m;
  rep.lambda1_eta = f2.lambda1_eta;
  rep.lambda_m_eta = f2.lambda_m_eta;
  rep.lambda_next_eta = f2.lambda_next_eta;
  rep.lambda1_alpha = f2.lambda1_alpha;
  rep.notes = std::move(f2.notes);
  rep.eta_spectrum = std::move(f2.eta_spectrum);

  rep.eta_sup = 0.0;
  for (double e : model.eta_nodes()) rep.eta_sup = std::max(rep.eta_sup, e);
  rep.essinf_beta = kInf;
  for (double b : model.beta_nodes()) rep.essinf_beta = std::min(rep.essinf_beta, b);

  const int d = model.grid().dim();
  if (d == 3) {
    rep.sobolev_S = sobolev_constant(3);
    rep.support_lower_bound =
        rep.eta_sup > 0.0 ? std::pow(rep.sobolev_S / rep.eta_sup, 1.5) : kInf;
  } else {
    rep.sobolev_S = kNaN;
    rep.support_lower_bound = kNaN;
  }
  rep.level_gap_rhs = rep.essinf_beta * rep.support_lower_bound;  // inf-aware
  rep.ground_level = ground_level ? *ground_level : kNaN;

  // eta - alpha weight for the threshold denominator (nonnegative by the
  // model's nodal validation).
  {
    std::vector<double> w(model.eta_nodes().size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = std::max(model.eta_nodes()[i] - model.alpha_nodes()[i], 0.0);
    rep.lambda1_eta_minus_alpha = lambda1(model.grid_ptr(), std::move(w), opts.eigs);
  }

  rep.tau_estimate = kNaN;
  rep.tau_m_estimate = kNaN;
  rep.rhs_beta = kNaN;
  rep.rhs_beta_m = kNaN;

  if (rep.verdict_f2 == Verdict::fails || rep.m < 1) {
    rep.verdict_beta = Verdict::not_applicable;
    rep.verdict_beta_m = Verdict::not_applicable;
    rep.notes.push_back("compactness thresholds skipped: the eigenvalue "
                        "hypothesis fails");
    return rep;
  }

  if (want_tau) {
    TauEstimate te = estimate_tau(model, rep.eta_spectrum, opts);
    rep.tau_estimate = te.value;
    for (std::string& s : te.notes) rep.notes.push_back(std::move(s));
  }
  if (want_tau_m) {
    TauEstimate tm = estimate_tau_m(model, rep.eta_spectrum, opts);
    rep.tau_m_estimate = tm.value;
    for (std::string& s : tm.notes) rep.notes.push_back(std::move(s));
  }

  const bool beta_infinite = std::isinf(rep.essinf_beta);
  auto threshold = [&](double tau) {
    if (std::isinf(rep.lambda1_eta_minus_alpha)) return 0.0;
    return rep.eta_sup * tau * tau /
           (2.0 * rep.lambda1_eta_minus_alpha * std::pow(rep.sobolev_S, 1.5));
  };
  auto verdict_for = [&](double essinf, double rhs) {
    if (beta_infinite) return Verdict::holds;
    if (d != 3) return Verdict::not_applicable;
    if (!std::isfinite(rhs)) return Verdict::inconclusive;
    if (rhs <= 0.0) return Verdict::holds;
    const double r = essinf / rhs;
    if (r > 1.0 + opts.guard_band) return Verdict::holds;
    if (r < 1.0 - opts.guard_band) return Verdict::fails;
    return Verdict::inconclusive;
  };

  if (!beta_infinite && d != 3)
    rep.notes.push_back("finite beta kernels are only decidable on "
                        "three-dimensional domains (Sobolev constant)");

  if (want_tau) {
    if (d == 3 && std::isfinite(rep.tau_estimate)) rep.rhs_beta = threshold(rep.tau_estimate);
    rep.verdict_beta = verdict_for(rep.essinf_beta, rep.rhs_beta);
  } else {
    rep.verdict_beta = Verdict::not_applicable;
  }
  if (want_tau_m) {
    if (d == 3 && std::isfinite(rep.tau_m_estimate))
      rep.rhs_beta_m = threshold(rep.tau_m_estimate);
    rep.verdict_beta_m = verdict_for(rep.essinf_beta, rep.rhs_beta_m);
  } else {
    rep.verdict_beta_m = Verdict::not_applicable;
  }

  // Level-gap diagnostic: a ground-state level must sit in
  // [0, essinf_beta * support floor).
  if (ground_level && std::isfinite(rep.ground_level) &&
      !std::isnan(rep.level_gap_rhs)) {
    const double tol = 1e-12 * std::max(1.0, std::abs(rep.ground_level));
    if (rep.ground_level >= -tol && rep.ground_level < rep.level_gap_rhs)
      rep.level_gap = Verdict::holds;
    else
      rep.level_gap = Verdict::fails;
  }
  return rep;
}

}  // namespace

ConditionReport check_beta(const EnergyModel& model, BetaVariant variant,
                           const ConditionOptions& opts, const double* ground_level) {
  return assemble(model, variant == BetaVariant::ground_state,
                  variant == BetaVariant::multiplicity, opts, ground_level);
}

ConditionReport check_conditions(const EnergyModel& model, const ConditionOptions& opts,
                                 const double* ground_level) {
  return assemble(model, true, true, opts, ground_level);
}

}  // namespace nehari

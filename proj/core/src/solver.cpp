#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>

#include "nehari/rng.hpp"

namespace nehari {

namespace {

void axpy(Field& y, double a, const Field& x) {
  double* yd = y.values().data();
  const double* xd = x.values().data();
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) yd[i] += a * xd[i];
}

void scale(Field& y, double a) {
  for (double& v : y.values()) v *= a;
}

Field normalized(Field u) {
  const double nrm = h10_norm(u);
  if (!(nrm > 0.0)) throw ModelError("cannot normalize the zero field");
  scale(u, 1.0 / nrm);
  return u;
}

// Canonical representative of the pair {u, -u}: entry of largest magnitude
// positive (ties by lowest index).
void canonicalize_pair(Field& u) {
  std::size_t best = 0;
  double mag = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  if (u[best] < 0.0) scale(u, -1.0);
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::boundary_stall: return "boundary_stall";
  }
  return "unknown";
}

std::string sign_verdict(const Field& u, double threshold_rel) {
  const double thr = threshold_rel * u.max_abs();
  bool has_pos = false;
  bool has_neg = false;
  for (double v : u.values()) {
    if (v > thr) has_pos = true;
    if (v < -thr) has_neg = true;
  }
  if (has_pos && has_neg) return "sign-changing";
  if (has_neg) return "negative";
  return "positive";
}

SolveReport minimize_psi(const EnergyModel& model, const Field& u0,
                         const SolveOptions& opts) {
  Field u = normalized(u0);

  const AMembership m0 = model.membership(u);
  if (m0.region != Region::inside)
    throw NotInAError("descent start lies outside the open cone A", m0.margin);
  const double margin_floor = opts.boundary_floor_factor * m0.margin;

  SolveReport report;
  report.seed = opts.seed;
  report.config_digest = opts.config_digest;
  report.boundary_margin_min = m0.margin;

  FiberingOptions fib;
  EnergyModel::PsiEval cur = model.psi_eval(u, fib);
  fib.hint = cur.fibering.t;

  int iter = 0;
  SolveStatus status = SolveStatus::max_iterations;
  for (; iter < opts.max_iterations; ++iter) {
    const double gnorm = h10_norm(cur.gradient);
    if (gnorm <= opts.grad_tol) {
      status = SolveStatus::converged;
      break;
    }

    // Armijo backtracking along the negative Riemannian gradient with
    // renormalization retraction.  Candidates that leave the safe part of A
    // (margin below the floor) or break the fibering bracket count as
    // infeasible and shrink the step like a failed decrease.
    //
    // Near the minimizer the true per-step decrease ~ step |g|^2 drops below
    // the floating-point noise of the functional itself, so the Armijo
    // comparison turns into coin flipping well before |g| reaches typical
    // tolerances.  Below that resolution the acceptance test demands a
    // strict drop of the gradient norm instead (the gradient comes out of a
    // stiffness solve and resolves several orders of magnitude deeper).
    const double psi_noise = 256.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::fabs(cur.psi));
    double step = opts.armijo_init;
    bool accepted = false;
    bool all_infeasible = true;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= opts.armijo_factor) {
      Field cand = u;
      axpy(cand, -step, cur.gradient);
      const double cn = h10_norm(cand);
      if (!(cn > 0.0)) continue;
      scale(cand, 1.0 / cn);

      const AMembership mc = model.membership(cand);
      if (mc.region != Region::inside || mc.margin < margin_floor) continue;

      EnergyModel::PsiEval trial;
      try {
        trial = model.psi_eval(cand, fib);
      } catch (const FiberingError&) {
        continue;  // bracket failure: treat like an infeasible candidate
      }
      all_infeasible = false;

      const bool armijo_resolvable = step * gnorm * gnorm > psi_noise;
      const bool accept =
          armijo_resolvable
              ? trial.psi <= cur.psi - opts.armijo_c1 * step * gnorm * gnorm
              : trial.psi <= cur.psi + psi_noise &&
                    h10_norm(trial.gradient) <= 0.999 * gnorm;
      if (accept) {
        u = std::move(cand);
        cur = std::move(trial);
        fib.hint = cur.fibering.t;
        report.boundary_margin_min = std::min(report.boundary_margin_min, mc.margin);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No feasible decrease at any step length.  When every candidate hit
      // the margin floor the iterate is pinned against the boundary of A;
      // otherwise the line search bottomed out at this resolution.
      status = all_infeasible ? SolveStatus::boundary_stall : SolveStatus::max_iterations;
      ++iter;
      break;
    }
  }

  report.status = status;
  report.iterations = iter;
  report.psi_grad_norm = h10_norm(cur.gradient);
  report.t_final = cur.fibering.t;
  report.level = cur.psi;
  report.u_star = model.scaled(u, cur.fibering.t);
  report.residual = h10_norm(model.energy_gradient(report.u_star));
  report.sign_verdict = sign_verdict(report.u_star, opts.sign_threshold_rel);
  report.beta_support_estimate = model.beta_support_estimate(report.u_star);
  return report;
}

namespace {

// ---- least-energy nodal critical points -----------------------------------
//
// Descent on Psi only reaches local minima of the reduced functional, and the
// ground pair is the only one; every sign-changing critical point is a
// saddle there.  Those are reached through the nodal counterpart of the
// manifold instead: split the iterate into its connected same-sign
// components, scale the components jointly so that the energy is critical
// along every component ray, and descend on that reduced functional.  The
// scaling is a small coupled root system because the discrete H10 form
// couples neighbouring components across their interface; solving the
// coupled system (rather than fibering each component in isolation) makes
// the fixed points of the iteration exact critical points of I.

// Connected same-sign components of {|u| > thr}; nodes at or below thr act
// as walls.  Components are discovered in node order and sorted by H10 mass,
// so the decomposition is deterministic.
std::vector<std::vector<std::size_t>> signed_components(const Field& u, double thr) {
  const Grid& g = u.grid();
  const std::size_t n = g.num_nodes();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0 || std::fabs(u[s]) <= thr) continue;
    const bool pos = u[s] > 0.0;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      out[static_cast<std::size_t>(id)].push_back(i);
      const std::array<int, 3> mi = g.multi_index(i);
      for (int axis = 0; axis < g.dim(); ++axis) {
        for (int dir = -1; dir <= 1; dir += 2) {
          std::array<int, 3> mj = mi;
          mj[axis] += dir;
          if (mj[axis] < 0 || mj[axis] >= g.extent(axis)) continue;
          const std::size_t j = g.linear_index(mj);
          if (comp[j] >= 0 || std::fabs(u[j]) <= thr) continue;
          if ((u[j] > 0.0) != pos) continue;
          comp[j] = id;
          stack.push_back(j);
        }
      }
    }
  }
  return out;
}

struct NodalEval {
  Field w;             // coupled-fibered representative
  Field gradient;      // H10 Riesz gradient of I at w
  double energy = 0.0;
  double grad_norm = 0.0;
  std::size_t components = 0;
};

// Scales the (unit H10) component directions v_c by t_c so that
// <grad I(sum t_d v_d), v_c> = 0 for every c:
//   sum_d A_cd t_d = t_c * S_c(t_c),  A = H10 Gram matrix,
//   S_c(t) = vol * sum_i ratio(x_i, t v_i) v_i^2.
// Gauss-Seidel over components; each inner solve is a monotone scalar root.
// The off-diagonal couplings are nonnegative and O(h), so the sweeps
// contract fast.  Throws FiberingError when a component cannot bracket
// (it is not admissible on its own).
std::vector<double> coupled_fiber_roots(const EnergyModel& model,
                                        const std::vector<Field>& v,
                                        const std::vector<std::vector<double>>& gram) {
  const Grid& g = model.grid();
  const double vol = g.cell_volume();
  const std::size_t k = v.size();

  auto ts_at = [&](std::size_t c, double t) {
    // t * S_c(t) with compensated summation over the component support.
    double s = 0.0, comp = 0.0;
    const Field& vc = v[c];
    for (std::size_t i = 0; i < vc.size(); ++i) {
      const double vi = vc[i];
      if (vi == 0.0) continue;
      const double y =
          model.nonlinearity().ratio(g.node(i), t * vi) * vi * vi - comp;
      const double tt = s + y;
      comp = (tt - s) - y;
      s = tt;
    }
    return t * s * vol;
  };

  auto scalar_root = [&](std::size_t c, double b, double start) {
    auto phi = [&](double t) { return gram[c][c] * t + b - ts_at(c, t); };
    double hi = std::max(start, 1e-8);
    double lo = hi;
    if (phi(hi) > 0.0) {
      for (;;) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
          throw FiberingError(
              "nodal fibering: component scaling exceeds the overflow cap; "
              "the component is numerically outside the cone A");
        if (phi(hi) < 0.0) break;
      }
    } else {
      for (;;) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300)
          throw FiberingError("nodal fibering: no positive component scaling");
        if (phi(lo) > 0.0) break;
      }
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (phi(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
      if ((hi - lo) <= 1e-15 * mid) break;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<double> t(k, 1.0);
  for (std::size_t c = 0; c < k; ++c) t[c] = scalar_root(c, 0.0, 1.0);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double b = 0.0;
      for (std::size_t d = 0; d < k; ++d)
        if (d != c) b += gram[c][d] * t[d];
      const double next = scalar_root(c, b, t[c]);
      worst = std::max(worst, std::fabs(next - t[c]) / std::max(next, 1e-300));
      t[c] = next;
    }
    if (worst <= 1e-14) break;
  }
  return t;
}

// Keeps the target_components largest-by-H10-mass components of u (ties by
// discovery order), coupled-fibers them, and evaluates I and its gradient at
// the result.  Returns false when u has no usable component.
//
// The split is at exact zero: a value threshold would turn every interface
// node into a pinned zero whose equation residual no shape change can
// remove, leaving the gradient norm stuck at that residual.  With the exact
// split, near-zero nodes ride along with the component matching their sign
// and stay genuine degrees of freedom.  Rounding-level splinter components
// are dropped by a relative mass floor instead.
bool nodal_eval(const EnergyModel& model, const Field& u, std::size_t target_components,
                NodalEval& out) {
  const Grid& g = model.grid();
  const double vol = g.cell_volume();
  const std::size_t n = u.size();

  auto comps = signed_components(u, 0.0);
  if (comps.empty()) return false;

  // H10 mass of each component direction before normalization.
  std::vector<double> mass(comps.size());
  std::vector<Field> dirs;
  dirs.reserve(comps.size());
  double max_mass = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    Field vc(u.grid_ptr());
    for (std::size_t i : comps[c]) vc[i] = u[i];
    mass[c] = h10_norm(vc);
    max_mass = std::max(max_mass, mass[c]);
    dirs.push_back(std::move(vc));
  }
  if (!(max_mass > 0.0)) return false;
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (mass[c] > 1e-8 * max_mass) order.push_back(c);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
  const std::size_t k = std::min(target_components, order.size());

  std::vector<Field> v;
  v.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    Field dir = std::move(dirs[order[c]]);
    scale(dir, 1.0 / mass[order[c]]);
    v.push_back(std::move(dir));
  }

  // Gram matrix in H10; one stiffness application per component.
  std::vector<std::vector<double>> kv(k), gram(k, std::vector<double>(k, 0.0));
  for (std::size_t c = 0; c < k; ++c)
    kv[c] = apply_stiffness(g, v[c].values());
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = c; d < k; ++d)
      gram[c][d] = gram[d][c] = kahan_dot(kv[c].data(), v[d].values().data(), n);

  const std::vector<double> t = coupled_fiber_roots(model, v, gram);

  Field w(u.grid_ptr());
  for (std::size_t c = 0; c < k; ++c) axpy(w, t[c], v[c]);

  // H10 Riesz gradient of I at w; |g|_{H10}^2 = rhs . K^{-1} rhs.
  std::vector<double> rhs = apply_stiffness(g, w.values());
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] -= vol * model.nonlinearity().f(g.node(i), w[i]);
  Field grad(u.grid_ptr());
  model.stiffness().solve(rhs.data(), grad.values().data());

  out.energy = model.energy(w);
  out.grad_norm = std::sqrt(std::max(0.0, kahan_dot(rhs.data(), grad.values().data(), n)));
  out.w = std::move(w);
  out.gradient = std::move(grad);
  out.components = k;
  return true;
}

// Descent for sign-changing critical points: iterates w -> P(w - s grad I(w))
// where P is the coupled componentwise fibering above.  The same Armijo /
// gradient-floor endgame as minimize_psi applies.
SolveReport minimize_nodal(const EnergyModel& model, const Field& u0,
                           const SolveOptions& opts) {
  // The eight most massive components bound the nodal structure the descent
  // will track; trailing splinters of a noisy start are zeroed up front.
  NodalEval cur;
  if (!nodal_eval(model, u0, 8, cur))
    throw ModelError("nodal descent: start has no usable component");
  const std::size_t target = cur.components;

  SolveReport report;
  report.seed = opts.seed;
  report.config_digest = opts.config_digest;

  int iter = 0;
  SolveStatus status = SolveStatus::max_iterations;
  for (; iter < opts.max_iterations; ++iter) {
    if (cur.grad_norm <= opts.grad_tol) {
      status = SolveStatus::converged;
      break;
    }
    // The split assignment of near-zero interface nodes flips between
    // evaluations and jolts the energy by O(threshold^2 / h); the endgame
    // slack must absorb that on top of plain rounding noise.
    const double noise = std::max(256.0 * std::numeric_limits<double>::epsilon(),
                                  1e-10) *
                         std::max(1.0, std::fabs(cur.energy));
    double step = opts.armijo_init;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= opts.armijo_factor) {
      Field cand = cur.w;
      axpy(cand, -step, cur.gradient);
      NodalEval trial;
      try {
        if (!nodal_eval(model, cand, target, trial)) continue;
      } catch (const FiberingError&) {
        continue;
      }
      const double g2 = cur.grad_norm * cur.grad_norm;
      const bool armijo_resolvable = step * g2 > noise;
      const bool accept =
          armijo_resolvable
              ? trial.energy <= cur.energy - opts.armijo_c1 * step * g2
              : trial.energy <= cur.energy + noise &&
                    trial.grad_norm <= 0.999 * cur.grad_norm;
      if (accept) {
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      ++iter;
      break;
    }
  }

  report.status = status;
  report.iterations = iter;
  report.psi_grad_norm = cur.grad_norm;
  report.residual = cur.grad_norm;
  report.level = cur.energy;
  report.t_final = h10_norm(cur.w);
  report.boundary_margin_min = model.membership(cur.w).margin;
  report.sign_verdict = sign_verdict(cur.w, opts.sign_threshold_rel);
  report.beta_support_estimate = model.beta_support_estimate(cur.w);
  report.u_star = std::move(cur.w);
  return report;
}

struct StartOutcome {
  bool ok = false;
  std::string note;
  SolveReport report;
};

enum class StartMode { plain, nodal };

StartOutcome run_start(const EnergyModel& model, const Field& start,
                       const SolveOptions& sopts, const std::string& label,
                       StartMode mode) {
  StartOutcome out;
  try {
    out.report = mode == StartMode::plain ? minimize_psi(model, start, sopts)
                                          : minimize_nodal(model, start, sopts);
    out.ok = true;
  } catch (const NotInAError& e) {
    out.note = label + ": start outside A (margin " + std::to_string(e.margin) + ")";
  } catch (const FiberingError& e) {
    out.note = label + ": fibering failed (" + e.what() + ")";
  } catch (const ModelError& e) {
    out.note = label + ": " + e.what();
  }
  return out;
}

bool same_pair(const FoundSolution& a, const SolveReport& b, double rel_dist,
               double rel_level) {
  const double level_scale = std::max({std::abs(a.level), std::abs(b.level), 1e-300});
  if (std::abs(a.level - b.level) > rel_level * level_scale) return false;
  Field diff = a.u;
  Field sum = a.u;
  axpy(diff, -1.0, b.u_star);
  axpy(sum, 1.0, b.u_star);
  const double scale_h = std::max({h10_norm(a.u), h10_norm(b.u_star), 1e-300});
  const double d = std::min(h10_norm(diff), h10_norm(sum));
  return d <= rel_dist * scale_h;
}

// Deflated objective: Psi(u) * prod_k (1 + sigma/|u - v_k|^2)(1 + sigma/|u + v_k|^2)
// over unit representatives v_k of the solutions found so far.  A short
// descent on it steers new starts away from known basins; the endpoint is
// then polished on the plain functional.
struct Deflator {
  const std::vector<Field>& reps;  // unit H10 representatives
  double sigma;

  // Multiplies the penalty value and accumulates its H10 gradient.
  double penalty(const Field& u, Field* grad) const {
    double p = 1.0;
    for (const Field& v : reps) {
      for (int sign = -1; sign <= 1; sign += 2) {
        Field d = u;
        axpy(d, static_cast<double>(sign), v);
        const double dd = std::max(h10_inner(d, d), 1e-14);
        const double factor = 1.0 + sigma / dd;
        if (grad) {
          // d/du of (1 + sigma/|d|^2) is -2 sigma d / |d|^4 (Riesz in H10).
          axpy(*grad, -2.0 * sigma / (dd * dd * factor), d);
        }
        p *= factor;
      }
    }
    return p;
  }
};

Field deflated_descent(const EnergyModel& model, Field u,
                       const std::vector<Field>& reps, double sigma,
                       double margin_floor) {
  Deflator defl{reps, sigma};
  FiberingOptions fib;
  EnergyModel::PsiEval cur;
  try {
    cur = model.psi_eval(u, fib);
  } catch (const FiberingError&) {
    return u;
  }
  fib.hint = cur.fibering.t;

  // grad (Psi * P) = P grad Psi + Psi grad P, projected to the sphere tangent.
  const int kIters = 300;
  const double tol = 1e-6;
  for (int it = 0; it < kIters; ++it) {
    Field pgrad(u.grid_ptr());
    const double pen = defl.penalty(u, &pgrad);
    const double value = cur.psi * pen;

    Field grad = cur.gradient;
    scale(grad, pen);
    axpy(grad, cur.psi, pgrad);
    // Tangential projection (gradient of Psi is already tangential, the
    // penalty part generally is not).
    const double radial = h10_inner(grad, u);
    axpy(grad, -radial, u);
    const double gnorm = h10_norm(grad);
    if (gnorm <= tol) break;

    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
      Field cand = u;
      axpy(cand, -step, grad);
      const double cn = h10_norm(cand);
      if (!(cn > 0.0)) continue;
      scale(cand, 1.0 / cn);
      const AMembership mc = model.membership(cand);
      if (mc.region != Region::inside || mc.margin < margin_floor) continue;
      EnergyModel::PsiEval trial;
      try {
        trial = model.psi_eval(cand, fib);
      } catch (const FiberingError&) {
        continue;
      }
      const double trial_value = trial.psi * defl.penalty(cand, nullptr);
      if (trial_value <= value - 1e-4 * step * gnorm * gnorm) {
        u = std::move(cand);
        cur = std::move(trial);
        fib.hint = cur.fibering.t;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return u;
}

}  // namespace

MultiplicityReport multiplicity_search(const EnergyModel& model,
                                       const SpectrumResult& eta_spectrum,
                                       const MultiplicityOptions& opts) {
  MultiplicityReport report;
  report.seed = opts.solve.seed;
  report.config_digest = opts.solve.config_digest;
  report.target_pairs = eta_spectrum.s_m;
  report.pairing_note =
      "levels come in antipodal pairs {u, -u}; one canonical representative "
      "(largest-magnitude entry positive) is reported per pair";

  const auto& pairs = eta_spectrum.pairs;
  const int span_dim =
      static_cast<int>(std::min<std::size_t>(pairs.size(), std::max(eta_spectrum.s_m, 1)));
  if (pairs.empty()) {
    report.notes.push_back("weighted spectrum provided no eigenfunctions; nothing to start from");
    return report;
  }

  // Phase 1: deterministic battery of starts.  Eigenfunction directions
  // first, then random unit combinations inside the eigenspan.  Plain
  // descent from any start can only reach the ground pair (sign-changing
  // critical points are saddles of Psi), so every sign-changing start is
  // additionally dispatched through the nodal descent, which minimizes over
  // the componentwise-fibered counterpart of the manifold.
  std::vector<Field> starts;
  std::vector<std::string> labels;
  std::vector<StartMode> modes;
  auto push_start = [&](Field f, const std::string& label) {
    const auto comps = signed_components(f, opts.solve.sign_threshold_rel * f.max_abs());
    if (comps.size() >= 2) {
      starts.push_back(f);
      labels.push_back(label + " (nodal)");
      modes.push_back(StartMode::nodal);
    }
    starts.push_back(std::move(f));
    labels.push_back(label);
    modes.push_back(StartMode::plain);
  };
  for (int j = 0; j < span_dim; ++j)
    push_start(pairs[static_cast<std::size_t>(j)].e,
               "eigenfunction " + std::to_string(j + 1));
  SplitRng rng(opts.solve.seed);
  for (int r = 0; r < opts.random_starts; ++r) {
    SplitRng sub = rng.split("multiplicity-start", static_cast<std::uint64_t>(r));
    Field mix(model.grid_ptr());
    for (int j = 0; j < span_dim; ++j) {
      const double c = sub.normal();
      axpy(mix, c, pairs[static_cast<std::size_t>(j)].e);
    }
    const double nrm = h10_norm(mix);
    if (!(nrm > 0.0)) continue;
    scale(mix, 1.0 / nrm);
    push_start(std::move(mix), "random span combination " + std::to_string(r + 1));
  }

  std::vector<StartOutcome> outcomes(starts.size());
  const int threads = std::max(1, opts.threads);
  if (threads == 1 || starts.size() <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i)
      outcomes[i] = run_start(model, starts[i], opts.solve, labels[i], modes[i]);
  } else {
    // Starts are independent and the model is const; results land in a
    // preallocated slot per start so the merge order is deterministic.
    std::vector<std::thread> pool;
    const std::size_t total = starts.size();
    auto worker = [&](std::size_t stride, std::size_t offset) {
      for (std::size_t i = offset; i < total; i += stride)
        outcomes[i] = run_start(model, starts[i], opts.solve, labels[i], modes[i]);
    };
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), total);
    for (std::size_t t = 1; t < nt; ++t)
      pool.emplace_back(worker, nt, t);
    worker(nt, 0);
    for (auto& th : pool) th.join();
  }

  auto absorb = [&](const StartOutcome& out, const std::string& label) {
    if (!out.ok) {
      if (!out.note.empty()) report.notes.push_back(out.note);
      return;
    }
    if (out.report.status == SolveStatus::boundary_stall) {
      report.notes.push_back(label + ": descent stalled at the boundary of A");
      return;
    }
    if (out.report.status == SolveStatus::max_iterations &&
        out.report.psi_grad_norm > 1e3 * opts.solve.grad_tol) {
      report.notes.push_back(label + ": did not reach the gradient tolerance (|grad| = " +
                             std::to_string(out.report.psi_grad_norm) + ")");
      return;
    }
    for (const FoundSolution& s : report.solutions)
      if (same_pair(s, out.report, opts.distinct_rel_distance, opts.distinct_rel_level))
        return;
    FoundSolution sol;
    sol.u = out.report.u_star;
    canonicalize_pair(sol.u);
    sol.level = out.report.level;
    sol.residual = out.report.residual;
    sol.sign = sign_verdict(sol.u, opts.solve.sign_threshold_rel);
    sol.sign_changes = model.grid().dim() == 1
                           ? count_sign_changes(sol.u, opts.solve.sign_threshold_rel * sol.u.max_abs())
                           : -1;
    report.solutions.push_back(std::move(sol));
  };
  for (std::size_t i = 0; i < outcomes.size(); ++i) absorb(outcomes[i], labels[i]);

  // Phase 2: deflated restarts.  Each round repels the descent from every
  // pair found so far, then polishes the endpoint on the plain functional.
  const AMembership m1 = model.membership(pairs[0].e);
  const double margin_floor =
      opts.solve.boundary_floor_factor * std::max(m1.margin, 0.0);
  for (int round = 0; round < opts.deflated_rounds; ++round) {
    std::vector<Field> reps;
    reps.reserve(report.solutions.size());
    for (const FoundSolution& s : report.solutions) {
      const double nrm = h10_norm(s.u);
      Field rep = s.u;
      scale(rep, 1.0 / nrm);
      reps.push_back(std::move(rep));
    }

    SplitRng sub = rng.split("multiplicity-deflated", static_cast<std::uint64_t>(round));
    Field mix(model.grid_ptr());
    for (int j = 0; j < span_dim; ++j)
      axpy(mix, sub.normal(), pairs[static_cast<std::size_t>(j)].e);
    const double nrm = h10_norm(mix);
    if (!(nrm > 0.0)) continue;
    scale(mix, 1.0 / nrm);
    if (model.membership(mix).region != Region::inside) continue;

    Field moved = deflated_descent(model, std::move(mix), reps, opts.deflation_sigma,
                                   margin_floor);
    const std::string label = "deflated restart " + std::to_string(round + 1);
    absorb(run_start(model, moved, opts.solve, label, StartMode::plain), label);
  }

  std::stable_sort(report.solutions.begin(), report.solutions.end(),
                   [](const FoundSolution& a, const FoundSolution& b) {
                     return a.level < b.level;
                   });
  report.distinct_count = static_cast<int>(report.solutions.size());
  return report;
}

}  // namespace nehari

#include "nehari/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <thread>

#include "nehari/rng.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

namespace nehari {

namespace {

constexpr double kPi = 3.14159265358979323846;

void axpy(Field& y, double a, const Field& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool unit_normalize(Field& u) {
  const double nrm = h10_norm(u);
  if (!(nrm > 0.0)) return false;
  for (double& v : u.values()) v /= nrm;
  return true;
}

// A 1d working set: model, eta spectrum, and the eigenfunctions lying inside
// the cone A, enough to sample admissible fields cheaply.
struct Fixture {
  std::shared_ptr<const Grid> grid;
  std::unique_ptr<EnergyModel> model;
  SpectrumResult eta_spec;
  std::vector<const Field*> in_A;
  double lambda1_eta_minus_alpha = 0.0;
};

struct Fixtures {
  std::vector<Fixture> all;

  const Fixture& pick(SplitRng& rng) const {
    return all[static_cast<std::size_t>(rng.below(all.size()))];
  }
};

Fixture make_fixture(std::shared_ptr<const Nonlinearity> nl, int n) {
  Fixture fx;
  fx.grid = std::make_shared<Grid>(Grid::interval(kPi, n));
  fx.model = std::make_unique<EnergyModel>(fx.grid, std::move(nl));
  fx.eta_spec = weighted_eigs(fx.grid, fx.model->eta_nodes(), 8);
  for (const EigenPair& p : fx.eta_spec.pairs)
    if (p.lambda < 1.0 && fx.model->membership(p.e).region == Region::inside)
      fx.in_A.push_back(&p.e);
  std::vector<double> gap(fx.model->eta_nodes().size());
  for (std::size_t i = 0; i < gap.size(); ++i)
    gap[i] = std::max(fx.model->eta_nodes()[i] - fx.model->alpha_nodes()[i], 0.0);
  fx.lambda1_eta_minus_alpha = lambda1(fx.grid, std::move(gap));
  return fx;
}

Fixtures make_fixtures() {
  Fixtures f;
  f.all.push_back(make_fixture(
      std::make_shared<SmoothSaturation>(Weight(0.0), Weight(2.0)), 63));
  f.all.push_back(make_fixture(
      std::make_shared<SmoothSaturation>(Weight(0.3),
                                         Weight::expression("3.5 + sin(x1)")),
      63));
  f.all.push_back(make_fixture(
      std::make_shared<StrongResonance>(Weight(5.0), 4.5), 63));
  return f;
}

// Random unit field inside A: eigenspan combination plus a rough nodal
// perturbation shrunk until membership holds.
Field sample_in_A(const Fixture& fx, SplitRng rng) {
  Field base(fx.grid);
  for (const Field* e : fx.in_A) axpy(base, rng.normal(), *e);
  unit_normalize(base);
  Field rough(fx.grid);
  for (double& v : rough.values()) v = rng.normal();
  unit_normalize(rough);
  double eps = 0.4;
  for (int k = 0; k < 20; ++k, eps *= 0.5) {
    Field cand = base;
    axpy(cand, eps, rough);
    if (!unit_normalize(cand)) continue;
    if (fx.model->membership(cand).region == Region::inside) return cand;
  }
  return base;
}

double integral_fu(const EnergyModel& model, const Field& u) {
  const Grid& g = model.grid();
  std::vector<double> fi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    fi[i] = model.nonlinearity().f(g.node(i), u[i]);
  return g.cell_volume() * kahan_dot(fi.data(), u.values().data(), u.size());
}

using TrialFn = std::function<bool(SplitRng&, std::string&)>;

// Runs `trials` independent trials, each with its own split stream, recording
// the first failure witness.
void run_trials(PropertyResult& res, std::uint64_t seed, int trials,
                const TrialFn& fn) {
  SplitRng root(seed);
  for (int k = 0; k < trials; ++k) {
    SplitRng sub = root.split(res.name, static_cast<std::uint64_t>(k));
    std::string msg;
    bool ok = false;
    try {
      ok = fn(sub, msg);
    } catch (const std::exception& e) {
      msg = std::string("unexpected exception: ") + e.what();
    }
    ++res.trials;
    if (!ok) {
      ++res.failures;
      if (res.first_failure.empty()) {
        std::ostringstream os;
        os << "trial " << k << ": " << msg;
        res.first_failure = os.str();
      }
    }
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Kernel-level suites: random kernels, random evaluation points.

std::shared_ptr<const Nonlinearity> random_kernel(SplitRng& rng) {
  switch (rng.below(3)) {
    case 0: {
      const double eta = rng.uniform(0.5, 6.0);
      const double alpha = rng.uniform(0.0, 0.9) * eta;
      return std::make_shared<SmoothSaturation>(Weight(alpha), Weight(eta));
    }
    case 1: {
      // Spatially varying weights with a guaranteed gap.
      return std::make_shared<SmoothSaturation>(
          Weight::expression("0.2 + 0.1*cos(x1)"),
          Weight::expression("3 + sin(x1)*sin(x2)"));
    }
    default: {
      const double eta = rng.uniform(1.0, 6.0);
      const double c = rng.uniform(0.1, 0.9) * eta;
      return std::make_shared<StrongResonance>(Weight(eta), c);
    }
  }
}

Point random_point(SplitRng& rng) {
  return Point{rng.uniform(0.0, kPi), rng.uniform(0.0, kPi), rng.uniform(0.0, kPi)};
}

bool trial_resonance_gap_monotone(SplitRng& rng, std::string& msg) {
  const auto nl = random_kernel(rng);
  const Point x = random_point(rng);
  const double t2 = std::pow(10.0, rng.uniform(-4.0, 7.0));
  const double t1 = t2 * std::pow(10.0, rng.uniform(0.01, 1.0));
  // The families evaluate f t/2 - F in closed form; the literal difference
  // loses the O(beta) result under the eta t^2 / 2 bulk beyond |t| ~ 1e5.
  auto gap = [&](double t) { return nl->gap(x, t); };
  const double tol = 1e-11 * (std::abs(gap(t1)) + std::abs(gap(t2))) + 1e-300;
  if (gap(t1) < gap(t2) - tol) {
    msg = nl->name() + ": gap(" + fmt(t1) + ") = " + fmt(gap(t1)) + " < gap(" +
          fmt(t2) + ") = " + fmt(gap(t2)) + " on the positive axis";
    return false;
  }
  if (gap(-t1) < gap(-t2) - tol) {
    msg = nl->name() + ": gap decreasing violated on the negative axis at |t| = " +
          fmt(t1);
    return false;
  }
  return true;
}

bool trial_primitive_quotient(SplitRng& rng, std::string& msg) {
  const auto nl = random_kernel(rng);
  const Point x = random_point(rng);
  const double t2 = std::pow(10.0, rng.uniform(-4.0, 7.0));
  const double t1 = t2 * std::pow(10.0, rng.uniform(0.01, 1.0));
  auto quot = [&](double t) { return nl->F(x, t) / (t * t); };
  const double tol = 1e-11 * (std::abs(quot(t1)) + std::abs(quot(t2))) + 1e-300;
  if (quot(t1) < quot(t2) - tol || quot(-t1) < quot(-t2) - tol) {
    msg = nl->name() + ": F/t^2 not nondecreasing in |t| near t = " + fmt(t1);
    return false;
  }
  for (const double s : {t1, -t1, t2, -t2}) {
    const double lhs = nl->ratio(x, s);
    const double rhs = 2.0 * nl->F(x, s) / (s * s);
    if (!(lhs >= rhs - 1e-11 * (std::abs(lhs) + std::abs(rhs)))) {
      msg = nl->name() + ": f/t = " + fmt(lhs) + " fails to dominate 2F/t^2 = " +
            fmt(rhs) + " at t = " + fmt(s);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fibering suites.

bool trial_unique_root(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  int changes = 0;
  double prev = fx.model->phi(u, 1e-6);
  for (int k = 1; k <= 60; ++k) {
    const double t = 1e-6 * std::pow(10.0, 12.0 * k / 60.0);
    const double cur = fx.model->phi(u, t);
    if ((prev > 0.0 && cur < 0.0) || (prev < 0.0 && cur > 0.0)) ++changes;
    if (cur != 0.0) prev = cur;
  }
  if (changes != 1) {
    msg = "expected exactly one sign change of the scalar root function on the "
          "log grid, found " + std::to_string(changes);
    return false;
  }
  const FiberingResult fr = fx.model->fibering(u);
  if (!(fr.t > 1e-6 && fr.t < 1e6)) {
    msg = "root " + fmt(fr.t) + " escaped the scanned range";
    return false;
  }
  return true;
}

bool trial_scaling_law(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  const double t_u = fx.model->fibering(u).t;
  const double scales[4] = {0.5, 2.0, 10.0, std::pow(10.0, rng.uniform(-1.0, 2.0))};
  for (double s : scales) {
    const Field su = fx.model->scaled(u, s);
    const double t_su = fx.model->fibering(su).t;
    const double expected = t_u / s;
    if (std::abs(t_su - expected) > 1e-10 * expected) {
      msg = "scaling by " + fmt(s) + ": got " + fmt(t_su) + ", expected " +
            fmt(expected);
      return false;
    }
  }
  return true;
}

bool trial_rejects_outside(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  Field u(fx.grid);
  for (double& v : u.values()) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const AMembership m = fx.model->membership(u);
  if (m.region == Region::inside) {
    msg = "rough alternating field unexpectedly inside the cone (margin " +
          fmt(m.margin) + ")";
    return false;
  }
  try {
    (void)fx.model->fibering(u);
  } catch (const NotInAError&) {
    return true;
  }
  msg = "fibering accepted a field outside the cone";
  return false;
}

bool trial_projection_roundtrip(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  const double t_u = fx.model->fibering(u).t;
  Field w = fx.model->scaled(u, t_u);  // the projection onto the manifold

  // Inverse then forward on the sphere point.
  Field back = w;
  const double wn = h10_norm(w);
  for (double& v : back.values()) v /= wn;
  Field diff = back;
  axpy(diff, -1.0, u);
  if (h10_norm(diff) > 1e-12) {
    msg = "sphere roundtrip drifted by " + fmt(h10_norm(diff));
    return false;
  }

  // Forward then inverse on the manifold point.
  const double t_back = fx.model->fibering(back).t;
  Field w2 = fx.model->scaled(back, t_back);
  Field diff2 = w2;
  axpy(diff2, -1.0, w);
  if (h10_norm(diff2) > 1e-10 * wn) {
    msg = "manifold roundtrip drifted by " + fmt(h10_norm(diff2) / wn) +
          " relative";
    return false;
  }
  return true;
}

bool trial_nehari_inside(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  const double t_u = fx.model->fibering(u).t;
  const Field w = fx.model->scaled(u, t_u);
  const AMembership m = fx.model->membership(w);
  if (m.region != Region::inside) {
    msg = "projected point not inside the cone (margin " + fmt(m.margin) + ")";
    return false;
  }
  const double norm2 = h10_inner(w, w);
  const double rhs = integral_fu(*fx.model, w);
  if (std::abs(norm2 - rhs) > 1e-10 * norm2) {
    msg = "manifold identity residual " + fmt(std::abs(norm2 - rhs) / norm2) +
          " relative";
    return false;
  }
  return true;
}

bool trial_level_positive(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  const FiberingResult fr = fx.model->fibering(u);
  if (!(fr.psi > 0.0)) {
    msg = "reduced level " + fmt(fr.psi) + " is not positive";
    return false;
  }
  return true;
}

bool trial_level_bound(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  const FiberingResult fr = fx.model->fibering(u);

  // Intermediate bound: the level is below half the weighted-gap mass of the
  // projected point...
  const Field w = fx.model->scaled(u, fr.t);
  double gap_mass = 0.0;
  {
    const auto& eta = fx.model->eta_nodes();
    const auto& alpha = fx.model->alpha_nodes();
    std::vector<double> tmp(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = (eta[i] - alpha[i]) * w[i];
    gap_mass = fx.grid->cell_volume() *
               kahan_dot(tmp.data(), w.values().data(), w.size());
  }
  if (fr.psi > 0.5 * gap_mass * (1.0 + 1e-10)) {
    msg = "level " + fmt(fr.psi) + " exceeds half the weighted-gap mass " +
          fmt(0.5 * gap_mass);
    return false;
  }
  // ... and therefore below t^2 / (2 lambda1(eta - alpha)).
  const double bound = fr.t * fr.t / (2.0 * fx.lambda1_eta_minus_alpha);
  if (fr.psi > bound * (1.0 + 1e-8)) {
    msg = "level " + fmt(fr.psi) + " exceeds the eigenvalue bound " + fmt(bound);
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Gradient consistency suites.

bool trial_energy_gradient(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  Field u = sample_in_A(fx, rng.split("u"));
  for (double& v : u.values()) v *= rng.uniform(0.5, 3.0);
  Field dir(fx.grid);
  {
    SplitRng d = rng.split("v");
    for (double& v : dir.values()) v = d.normal();
    // Smooth the direction so the finite-difference curvature term stays
    // resolvable: one stiffness solve turns white noise into an H10 field.
    Field smooth(fx.grid);
    fx.model->stiffness().solve(dir.values().data(), smooth.values().data());
    dir = std::move(smooth);
    if (!unit_normalize(dir)) return true;
  }
  const Field g = fx.model->energy_gradient(u);
  const double analytic = h10_inner(g, dir);
  const double eps = 1e-5;
  Field up = u;
  Field um = u;
  axpy(up, eps, dir);
  axpy(um, -eps, dir);
  const double fd = (fx.model->energy(up) - fx.model->energy(um)) / (2.0 * eps);
  const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-10});
  if (std::abs(fd - analytic) > 1e-5 * scale) {
    msg = "directional derivative " + fmt(fd) + " vs gradient pairing " +
          fmt(analytic);
    return false;
  }
  return true;
}

bool trial_reduced_gradient(const Fixtures& fxs, SplitRng& rng, std::string& msg) {
  const Fixture& fx = fxs.pick(rng);
  const Field u = sample_in_A(fx, rng.split("u"));
  Field dir(fx.grid);
  {
    SplitRng d = rng.split("v");
    for (double& v : dir.values()) v = d.normal();
    Field smooth(fx.grid);
    fx.model->stiffness().solve(dir.values().data(), smooth.values().data());
    dir = std::move(smooth);
    const double radial = h10_inner(dir, u);
    axpy(dir, -radial, u);
    if (!unit_normalize(dir)) return true;
  }
  const EnergyModel::PsiEval pe = fx.model->psi_eval(u);
  const double analytic = h10_inner(pe.gradient, dir);
  const double eps = 1e-5;
  auto psi_at = [&](double step) {
    Field v = u;
    axpy(v, step, dir);
    unit_normalize(v);
    return fx.model->fibering(v).psi;
  };
  const double fd = (psi_at(eps) - psi_at(-eps)) / (2.0 * eps);
  const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-10});
  if (std::abs(fd - analytic) > 1e-5 * scale) {
    msg = "reduced directional derivative " + fmt(fd) + " vs gradient pairing " +
          fmt(analytic);
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Support-limit suite: the liminf-support inequality on randomized sequences,
// including adversarial alternating supports and sign flips.

bool trial_support_limit(SplitRng& rng, std::string& msg) {
  auto grid = std::make_shared<Grid>(Grid::interval(1.0, 31));
  const std::size_t n = grid->num_nodes();
  const int len = 4 + static_cast<int>(rng.below(8));
  std::vector<Field> useq;
  std::vector<Field> vseq;
  const int scheme = static_cast<int>(rng.below(4));
  Field base(grid);
  for (double& x : base.values()) x = rng.normal();
  for (int k = 0; k < len; ++k) {
    Field u(grid);
    Field v(grid);
    for (std::size_t i = 0; i < n; ++i) {
      switch (scheme) {
        case 0:  // alternating parity supports
          u[i] = (i % 2 == static_cast<std::size_t>(k % 2)) ? rng.normal() : 0.0;
          break;
        case 1:  // shrinking support
          u[i] = (i < n - static_cast<std::size_t>(k) * 2) ? rng.normal() : 0.0;
          break;
        case 2:  // sign-flipping fixed support
          u[i] = (i % 3 != 0) ? (k % 2 ? -base[i] : base[i]) : 0.0;
          break;
        default:  // random sparse supports
          u[i] = rng.uniform() < 0.6 ? rng.normal() : 0.0;
      }
      v[i] = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.0, 2.0);
    }
    useq.push_back(std::move(u));
    vseq.push_back(std::move(v));
  }
  const FatouCheck fc = fatou_support_check(useq, vseq);
  if (!fc.holds) {
    msg = "support inequality violated: lhs " + fmt(fc.lhs) + " > rhs " +
          fmt(fc.rhs) + " (scheme " + std::to_string(scheme) + ", " +
          std::to_string(fc.witness_nodes.size()) + " witness nodes)";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Spectrum suites (eigensolve-heavy; runs a capped trial share).

bool trial_spectrum_scaling(SplitRng& rng, std::string& msg) {
  auto grid = std::make_shared<Grid>(Grid::interval(kPi, 40));
  const double c = rng.uniform(0.3, 5.0);
  const double base = rng.uniform(0.5, 3.0);
  const double l1 = lambda1(grid, std::vector<double>(grid->num_nodes(), base));
  const double lc = lambda1(grid, std::vector<double>(grid->num_nodes(), c * base));
  if (std::abs(lc * c - l1) > 1e-7 * l1) {
    msg = "weight scaling broke the eigenvalue law: " + fmt(lc * c) + " vs " +
          fmt(l1);
    return false;
  }
  return true;
}

bool trial_spectrum_orthonormal(SplitRng& rng, std::string& msg) {
  auto grid = std::make_shared<Grid>(Grid::interval(kPi, 40));
  const double c = rng.uniform(0.5, 4.0);
  const SpectrumResult s =
      weighted_eigs(grid, std::vector<double>(grid->num_nodes(), c), 4);
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double ip = h10_inner(s.pairs[i].e, s.pairs[j].e);
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(ip - want) > 1e-6) {
        msg = "eigenvector pairing (" + std::to_string(i) + "," + std::to_string(j) +
              ") = " + fmt(ip);
        return false;
      }
    }
    if (i + 1 < s.pairs.size() && s.pairs[i].lambda > s.pairs[i + 1].lambda) {
      msg = "eigenvalues out of order";
      return false;
    }
  }
  return true;
}

struct Suite {
  std::string name;
  bool heavy = false;  // eigensolves per trial: runs trials/50 (at least 8)
  std::function<bool(const Fixtures&, SplitRng&, std::string&)> fn;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> s = [] {
    std::vector<Suite> v;
    auto add = [&](const std::string& name, bool heavy,
                   std::function<bool(const Fixtures&, SplitRng&, std::string&)> fn) {
      v.push_back(Suite{name, heavy, std::move(fn)});
    };
    add("kernel-resonance-gap-monotone", false,
        [](const Fixtures&, SplitRng& r, std::string& m) {
          return trial_resonance_gap_monotone(r, m);
        });
    add("kernel-primitive-quotient", false,
        [](const Fixtures&, SplitRng& r, std::string& m) {
          return trial_primitive_quotient(r, m);
        });
    add("fibering-unique-root", false, trial_unique_root);
    add("fibering-scaling-law", false, trial_scaling_law);
    add("fibering-rejects-outside-cone", false, trial_rejects_outside);
    add("projection-roundtrip", false, trial_projection_roundtrip);
    add("manifold-points-inside-cone", false, trial_nehari_inside);
    add("reduced-level-positive", false, trial_level_positive);
    add("reduced-level-eigenvalue-bound", false, trial_level_bound);
    add("energy-gradient-consistency", false, trial_energy_gradient);
    add("reduced-gradient-consistency", false, trial_reduced_gradient);
    add("support-limit-inequality", false,
        [](const Fixtures&, SplitRng& r, std::string& m) {
          return trial_support_limit(r, m);
        });
    add("spectrum-weight-scaling", true,
        [](const Fixtures&, SplitRng& r, std::string& m) {
          return trial_spectrum_scaling(r, m);
        });
    add("spectrum-orthonormal-pairs", true,
        [](const Fixtures&, SplitRng& r, std::string& m) {
          return trial_spectrum_orthonormal(r, m);
        });
    return v;
  }();
  return s;
}

}  // namespace

std::vector<std::string> property_names() {
  std::vector<std::string> names;
  for (const Suite& s : suites()) names.push_back(s.name);
  return names;
}

std::vector<PropertyResult> run_properties(const PropertyOptions& opts) {
  std::vector<const Suite*> selected;
  for (const Suite& s : suites())
    if (opts.filter.empty() || s.name.find(opts.filter) != std::string::npos)
      selected.push_back(&s);

  const Fixtures fxs = make_fixtures();
  std::vector<PropertyResult> results(selected.size());

  auto run_one = [&](std::size_t i) {
    const Suite& s = *selected[i];
    PropertyResult& res = results[i];
    res.name = s.name;
    const int trials = s.heavy ? std::max(8, opts.trials / 50) : opts.trials;
    run_trials(res, opts.seed, trials, [&](SplitRng& rng, std::string& msg) {
      return s.fn(fxs, rng, msg);
    });
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || selected.size() <= 1) {
    for (std::size_t i = 0; i < selected.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    const std::size_t nt =
        std::min<std::size_t>(static_cast<std::size_t>(threads), selected.size());
    for (std::size_t t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < selected.size(); i += nt) run_one(i);
      });
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace nehari

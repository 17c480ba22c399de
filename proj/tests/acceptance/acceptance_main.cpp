// Acceptance gate: ten end-to-end criteria, one pass/fail line each.
// Every numeric target is checked against an independent oracle computed
// here (quadrature, shooting, closed forms) rather than against recorded
// output of the library itself.  Exit status is the number of failed
// criteria (0 = all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nehari/conditions.hpp"
#include "nehari/errors.hpp"
#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/properties.hpp"
#include "nehari/report.hpp"
#include "nehari/rng.hpp"
#include "nehari/runner.hpp"
#include "nehari/solver.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"
#include "oracles.hpp"

using namespace nehari;
using fixtures::kPi;
namespace fs = std::filesystem;

namespace {

// Collects failure details for one criterion; empty means pass.
struct Check {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& detail) {
    if (!ok) failures.push_back(detail);
  }
  template <typename T>
  void close(T got, T want, T tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << format_real(got) << ", want " << format_real(want)
         << " +/- " << format_real(tol);
      failures.push_back(os.str());
    }
  }
};

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

void axpy(Field& y, double a, const Field& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool unit_normalize(Field& u) {
  const double nrm = h10_norm(u);
  if (!(nrm > 0.0)) return false;
  for (double& v : u.values()) v /= nrm;
  return true;
}

// Random unit field inside A with a healthy cone margin, so fibering roots
// stay within the scanned window.
Field comfortable_start(const EnergyModel& model, const std::vector<EigenPair>& pairs,
                        SplitRng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Field u = fixtures::random_in_A(model, pairs, rng);
    if (model.membership(u).margin >= 0.05) return u;
  }
  throw ModelError("could not sample a comfortable field inside A");
}

// ---------------------------------------------------------------------------
// 1. Spectrum accuracy against the continuum Dirichlet eigenvalues.
void criterion_spectrum(Check& c) {
  auto grid1 = std::make_shared<Grid>(Grid::interval(kPi, 1024));
  const SpectrumResult s1 = weighted_eigs(grid1, Weight(1.0), 3);
  c.require(s1.pairs.size() >= 3, "1d solve returned fewer than 3 pairs");
  if (s1.pairs.size() >= 3) {
    c.close(s1.pairs[0].lambda, 1.0, 1e-3, "1d lambda_1");
    c.close(s1.pairs[1].lambda, 4.0, 1e-3, "1d lambda_2");
    c.close(s1.pairs[2].lambda, 9.0, 1e-3, "1d lambda_3");
  }

  auto grid2 = std::make_shared<Grid>(Grid::box(kPi, kPi, 128, 128));
  const SpectrumResult s2 = weighted_eigs(grid2, Weight(1.0), 4);
  c.require(!s2.pairs.empty(), "2d solve returned no pairs");
  if (!s2.pairs.empty()) c.close(s2.pairs[0].lambda, 2.0, 1e-2, "2d lambda_1");
  bool found_pair_at_5 = false;
  for (const EigenCluster& cl : s2.clusters)
    if (std::abs(cl.lambda - 5.0) <= 5e-2 && cl.multiplicity == 2)
      found_pair_at_5 = true;
  c.require(found_pair_at_5, "2d cluster at 5 with multiplicity 2 not detected");
}

// ---------------------------------------------------------------------------
// 2. Fibering: unique scalar root, exact scaling law, cone rejection.
void criterion_fibering(Check& c) {
  const EnergyModel model = fixtures::smooth_model(511, 0.0, 2.0);
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 3);

  // log-spaced scan grid, 40 points per decade over [1e-6, 1e6]
  std::vector<double> ts;
  for (int k = -240; k <= 240; ++k) ts.push_back(std::pow(10.0, k / 40.0));

  SplitRng rng(421);
  int bad_root_count = 0, bad_scaling = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field u = comfortable_start(model, spec.pairs, rng);
    int crossings = 0;
    double prev = model.phi(u, ts.front());
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const double cur = model.phi(u, ts[k]);
      if (prev * cur < 0.0) ++crossings;
      prev = cur;
    }
    if (crossings != 1) ++bad_root_count;

    const FiberingResult base = model.fibering(u);
    for (double s : {0.5, 2.0, 10.0}) {
      const FiberingResult scaledr = model.fibering(model.scaled(u, s));
      if (std::abs(scaledr.t * s - base.t) > 1e-10 * base.t) ++bad_scaling;
    }
  }
  c.require(bad_root_count == 0,
            std::to_string(bad_root_count) + "/100 fields lacked a unique scan root");
  c.require(bad_scaling == 0,
            std::to_string(bad_scaling) + " scaling checks broke t_{su} = t_u / s");

  // Fields outside the cone must be rejected with the typed error.
  int rejected = 0;
  const int outside_trials = 20;
  for (int trial = 0; trial < outside_trials; ++trial) {
    Field u(model.grid_ptr());
    if (trial % 2 == 0) {
      SplitRng sub = rng.split("rademacher", static_cast<std::uint64_t>(trial));
      for (double& v : u.values()) v = sub.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      u = Field(model.grid_ptr(), fixtures::sine_mode_1d(2 + trial % 3, 511));
    }
    unit_normalize(u);
    try {
      (void)model.fibering(u);
    } catch (const NotInAError&) {
      ++rejected;
    }
  }
  c.require(rejected == outside_trials,
            "only " + std::to_string(rejected) + "/" +
                std::to_string(outside_trials) + " outside fields raised NotInA");
}

// ---------------------------------------------------------------------------
// 3. Projection homeomorphism roundtrips between the sphere and the manifold.
void criterion_roundtrips(Check& c) {
  const EnergyModel model = fixtures::smooth_model(511, 0.0, 2.0);
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 3);
  SplitRng rng(7311);
  double worst_forward = 0.0, worst_backward = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field u = comfortable_start(model, spec.pairs, rng);
    const FiberingResult fr = model.fibering(u);
    const Field w = model.scaled(u, fr.t);  // manifold point m(u)

    // sphere -> manifold -> sphere
    Field back = w;
    const double wn = h10_norm(back);
    for (double& v : back.values()) v /= wn;
    double diff = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i)
      diff = std::max(diff, std::abs(back[i] - u[i]));
    worst_forward = std::max(worst_forward, diff);

    // manifold -> sphere -> manifold (fibering recomputed from scratch)
    const FiberingResult fr2 = model.fibering(back);
    const Field w2 = model.scaled(back, fr2.t);
    double rel = 0.0;
    Field delta = w2;
    axpy(delta, -1.0, w);
    rel = h10_norm(delta) / std::max(1.0, h10_norm(w));
    worst_backward = std::max(worst_backward, rel);
  }
  c.require(worst_forward <= 1e-12,
            "sphere roundtrip deviation " + format_real(worst_forward) + " > 1e-12");
  c.require(worst_backward <= 1e-10,
            "manifold roundtrip deviation " + format_real(worst_backward) + " > 1e-10");
}

// ---------------------------------------------------------------------------
// 4. Gradient consistency against central finite differences.
void criterion_gradients(Check& c) {
  const EnergyModel model = fixtures::smooth_model(255, 0.0, 2.0);
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 3);
  SplitRng rng(88);

  // Smooth random direction: white noise passed once through the inverse
  // stiffness operator, which suppresses the grid-frequency components that
  // would dominate finite-difference truncation error.
  auto smooth_direction = [&](SplitRng& r) {
    Field w(model.grid_ptr());
    for (double& v : w.values()) v = r.normal();
    Field s(model.grid_ptr());
    model.stiffness().solve(w.values().data(), s.values().data());
    unit_normalize(s);
    return s;
  };

  int checked_energy = 0;
  double worst_energy = 0.0;
  while (checked_energy < 50) {
    const Field u = comfortable_start(model, spec.pairs, rng);
    const Field g = model.energy_gradient(u);
    Field v = smooth_direction(rng);
    const double overlap = h10_inner(g, v);
    const double scale = h10_norm(g) * h10_norm(v);
    if (std::abs(overlap) < 0.05 * scale) continue;  // ill-conditioned direction
    ++checked_energy;
    const double eps = 1e-5;
    Field up = u, dn = u;
    axpy(up, eps, v);
    axpy(dn, -eps, v);
    const double fd = (model.energy(up) - model.energy(dn)) / (2.0 * eps);
    worst_energy = std::max(worst_energy, rel_gap(fd, overlap));
  }
  c.require(worst_energy <= 1e-5,
            "energy gradient vs FD relative gap " + format_real(worst_energy));

  int checked_psi = 0;
  double worst_psi = 0.0;
  while (checked_psi < 50) {
    const Field u = comfortable_start(model, spec.pairs, rng);
    const Field g = model.psi_gradient(u);
    Field v = smooth_direction(rng);
    const double radial = h10_inner(v, u);
    axpy(v, -radial, u);  // tangential direction
    if (!unit_normalize(v)) continue;
    const double overlap = h10_inner(g, v);
    const double scale = h10_norm(g);
    if (std::abs(overlap) < 0.05 * scale) continue;
    ++checked_psi;
    const double eps = 1e-5;
    Field up = u, dn = u;
    axpy(up, eps, v);
    axpy(dn, -eps, v);
    unit_normalize(up);
    unit_normalize(dn);
    const double fd =
        (model.psi_eval(up).psi - model.psi_eval(dn).psi) / (2.0 * eps);
    worst_psi = std::max(worst_psi, rel_gap(fd, overlap));
  }
  c.require(worst_psi <= 1e-5,
            "reduced gradient vs FD relative gap " + format_real(worst_psi));
}

// ---------------------------------------------------------------------------
// 5. Ground state level against the shooting-method oracle.
void criterion_ground_state(Check& c) {
  const int n = 2047;  // spacing pi / 2048
  const EnergyModel model = fixtures::smooth_model(n, 0.0, 2.0);
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 1);
  const SolveReport sr = minimize_psi(model, spec.pairs[0].e);

  c.require(sr.status == SolveStatus::converged,
            std::string("solver status ") + to_string(sr.status));
  c.require(sr.level > 0.0, "ground level not positive: " + format_real(sr.level));
  c.require(sr.sign_verdict == "positive" || sr.sign_verdict == "negative",
            "ground state not signed: " + sr.sign_verdict);

  // Nehari identity |u|^2 = integral f(u) u, evaluated on the returned point.
  const Field& w = sr.u_star;
  const Grid& g = model.grid();
  std::vector<double> fw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    fw[i] = model.nonlinearity().f(g.node(i), w[i]);
  const double mass = g.cell_volume() *
                      kahan_dot(fw.data(), w.values().data(), w.size());
  const double norm2 = h10_inner(w, w);
  const double identity_residual = std::abs(norm2 - mass) / std::max(1.0, norm2);
  c.require(identity_residual <= 1e-10,
            "Nehari identity residual " + format_real(identity_residual));

  const auto shot = oracle::shoot_nodal(
      [](double t) { return 2.0 * t * t * t / (1.0 + t * t); },
      [](double t) { return t * t - std::log1p(t * t); }, kPi, 0, 32);
  const double gap = rel_gap(sr.level, shot.level);
  c.require(gap <= 1e-3, "level vs shooting oracle: relative gap " +
                             format_real(gap) + " (solver " +
                             format_real(sr.level) + ", oracle " +
                             format_real(shot.level) + ")");
}

// ---------------------------------------------------------------------------
// 6. Multiplicity: two distinct pairs, second one sign-changing with one node.
void criterion_multiplicity(Check& c) {
  const EnergyModel model = fixtures::smooth_model(511, 0.0, 5.0);
  ConditionOptions copts;
  const F2Result f2 = check_f2(model, copts);
  c.require(f2.s_m == 2, "s_m = " + std::to_string(f2.s_m) + ", want 2");

  MultiplicityOptions mo;
  const MultiplicityReport mr = multiplicity_search(model, f2.eta_spectrum, mo);
  c.require(mr.distinct_count >= 2,
            "found " + std::to_string(mr.distinct_count) + " distinct pair(s)");
  if (mr.solutions.size() >= 2) {
    const FoundSolution& ground = mr.solutions[0];
    const FoundSolution& excited = mr.solutions[1];
    c.require(ground.sign == "positive" || ground.sign == "negative",
              "lowest pair not signed: " + ground.sign);
    c.require(excited.sign == "sign-changing",
              "second pair not sign-changing: " + excited.sign);
    c.require(excited.sign_changes == 1,
              "second pair interior nodes: " +
                  std::to_string(excited.sign_changes) + ", want 1");

    // Shooting oracle enumeration for eta = 5: the one-node branch level.
    auto f = [](double t) {
      return t * (5.0 * t * t / (1.0 + t * t));
    };
    auto F = [](double t) { return 2.5 * (t * t - std::log1p(t * t)); };
    const auto node1 = oracle::shoot_nodal(f, F, kPi, 1, 32);
    const double gap = rel_gap(excited.level, node1.level);
    c.require(gap <= 1e-3,
              "one-node level vs oracle: relative gap " + format_real(gap));
    const auto node0 = oracle::shoot_nodal(f, F, kPi, 0, 32);
    const double gap0 = rel_gap(ground.level, node0.level);
    c.require(gap0 <= 1e-3,
              "ground level vs oracle: relative gap " + format_real(gap0));
    c.require(node0.interior_zeros == 0 && node1.interior_zeros == 1,
              "oracle nodal enumeration inconsistent");
  }
}

// ---------------------------------------------------------------------------
// 7. Lemma-derived property suites at one thousand trials each.
void criterion_property_suites(Check& c) {
  PropertyOptions po;
  po.seed = 2024;
  po.trials = 1000;
  const std::vector<PropertyResult> results = run_properties(po);
  c.require(!results.empty(), "no property suites registered");
  for (const PropertyResult& r : results)
    c.require(r.failures == 0, "suite '" + r.name + "': " +
                                   std::to_string(r.failures) + " failure(s), first: " +
                                   r.first_failure);
  for (const char* name :
       {"kernel-resonance-gap-monotone", "reduced-level-eigenvalue-bound",
        "reduced-level-positive", "manifold-points-inside-cone"}) {
    bool seen = false;
    for (const PropertyResult& r : results)
      if (r.name == name) {
        seen = true;
        c.require(r.trials >= 1000, "suite '" + r.name + "' ran only " +
                                        std::to_string(r.trials) + " trials");
      }
    c.require(seen, std::string("suite '") + name + "' missing");
  }
}

// ---------------------------------------------------------------------------
// 8. Generalized Fatou support inequality on randomized sequences.
void criterion_fatou(Check& c) {
  auto grid = std::make_shared<Grid>(Grid::interval(kPi, 33));
  const std::size_t n = grid->num_nodes();
  SplitRng rng(5150);
  int failures = 0;
  std::string first;
  for (int trial = 0; trial < 1000; ++trial) {
    SplitRng sub = rng.split("fatou", static_cast<std::uint64_t>(trial));
    const int len = 4 + static_cast<int>(sub.below(5));
    const int style = trial % 4;
    std::vector<Field> us, vs;
    for (int k = 0; k < len; ++k) {
      Field u(grid), v(grid);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::abs(sub.normal());  // admissible: nonnegative
        switch (style) {
          case 0:  // dense random supports
            u[i] = sub.normal();
            break;
          case 1:  // adversarial: support alternates between odd/even nodes
            u[i] = (i % 2 == static_cast<std::size_t>(k % 2)) ? sub.normal() : 0.0;
            break;
          case 2:  // shrinking left-aligned supports
            u[i] = (i < n - static_cast<std::size_t>(k)) ? sub.normal() : 0.0;
            break;
          default:  // random sparse supports
            u[i] = sub.uniform() < 0.35 ? sub.normal() : 0.0;
        }
      }
      us.push_back(std::move(u));
      vs.push_back(std::move(v));
    }
    const FatouCheck fc = fatou_support_check(us, vs);
    if (!fc.holds) {
      ++failures;
      if (first.empty())
        first = "trial " + std::to_string(trial) + " style " + std::to_string(style) +
                ": lhs " + format_real(fc.lhs) + " > rhs " + format_real(fc.rhs);
    }
  }
  c.require(failures == 0, std::to_string(failures) +
                               "/1000 sequences violated the inequality; first: " + first);
}

// ---------------------------------------------------------------------------
// 9. Compactness threshold arithmetic and verdicts on the 3d resonance family.
void criterion_conditions(Check& c) {
  ConditionOptions copts;
  copts.seed = 17;
  copts.tau_samples = 4;
  copts.tau_m_samples = 24;

  // Main instance: eta = 6, c = 4 on the 17^3 grid; the threshold holds.
  {
    const EnergyModel model = fixtures::resonance_model_3d(17, 6.0, 4.0);
    const ConditionReport rep = check_conditions(model, copts);
    c.require(rep.verdict_f2 == Verdict::holds,
              std::string("main: eigenvalue hypothesis ") + to_string(rep.verdict_f2));
    c.require(rep.verdict_beta == Verdict::holds,
              std::string("main: compactness verdict ") + to_string(rep.verdict_beta));

    // The Sobolev constant entering S^{3/2} against the radial-profile
    // quadrature oracle.
    const double S_oracle = oracle::talenti_rayleigh_quotient();
    c.require(rel_gap(rep.sobolev_S, S_oracle) <= 1e-10,
              "sobolev constant: report " + format_real(rep.sobolev_S) +
                  " vs oracle " + format_real(S_oracle));

    // Stored threshold must reproduce from its own logged intermediates.
    const double recomputed =
        rep.eta_sup * rep.tau_estimate * rep.tau_estimate /
        (2.0 * rep.lambda1_eta_minus_alpha * std::pow(rep.sobolev_S, 1.5));
    c.require(rel_gap(rep.rhs_beta, recomputed) <= 1e-12,
              "threshold fails to reproduce from logged fields: " +
                  format_real(rel_gap(rep.rhs_beta, recomputed)));

    // Analytic reduction: for this family eta - alpha = c, so
    //   threshold * (c * lambda_1(eta - alpha)) / 3 = c * tau^2 / S^{3/2}
    // exactly (in the continuum lambda_1(c) = 3/c on this domain, hence the
    // division by three).
    const double lambda_hat = 4.0 * rep.lambda1_eta_minus_alpha;
    const double reduced =
        4.0 * rep.tau_estimate * rep.tau_estimate / std::pow(rep.sobolev_S, 1.5);
    c.require(rel_gap(rep.rhs_beta * lambda_hat / 3.0, reduced) <= 1e-10,
              "analytic reduction mismatch: " +
                  format_real(rel_gap(rep.rhs_beta * lambda_hat / 3.0, reduced)));
    c.require(rel_gap(lambda_hat, 3.0) <= 1e-2,
              "discrete unit-weight eigenvalue drifted from 3: " +
                  format_real(lambda_hat));
  }

  // Forced violation: eta = 3 squeezes the cone (lambda_1 barely below one),
  // so tau blows up while essinf beta = 1 stays put; the verdict must fail.
  {
    const EnergyModel model = fixtures::resonance_model_3d(17, 3.0, 1.0);
    const ConditionReport rep = check_conditions(model, copts);
    c.require(rep.verdict_f2 == Verdict::holds,
              std::string("violation: eigenvalue hypothesis ") +
                  to_string(rep.verdict_f2));
    c.require(rep.verdict_beta == Verdict::fails,
              std::string("violation: compactness verdict ") +
                  to_string(rep.verdict_beta) + ", want fails (rhs " +
                  format_real(rep.rhs_beta) + " vs essinf " +
                  format_real(rep.essinf_beta) + ")");
  }

  // Saturation kernels have beta = +infinity: holds in every dimension.
  {
    const EnergyModel d1 = fixtures::smooth_model(63, 0.0, 2.0);
    auto g2 = std::make_shared<Grid>(Grid::box(kPi, kPi, 15, 15));
    const EnergyModel d2(g2, std::make_shared<SmoothSaturation>(Weight(0.0), Weight(3.0)));
    auto g3 = std::make_shared<Grid>(Grid::box(kPi, kPi, kPi, 9, 9, 9));
    const EnergyModel d3(g3, std::make_shared<SmoothSaturation>(Weight(0.0), Weight(4.0)));
    int dim = 1;
    for (const EnergyModel* m : {&d1, &d2, &d3}) {
      const ConditionReport rep = check_conditions(*m, copts);
      c.require(rep.verdict_beta == Verdict::holds &&
                    rep.verdict_beta_m == Verdict::holds,
                "saturation kernel at d = " + std::to_string(dim) +
                    ": verdicts " + to_string(rep.verdict_beta) + "/" +
                    to_string(rep.verdict_beta_m));
      ++dim;
    }
  }
}

// ---------------------------------------------------------------------------
// 10. Byte-identical reports modulo the wall-time line.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("wall_time_seconds") == std::string::npos) out += line + "\n";
  return out;
}

void criterion_determinism(Check& c) {
  const fs::path base = fs::temp_directory_path() / "nehari_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "run.cfg";
  {
    std::ofstream out(cfg, std::ios::binary);
    out << "[domain]\ndim = 1\nnodes = 255\n"
        << "[nonlinearity]\nfamily = smooth-saturation\nalpha = 0\neta = 2\n";
  }
  for (const std::string& sub : {std::string("check"), std::string("solve")}) {
    const int code_a = run_cli({sub, "--config", cfg.string(), "--seed", "11",
                                "--out", (base / (sub + "_a")).string(), "--quiet"});
    const int code_b = run_cli({sub, "--config", cfg.string(), "--seed", "11",
                                "--out", (base / (sub + "_b")).string(), "--quiet"});
    c.require(code_a == code_b, sub + ": exit codes differ across reruns");
    c.require(code_a == 0, sub + ": exit code " + std::to_string(code_a));
    const std::string a = slurp(base / (sub + "_a") / "report.json");
    const std::string b = slurp(base / (sub + "_b") / "report.json");
    c.require(!a.empty(), sub + ": empty report");
    c.require(strip_wall_time(a) == strip_wall_time(b),
              sub + ": reports differ beyond the wall-time field");
    c.require(a.find("\"wall_time_seconds\":") != std::string::npos,
              sub + ": report lacks the wall-time field");
  }
  const std::string sa = slurp(base / "solve_a" / "solution.csv");
  const std::string sb = slurp(base / "solve_b" / "solution.csv");
  c.require(!sa.empty() && sa == sb, "solution dumps differ across reruns");
}

struct Criterion {
  const char* name;
  double budget_seconds;  // 0 = no stated budget
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"spectrum accuracy (1d and 2d Dirichlet eigenvalues)", 30.0, criterion_spectrum},
      {"fibering uniqueness, scaling law, cone rejection", 10.0, criterion_fibering},
      {"sphere/manifold projection roundtrips", 0.0, criterion_roundtrips},
      {"gradient consistency vs central differences", 0.0, criterion_gradients},
      {"ground-state level vs shooting oracle", 20.0, criterion_ground_state},
      {"multiplicity search and nodal structure", 60.0, criterion_multiplicity},
      {"lemma property suites, 1000 trials each", 0.0, criterion_property_suites},
      {"generalized Fatou support inequality", 0.0, criterion_fatou},
      {"compactness threshold arithmetic and verdicts", 120.0, criterion_conditions},
      {"byte-identical reports modulo wall time", 0.0, criterion_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& cr = criteria[i];
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("unexpected exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_seconds > 0.0 && elapsed >= cr.budget_seconds)
      check.failures.push_back("runtime " + format_real(elapsed) + " s exceeded the " +
                               format_real(cr.budget_seconds) + " s budget");

    const bool ok = check.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] %2zu/10 %s (%.1f s)\n", ok ? "PASS" : "FAIL", i + 1, cr.name,
                elapsed);
    for (const std::string& f : check.failures)
      std::printf("         - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed);
  return failed == 0 ? 0 : 1;
}

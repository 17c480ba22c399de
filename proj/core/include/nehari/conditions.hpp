#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

namespace nehari {

enum class Verdict { holds, fails, inconclusive, not_applicable };

const char* to_string(Verdict v);

// Outcome of the eigenvalue hypothesis: some eta-weighted eigenvalue lies
// strictly below 1 while the alpha-weighted first eigenvalue lies strictly
// above 1 (infinite by convention when alpha vanishes identically).
struct F2Result {
  Verdict verdict = Verdict::inconclusive;
  int m = 0;    // eta eigenvalues below 1, counted with multiplicity
  int s_m = 0;  // 1 + multiplicities of the below-1 clusters after the first
  double lambda1_eta = 0.0;
  double lambda_m_eta = 0.0;    // largest eigenvalue below 1 (NaN when m = 0)
  double lambda_next_eta = 0.0; // smallest eigenvalue >= 1 (+inf if unseen)
  double lambda1_alpha = 0.0;   // +inf when alpha == 0
  SpectrumResult eta_spectrum;  // below-1 part plus the first crossing
  std::vector<std::string> notes;
};

struct ConditionOptions {
  EigsOptions eigs;
  // Relative margin around 1 below which eigenvalue comparisons are
  // reported inconclusive instead of holds/fails.
  double eigen_margin = 1e-6;
  // Relative guard band around the decision threshold of the compactness
  // condition; sampled bounds on tau cannot certify within it.
  double guard_band = 0.10;
  int tau_samples = 8;
  int tau_m_samples = 64;
  int tau_max_iterations = 150;
  double tau_grad_tol = 1e-6;
  double boundary_floor_factor = 1e-6;
  std::uint64_t seed = 0;
};

F2Result check_f2(const EnergyModel& model, const ConditionOptions& opts = {});

// Sampled bound on an extremum of u -> t_u (the fibering scaling map).
struct TauEstimate {
  double value = 0.0;
  int starts = 0;            // battery size that actually entered A
  int refined = 0;           // starts improved by local descent/ascent
  bool low_confidence = false;
  std::vector<std::string> notes;
};

// Upper bound on inf { t_u : u on the unit sphere inside A } by multi-start
// Riemannian descent (finite-difference gradient of t_u through the implicit
// scalar equation) from eigenfunction directions and random fields in A.
// Throws ModelError when no start lands inside A.
TauEstimate estimate_tau(const EnergyModel& model, const SpectrumResult& eta_spectrum,
                         const ConditionOptions& opts = {});

// Lower bound on max { t_u : u unit, in the span of the first s_m
// eigenfunctions } by dense sampling plus coefficient-space ascent.
TauEstimate estimate_tau_m(const EnergyModel& model, const SpectrumResult& eta_spectrum,
                           const ConditionOptions& opts = {});

enum class BetaVariant { ground_state, multiplicity };

// Full hypothesis audit.  Every intermediate that enters the compactness
// threshold |eta|_inf tau^2 / (2 lambda1(eta - alpha) S^{3/2}) is logged so
// the report arithmetic can be re-checked from its own fields.
struct ConditionReport {
  Verdict verdict_f2 = Verdict::inconclusive;
  int m = 0;
  int s_m = 0;
  double lambda1_eta = 0.0;
  double lambda_m_eta = 0.0;
  double lambda_next_eta = 0.0;
  double lambda1_alpha = 0.0;
  double lambda1_eta_minus_alpha = 0.0;  // NaN when not computed

  double tau_estimate = 0.0;    // upper bound on the infimum (NaN if skipped)
  double tau_m_estimate = 0.0;  // lower bound on the span maximum (NaN if skipped)

  double sobolev_S = 0.0;  // NaN outside d = 3
  double eta_sup = 0.0;
  double essinf_beta = 0.0;  // +inf for saturation-type kernels
  double rhs_beta = 0.0;     // threshold with tau (NaN if skipped)
  double rhs_beta_m = 0.0;   // threshold with tau_m (NaN if skipped)
  Verdict verdict_beta = Verdict::not_applicable;
  Verdict verdict_beta_m = Verdict::not_applicable;

  // Support floor for boundary-limit fields, (S/|eta|_inf)^{3/2}, and the
  // induced level-gap right-hand side essinf_beta * support floor; the gap
  // verdict compares a supplied ground-state level against it.
  double support_lower_bound = 0.0;
  double level_gap_rhs = 0.0;
  double ground_level = 0.0;  // NaN unless supplied
  Verdict level_gap = Verdict::not_applicable;

  std::vector<std::string> notes;
  SpectrumResult eta_spectrum;  // reusable by the multiplicity search
};

// Single-variant check (tau for ground_state, tau_m for multiplicity); the
// other verdict is reported not_applicable.  ground_level, when given, feeds
// the level-gap diagnostic.
ConditionReport check_beta(const EnergyModel& model, BetaVariant variant,
                           const ConditionOptions& opts = {},
                           const double* ground_level = nullptr);

// Both variants in one pass (single spectrum + threshold assembly).
ConditionReport check_conditions(const EnergyModel& model,
                                 const ConditionOptions& opts = {},
                                 const double* ground_level = nullptr);

}  // namespace nehari

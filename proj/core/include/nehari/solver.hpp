#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

namespace nehari {

enum class SolveStatus { converged, max_iterations, boundary_stall };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double grad_tol = 1e-8;        // stop once |grad Psi|_{H10} drops below
  int max_iterations = 10000;
  double armijo_init = 1.0;      // trial step at the start of each iteration
  double armijo_factor = 0.5;
  double armijo_c1 = 1e-4;       // sufficient-decrease fraction
  int max_backtracks = 60;
  // Iterates may not come closer to the boundary of A than this fraction of
  // the starting margin.
  double boundary_floor_factor = 1e-6;
  double sign_threshold_rel = 1e-6;  // for the sign verdict
  std::uint64_t seed = 0;            // provenance only
  std::string config_digest;         // provenance only
};

struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  Field u_star;              // t_u * u at the final iterate (a Nehari point)
  double level = 0.0;        // I(u_star)
  double residual = 0.0;     // |grad I(u_star)|_{H10}
  double psi_grad_norm = 0.0;
  int iterations = 0;
  std::string sign_verdict;  // positive | negative | sign-changing
  double boundary_margin_min = 0.0;
  double t_final = 0.0;
  // Estimate of integral beta over [u != 0]; the relevant lower bound for
  // levels of sequences escaping to the boundary (diagnostic on stalls).
  double beta_support_estimate = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// Riemannian gradient descent for the reduced functional on the unit sphere
// inside A: renormalization retraction, Armijo backtracking, and a margin
// floor that converts boundary escapes into an explicit stall status.
SolveReport minimize_psi(const EnergyModel& model, const Field& u0,
                         const SolveOptions& opts = {});

std::string sign_verdict(const Field& u, double threshold_rel);

struct MultiplicityOptions {
  int random_starts = 12;     // random unit combinations in the eigenspan
  int deflated_rounds = 6;    // restarts against the deflation product
  double deflation_sigma = 1.0;
  // Two solutions are the same pair when both the relative H10 distance
  // (mod sign) and the relative level difference fall below these.
  double distinct_rel_distance = 0.1;
  double distinct_rel_level = 1e-4;
  int threads = 1;
  SolveOptions solve;
};

struct FoundSolution {
  Field u;              // Nehari representative of the pair {u, -u}
  double level = 0.0;
  double residual = 0.0;
  std::string sign;
  int sign_changes = -1;  // nodal sign alternations (1d grids only)
};

struct MultiplicityReport {
  std::vector<FoundSolution> solutions;  // distinct pairs, sorted by level
  int distinct_count = 0;
  int target_pairs = 0;  // s_m
  std::string pairing_note;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// Multi-start search for distinct critical pairs: eigenfunction directions,
// random combinations within the span of the first s_m eigenfunctions, and
// deflated restarts that penalize already-found solutions by
// prod_k (1 + sigma / |u -+ u_k|^2).  Failed starts are findings, not errors.
MultiplicityReport multiplicity_search(const EnergyModel& model,
                                       const SpectrumResult& eta_spectrum,
                                       const MultiplicityOptions& opts = {});

}  // namespace nehari

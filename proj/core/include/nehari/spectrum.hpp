#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nehari/grid.hpp"

namespace nehari {

// One eigenpair of K e = lambda M_theta e.  Eigenvectors are scaled to
// H^1_0 norm 1 with the entry of largest magnitude positive, so results are
// reproducible bit-for-bit for a fixed seed.
struct EigenPair {
  double lambda;
  Field e;
};

// Distinct eigenvalue with its multiplicity (cluster of numerically equal
// eigenvalues; relative gap below cluster_gap merges).
struct EigenCluster {
  double lambda;     // cluster mean
  int multiplicity;  // d_j
};

struct SpectrumResult {
  std::vector<EigenPair> pairs;         // ascending; may exceed the requested
                                        // count so a trailing cluster closes
  std::vector<EigenCluster> clusters;   // distinct eigenvalues with d_j
  // Target dimension for the sub-unit eigenspace: over clusters with mean
  // below 1, the first contributes 1 and later ones their full multiplicity.
  // Zero when no eigenvalue lies below 1.
  int s_m = 0;
  // theta vanished identically: the weighted first eigenvalue is +infinity
  // by convention and no pairs are produced.
  bool theta_identically_zero = false;
  std::vector<std::string> warnings;
};

struct EigsOptions {
  double residual_tol = 1e-8;     // on |K e - lambda M e| relative to |K e|
  double cluster_gap = 1e-6;      // relative gap separating distinct values
  int max_iterations = 100000;    // per eigenpair
  std::uint64_t seed = 0x9a3c0ffee1d5ull;
};

// Smallest `count` eigenvalues of the generalized problem K e = lambda M e,
// M = diag(theta(x_i)) * cell volume, via shift-and-invert power iteration
// with deflation in the H^1_0 inner product; the sparse factorization of K
// is computed once and reused.  Requires theta >= 0; theta vanishing on part
// of the domain is accepted but flagged in warnings.
SpectrumResult weighted_eigs(std::shared_ptr<const Grid> grid, const Weight& theta,
                             int count, const EigsOptions& opts = {});
SpectrumResult weighted_eigs(std::shared_ptr<const Grid> grid,
                             std::vector<double> theta_nodes, int count,
                             const EigsOptions& opts = {});

// First weighted eigenvalue; +infinity when theta vanishes identically.
double lambda1(std::shared_ptr<const Grid> grid, const Weight& theta,
               const EigsOptions& opts = {});
double lambda1(std::shared_ptr<const Grid> grid, std::vector<double> theta_nodes,
               const EigsOptions& opts = {});

}  // namespace nehari

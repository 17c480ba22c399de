#pragma once

// Shared builders for the doctest suites: small 1d/3d models, discrete
// Laplacian eigenvalues in closed form, and random fields inside the open
// cone A.  Everything is deterministic given the caller's SplitRng.

#include <cmath>
#include <memory>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/rng.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

namespace fixtures {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline std::shared_ptr<nehari::Grid> interval(int n, double length = kPi) {
  return std::make_shared<nehari::Grid>(nehari::Grid::interval(length, n));
}

// Exact eigenvalue of the volume-scaled finite-difference Dirichlet
// Laplacian for mode j (frequency j pi / length) on n interior nodes.
inline double fd_eigenvalue_1d(int j, int n, double length = kPi) {
  const double h = length / static_cast<double>(n + 1);
  const double s = std::sin(0.5 * static_cast<double>(j) * kPi / length * h);
  return 4.0 / (h * h) * s * s;
}

// Nodal samples of sin(j pi x / length), the exact discrete eigenvectors.
inline std::vector<double> sine_mode_1d(int j, int n, double length = kPi) {
  const double h = length / static_cast<double>(n + 1);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = std::sin(
        static_cast<double>(j) * kPi / length * static_cast<double>(i + 1) * h);
  return v;
}

inline nehari::EnergyModel smooth_model(int n, double alpha, double eta,
                                        double length = kPi) {
  return nehari::EnergyModel(
      interval(n, length),
      std::make_shared<nehari::SmoothSaturation>(nehari::Weight(alpha),
                                                 nehari::Weight(eta)));
}

inline nehari::EnergyModel resonance_model_1d(int n, double eta, double c,
                                              double length = kPi) {
  return nehari::EnergyModel(
      interval(n, length),
      std::make_shared<nehari::StrongResonance>(nehari::Weight(eta), c));
}

inline nehari::EnergyModel resonance_model_3d(int n, double eta, double c,
                                              double length = kPi) {
  auto grid = std::make_shared<nehari::Grid>(
      nehari::Grid::box(length, length, length, n, n, n));
  return nehari::EnergyModel(
      grid, std::make_shared<nehari::StrongResonance>(nehari::Weight(eta), c));
}

// Random unit field inside A: a random combination of the supplied below-1
// eigenfunctions plus a rough perturbation shrunk until membership holds.
inline nehari::Field random_in_A(const nehari::EnergyModel& model,
                                 const std::vector<nehari::EigenPair>& pairs,
                                 nehari::SplitRng& rng, double rough = 0.3) {
  nehari::Field u(model.grid_ptr());
  for (const nehari::EigenPair& p : pairs) {
    if (p.lambda >= 1.0) break;
    const double c = rng.normal();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += c * p.e[i];
  }
  const double base = nehari::h10_norm(u);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] /= base;

  nehari::Field noise(model.grid_ptr());
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
  const double nn = nehari::h10_norm(noise);

  double eps = rough;
  for (int attempt = 0; attempt < 30; ++attempt, eps *= 0.5) {
    nehari::Field trial = u;
    for (std::size_t i = 0; i < trial.size(); ++i)
      trial[i] += eps * noise[i] / nn;
    const double tn = nehari::h10_norm(trial);
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] /= tn;
    if (model.membership(trial).region == nehari::Region::inside) return trial;
  }
  return u;  // the unperturbed eigen-combination is always inside
}

}  // namespace fixtures

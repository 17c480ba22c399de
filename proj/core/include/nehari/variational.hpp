#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/stiffness.hpp"

namespace nehari {

enum class Region { inside, boundary, outside };

struct AMembership {
  Region region;
  double margin;  // integral(eta u^2) - |u|_{H10}^2
};

struct FiberingOptions {
  double rel_width = 1e-12;    // bisection stops below this relative bracket width
  double phi_tol = 1e-13;      // ... or once |phi(t)| <= phi_tol * |u|^2
  int max_iterations = 200;    // bracketing plus bisection
  double overflow = 1e12;      // bracket cap; beyond it u is numerically on the
                               // boundary of A
  double hint = 0.0;           // warm-start location for the root (0 = cold)
};

struct FiberingResult {
  double t = 0.0;         // the unique maximizer t_u of t -> I(t u)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double phi_at_t = 0.0;  // residual of the scalar Nehari equation at t
  double psi = 0.0;       // I(t_u u)
};

// Energy model for -Laplace u = f(x,u) with zero boundary data on a grid:
// I(u) = 1/2 |u|_{H10}^2 - integral F(x,u).  Caches the nodal weight samples
// and the stiffness factorization; all evaluation methods are const and
// thread-safe.
class EnergyModel {
 public:
  EnergyModel(std::shared_ptr<const Grid> grid, std::shared_ptr<const Nonlinearity> nl);

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  const Nonlinearity& nonlinearity() const noexcept { return *nl_; }
  const std::shared_ptr<const Nonlinearity>& nonlinearity_ptr() const noexcept { return nl_; }
  const StiffnessSolver& stiffness() const noexcept { return stiffness_; }

  const std::vector<double>& alpha_nodes() const noexcept { return alpha_; }
  const std::vector<double>& eta_nodes() const noexcept { return eta_; }
  const std::vector<double>& beta_nodes() const noexcept { return beta_; }
  double eta_sup() const noexcept { return eta_sup_; }

  double energy(const Field& u) const;

  // Riesz representative g of I'(u) in the H10 inner product:
  // h10_inner(g, v) = I'(u) v for every v.
  Field energy_gradient(const Field& u) const;

  // Membership in the open cone A = { |u|^2 < integral eta u^2 }; the
  // boundary band is |margin| <= 1e-10 * max(|u|^2, integral eta u^2).
  // The zero field is classified outside.
  AMembership membership(const Field& u) const;

  // phi(t) = |u|^2 - integral ratio(x, t u) u^2; the scalar equation whose
  // root is the fibering maximizer.
  double phi(const Field& u, double t) const;

  // Solves phi(t_u) = 0 by bracket doubling from t = 1 plus bisection.
  // Throws NotInAError unless membership(u) is inside, BracketOverflowError
  // when the bracket passes opts.overflow.
  FiberingResult fibering(const Field& u, const FiberingOptions& opts = {}) const;

  // Scaled field t * u.
  Field scaled(const Field& u, double t) const;

  struct PsiEval {
    FiberingResult fibering;
    double psi;      // I(t_u u)
    Field gradient;  // tangential H10 gradient of the reduced functional
  };

  // Reduced functional on the unit sphere: Psi(u) = I(t_u u) together with
  // its Riemannian gradient t_u * P_u grad I(t_u u).  Pre: |u| = 1 within
  // 1e-8 and membership inside.
  PsiEval psi_eval(const Field& u, const FiberingOptions& opts = {}) const;
  Field psi_gradient(const Field& u) const;

  // Estimate of integral of beta over the support of u (plug-in support
  // rule); +infinity if beta is infinite somewhere on the support.
  double beta_support_estimate(const Field& u) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::shared_ptr<const Nonlinearity> nl_;
  StiffnessSolver stiffness_;
  std::vector<Point> coords_;
  std::vector<double> alpha_;
  std::vector<double> eta_;
  std::vector<double> beta_;
  double eta_sup_;
  double vol_;
};

// Nodewise positive/negative parts (u = plus + minus, minus <= 0 <= plus).
std::pair<Field, Field> split_signs(const Field& u);

// Number of strict sign alternations of consecutive nodal values along the
// axis of a 1d grid, ignoring entries below threshold.
int count_sign_changes(const Field& u, double threshold);

}  // namespace nehari

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/expr.hpp"

namespace nehari {

// Uniform tensor grid of interior nodes on a box (0,L1) x ... x (0,Ld),
// d in {1,2,3}.  Homogeneous Dirichlet data lives implicitly on the boundary:
// only interior nodes carry unknowns.  Node k along axis a sits at
// (k+1) * h_a with h_a = L_a / (n_a + 1).  Linear indices enumerate the
// multi-index lexicographically (first axis slowest).
class Grid {
 public:
  Grid(int dim, std::array<double, 3> lengths, std::array<int, 3> interior_nodes);

  static Grid interval(double length, int n) { return Grid(1, {length, 0, 0}, {n, 0, 0}); }
  static Grid box(double l1, double l2, int n1, int n2) {
    return Grid(2, {l1, l2, 0}, {n1, n2, 0});
  }
  static Grid box(double l1, double l2, double l3, int n1, int n2, int n3) {
    return Grid(3, {l1, l2, l3}, {n1, n2, n3});
  }

  int dim() const noexcept { return dim_; }
  double length(int axis) const noexcept { return len_[axis]; }
  int extent(int axis) const noexcept { return n_[axis]; }
  double spacing(int axis) const noexcept { return h_[axis]; }
  double max_spacing() const noexcept;
  std::size_t num_nodes() const noexcept { return total_; }
  double cell_volume() const noexcept { return vol_; }

  std::array<int, 3> multi_index(std::size_t linear) const noexcept;
  std::size_t linear_index(const std::array<int, 3>& idx) const noexcept;
  Point node(std::size_t linear) const noexcept;

  bool operator==(const Grid& other) const noexcept;
  bool operator!=(const Grid& other) const noexcept { return !(*this == other); }

 private:
  int dim_;
  std::array<double, 3> len_;
  std::array<int, 3> n_;
  std::array<double, 3> h_;
  std::size_t total_;
  double vol_;
};

// Nodal field over a grid's interior nodes.  Values are validated to be
// finite at construction; callers mutating through values() are expected to
// keep them finite.
class Field {
 public:
  // Empty placeholder (no grid, no values) so report structs holding fields
  // stay default-constructible; assign a real field before use.
  Field() noexcept = default;
  explicit Field(std::shared_ptr<const Grid> grid);
  Field(std::shared_ptr<const Grid> grid, std::vector<double> values);

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double max_abs() const noexcept;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

// Action of the Dirichlet finite-difference stiffness form, scaled by the
// cell volume so that u^T (K u) approximates the squared H^1_0 seminorm
// integral(|grad u|^2).
void apply_stiffness(const Grid& g, const double* u, double* out) noexcept;
std::vector<double> apply_stiffness(const Grid& g, const std::vector<double>& u);

// Compensated (Kahan) reductions; energies near convergence shrink by less
// than plain summation error at desk scales, so inner products use these.
double kahan_sum(const double* x, std::size_t n) noexcept;
double kahan_dot(const double* a, const double* b, std::size_t n) noexcept;

// H^1_0 inner product u^T K v.  Throws GridError on grid mismatch.
double h10_inner(const Field& u, const Field& v);
double h10_norm(const Field& u);

// Weighted L^2 inner product: sum_i theta(x_i) u_i v_i * cell_volume.
// Throws GridError on grid mismatch or a non-finite weight value.
double weighted_l2_inner(const Field& u, const Field& v, const Weight& theta);
double l2_inner(const Field& u, const Field& v);

struct SupportMeasure {
  double measure;         // cell_volume * #{ |u_i| > threshold }
  double threshold_used;
};

inline constexpr double kSupportThresholdRel = 1e-8;

// Plug-in estimate of |[u != 0]|.  With threshold < 0 (the default) the
// threshold is kSupportThresholdRel * max|u_i|; an explicit threshold of 0
// counts exactly the nonzero entries.
SupportMeasure support_measure(const Field& u, double threshold = -1.0);

struct FatouCheck {
  bool holds;
  double lhs;  // integral of (liminf v_n) over [liminf u_n != 0]
  double rhs;  // liminf of integral of v_n over [u_n != 0]
  // Nodes in the liminf support that fall outside [u_n != 0] for the
  // sequence entry attaining the right-hand side (empty when holds).
  std::vector<std::size_t> witness_nodes;
};

// Checks the generalized Fatou support inequality
//   integral_{[liminf u_n != 0]} liminf v_n  <=  liminf integral_{[u_n != 0]} v_n
// nodewise with exact zero tests.  Finite-sequence liminf convention: the
// minimum over the trailing ceil(M/2) entries; the support of liminf u_n is
// taken through |u_n| (min_tail |u_n(x)| > 0), matching the set identity
// [w != 0] = [|w| != 0] that the inequality rests on.  Requires v_n >= 0.
FatouCheck fatou_support_check(const std::vector<Field>& u_seq,
                               const std::vector<Field>& v_seq);

// Sharp constant of the embedding H^1_0 -> L^{2d/(d-2)}; only meaningful for
// d = 3, where it equals 3*(pi/2)^(4/3) (attained by the Talenti radial
// profiles on R^3, independent of the bounded domain).  Throws GridError for
// d in {1, 2}.
double sobolev_constant(int dim);

}  // namespace nehari

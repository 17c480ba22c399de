#pragma once

#include <memory>
#include <vector>

#include "nehari/grid.hpp"

namespace nehari {

// Direct solver for the Dirichlet stiffness matrix K of a grid.  The sparse
// Cholesky factorization is computed once at construction and reused across
// solves; solve() is const and safe to call from several threads.
class StiffnessSolver {
 public:
  explicit StiffnessSolver(std::shared_ptr<const Grid> grid);
  ~StiffnessSolver();

  StiffnessSolver(StiffnessSolver&&) noexcept;
  StiffnessSolver& operator=(StiffnessSolver&&) noexcept;
  StiffnessSolver(const StiffnessSolver&) = delete;
  StiffnessSolver& operator=(const StiffnessSolver&) = delete;

  const Grid& grid() const noexcept;
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept;

  // Solves K x = rhs.
  void solve(const double* rhs, double* out) const;
  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nehari

#include "nehari/stiffness.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace nehari {

struct StiffnessSolver::Impl {
  std::shared_ptr<const Grid> grid;
  Eigen::SparseMatrix<double> k;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

namespace {

Eigen::SparseMatrix<double> assemble(const Grid& g) {
  const std::size_t n = g.num_nodes();
  const double vol = g.cell_volume();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * (2 * g.dim() + 1));

  double diag = 0.0;
  std::array<double, 3> w{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> stride{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    w[a] = vol / (g.spacing(a) * g.spacing(a));
    diag += 2.0 * w[a];
  }
  if (g.dim() == 1) {
    stride = {1, 0, 0};
  } else if (g.dim() == 2) {
    stride = {static_cast<std::size_t>(g.extent(1)), 1, 0};
  } else {
    stride = {static_cast<std::size_t>(g.extent(1)) * g.extent(2),
              static_cast<std::size_t>(g.extent(2)), 1};
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = g.multi_index(i);
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[a] + 1 < g.extent(a))
        trips.emplace_back(static_cast<int>(i), static_cast<int>(i + stride[a]), -w[a]);
      if (idx[a] > 0)
        trips.emplace_back(static_cast<int>(i), static_cast<int>(i - stride[a]), -w[a]);
    }
  }

  Eigen::SparseMatrix<double> k(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n));
  k.setFromTriplets(trips.begin(), trips.end());
  k.makeCompressed();
  return k;
}

}  // namespace

StiffnessSolver::StiffnessSolver(std::shared_ptr<const Grid> grid)
    : impl_(std::make_unique<Impl>()) {
  if (!grid) throw GridError("stiffness solver requires a grid");
  impl_->grid = std::move(grid);
  impl_->k = assemble(*impl_->grid);
  impl_->ldlt.compute(impl_->k);
  if (impl_->ldlt.info() != Eigen::Success)
    throw GridError("stiffness factorization failed");
}

StiffnessSolver::~StiffnessSolver() = default;
StiffnessSolver::StiffnessSolver(StiffnessSolver&&) noexcept = default;
StiffnessSolver& StiffnessSolver::operator=(StiffnessSolver&&) noexcept = default;

const Grid& StiffnessSolver::grid() const noexcept { return *impl_->grid; }

const std::shared_ptr<const Grid>& StiffnessSolver::grid_ptr() const noexcept {
  return impl_->grid;
}

void StiffnessSolver::solve(const double* rhs, double* out) const {
  const auto n = static_cast<Eigen::Index>(impl_->grid->num_nodes());
  Eigen::Map<const Eigen::VectorXd> b(rhs, n);
  Eigen::Map<Eigen::VectorXd> x(out, n);
  x = impl_->ldlt.solve(b);
}

std::vector<double> StiffnessSolver::solve(const std::vector<double>& rhs) const {
  std::vector<double> out(rhs.size());
  solve(rhs.data(), out.data());
  return out;
}

}  // namespace nehari

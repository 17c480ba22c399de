#include "nehari/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nehari {

Grid::Grid(int dim, std::array<double, 3> lengths, std::array<int, 3> interior_nodes)
    : dim_(dim), len_(lengths), n_(interior_nodes) {
  if (dim < 1 || dim > 3) throw GridError("grid dimension must be 1, 2, or 3");
  total_ = 1;
  vol_ = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      if (!(len_[a] > 0.0) || !std::isfinite(len_[a]))
        throw GridError("grid length must be positive and finite");
      if (n_[a] < 1) throw GridError("grid needs at least one interior node per axis");
      h_[a] = len_[a] / (n_[a] + 1);
      total_ *= static_cast<std::size_t>(n_[a]);
      vol_ *= h_[a];
    } else {
      len_[a] = 0.0;
      n_[a] = 0;
      h_[a] = 0.0;
    }
  }
}

double Grid::max_spacing() const noexcept {
  double h = 0.0;
  for (int a = 0; a < dim_; ++a) h = std::max(h, h_[a]);
  return h;
}

std::array<int, 3> Grid::multi_index(std::size_t linear) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  if (dim_ == 1) {
    idx[0] = static_cast<int>(linear);
  } else if (dim_ == 2) {
    idx[0] = static_cast<int>(linear / n_[1]);
    idx[1] = static_cast<int>(linear % n_[1]);
  } else {
    const std::size_t plane = static_cast<std::size_t>(n_[1]) * n_[2];
    idx[0] = static_cast<int>(linear / plane);
    const std::size_t rest = linear % plane;
    idx[1] = static_cast<int>(rest / n_[2]);
    idx[2] = static_cast<int>(rest % n_[2]);
  }
  return idx;
}

std::size_t Grid::linear_index(const std::array<int, 3>& idx) const noexcept {
  if (dim_ == 1) return static_cast<std::size_t>(idx[0]);
  if (dim_ == 2) return static_cast<std::size_t>(idx[0]) * n_[1] + idx[1];
  return (static_cast<std::size_t>(idx[0]) * n_[1] + idx[1]) * n_[2] + idx[2];
}

Point Grid::node(std::size_t linear) const noexcept {
  const auto idx = multi_index(linear);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = (idx[a] + 1) * h_[a];
  return x;
}

bool Grid::operator==(const Grid& other) const noexcept {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (len_[a] != other.len_[a] || n_[a] != other.n_[a]) return false;
  return true;
}

Field::Field(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)) {
  if (!grid_) throw GridError("field requires a grid");
  values_.assign(grid_->num_nodes(), 0.0);
}

Field::Field(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw GridError("field requires a grid");
  if (values_.size() != grid_->num_nodes())
    throw GridError("field value count does not match grid node count");
  for (double v : values_)
    if (!std::isfinite(v)) throw GridError("field values must be finite");
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

void apply_stiffness(const Grid& g, const double* u, double* out) noexcept {
  const double vol = g.cell_volume();
  const int dim = g.dim();
  if (dim == 1) {
    const int n = g.extent(0);
    const double w = vol / (g.spacing(0) * g.spacing(0));
    for (int i = 0; i < n; ++i) {
      double v = 2.0 * u[i];
      if (i > 0) v -= u[i - 1];
      if (i + 1 < n) v -= u[i + 1];
      out[i] = w * v;
    }
    return;
  }
  if (dim == 2) {
    const int n0 = g.extent(0), n1 = g.extent(1);
    const double w0 = vol / (g.spacing(0) * g.spacing(0));
    const double w1 = vol / (g.spacing(1) * g.spacing(1));
    for (int i = 0; i < n0; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * n1;
      for (int j = 0; j < n1; ++j) {
        const std::size_t k = row + j;
        double v = 2.0 * (w0 + w1) * u[k];
        if (i > 0) v -= w0 * u[k - n1];
        if (i + 1 < n0) v -= w0 * u[k + n1];
        if (j > 0) v -= w1 * u[k - 1];
        if (j + 1 < n1) v -= w1 * u[k + 1];
        out[k] = v;
      }
    }
    return;
  }
  const int n0 = g.extent(0), n1 = g.extent(1), n2 = g.extent(2);
  const double w0 = vol / (g.spacing(0) * g.spacing(0));
  const double w1 = vol / (g.spacing(1) * g.spacing(1));
  const double w2 = vol / (g.spacing(2) * g.spacing(2));
  const std::size_t plane = static_cast<std::size_t>(n1) * n2;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t row = i * plane + static_cast<std::size_t>(j) * n2;
      for (int k = 0; k < n2; ++k) {
        const std::size_t idx = row + k;
        double v = 2.0 * (w0 + w1 + w2) * u[idx];
        if (i > 0) v -= w0 * u[idx - plane];
        if (i + 1 < n0) v -= w0 * u[idx + plane];
        if (j > 0) v -= w1 * u[idx - n2];
        if (j + 1 < n1) v -= w1 * u[idx + n2];
        if (k > 0) v -= w2 * u[idx - 1];
        if (k + 1 < n2) v -= w2 * u[idx + 1];
        out[idx] = v;
      }
    }
  }
}

std::vector<double> apply_stiffness(const Grid& g, const std::vector<double>& u) {
  std::vector<double> out(u.size());
  apply_stiffness(g, u.data(), out.data());
  return out;
}

double kahan_sum(const double* x, std::size_t n) noexcept {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = x[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double kahan_dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = a[i] * b[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

namespace {

void require_same_grid(const Field& u, const Field& v) {
  if (u.grid() != v.grid()) throw GridError("fields live on different grids");
}

}  // namespace

double h10_inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  std::vector<double> kv(v.size());
  apply_stiffness(u.grid(), v.values().data(), kv.data());
  return kahan_dot(u.values().data(), kv.data(), kv.size());
}

double h10_norm(const Field& u) {
  const double q = h10_inner(u, u);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

double weighted_l2_inner(const Field& u, const Field& v, const Weight& theta) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  const std::size_t n = u.size();
  double s = 0.0, c = 0.0;
  if (theta.is_constant()) {
    const double th = theta.constant_value();
    if (!std::isfinite(th)) throw GridError("weight value is not finite");
    for (std::size_t i = 0; i < n; ++i) {
      const double y = u[i] * v[i] - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return th * s * g.cell_volume();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double th = theta(g.node(i));
    if (!std::isfinite(th)) throw GridError("weight value is not finite");
    const double y = th * u[i] * v[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s * g.cell_volume();
}

double l2_inner(const Field& u, const Field& v) {
  return weighted_l2_inner(u, v, Weight(1.0));
}

SupportMeasure support_measure(const Field& u, double threshold) {
  double thr = threshold;
  if (thr < 0.0) thr = kSupportThresholdRel * u.max_abs();
  std::size_t count = 0;
  for (double v : u.values())
    if (std::fabs(v) > thr) ++count;
  return {u.grid().cell_volume() * static_cast<double>(count), thr};
}

FatouCheck fatou_support_check(const std::vector<Field>& u_seq,
                               const std::vector<Field>& v_seq) {
  if (u_seq.size() != v_seq.size() || u_seq.size() < 2)
    throw GridError("fatou check needs matching sequences of length >= 2");
  const Grid& g = u_seq.front().grid();
  for (const Field& f : u_seq)
    if (f.grid() != g) throw GridError("fatou check: u sequence grid mismatch");
  for (const Field& f : v_seq) {
    if (f.grid() != g) throw GridError("fatou check: v sequence grid mismatch");
    for (double v : f.values())
      if (v < 0.0) throw GridError("fatou check requires v_n >= 0");
  }

  const std::size_t m = u_seq.size();
  const std::size_t tail_start = m - (m + 1) / 2;  // trailing ceil(m/2) entries
  const std::size_t n = g.num_nodes();
  const double vol = g.cell_volume();

  // Right side: liminf (min over tail) of the per-entry support integrals.
  double rhs = std::numeric_limits<double>::infinity();
  std::size_t rhs_entry = tail_start;
  for (std::size_t k = tail_start; k < m; ++k) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (u_seq[k][i] != 0.0) {
        const double y = v_seq[k][i] - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
      }
    }
    s *= vol;
    if (s < rhs) {
      rhs = s;
      rhs_entry = k;
    }
  }

  // Left side: nodes whose |u_n| stays away from zero across the tail carry
  // the nodewise liminf of v_n.
  double lhs = 0.0, comp = 0.0;
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < n; ++i) {
    double umin = std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = tail_start; k < m; ++k) {
      umin = std::min(umin, std::fabs(u_seq[k][i]));
      vmin = std::min(vmin, v_seq[k][i]);
    }
    if (umin > 0.0) {
      const double y = vmin - comp;
      const double t = lhs + y;
      comp = (t - lhs) - y;
      lhs = t;
      if (u_seq[rhs_entry][i] == 0.0) bad.push_back(i);
    }
  }
  lhs *= vol;

  const double slack = 1e-12 * (1.0 + std::fabs(rhs));
  FatouCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.holds = lhs <= rhs + slack;
  if (!out.holds) out.witness_nodes = std::move(bad);
  return out;
}

double sobolev_constant(int dim) {
  if (dim != 3)
    throw GridError("sharp Sobolev embedding constant is only provided for dimension 3");
  return 3.0 * std::pow(1.570796326794896619231322, 4.0 / 3.0);
}

}  // namespace nehari

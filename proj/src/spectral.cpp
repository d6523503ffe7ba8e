/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

constexpr double pi = std::numbers::pi;

// out(row, j) = scale * sum_k table(j, k) * in(row, k), contiguous axis.
void apply_inner(const std::vector<double>& table, int m, int rows,
                 const double* in, double* out, double scale) {
  for (int r = 0; r < rows; ++r) {
    const double* src = in + static_cast<std::size_t>(r) * m;
    double* dst = out + static_cast<std::size_t>(r) * m;
    for (int j = 0; j < m; ++j) {
      const double* t = table.data() + static_cast<std::size_t>(j) * m;
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += t[k] * src[k];
      dst[j] = scale * acc;
    }
  }
}

// out(j, col) = scale * sum_k table(j, k) * in(k, col), strided axis (2-D).
void apply_outer(const std::vector<double>& table, int m, const double* in,
                 double* out, double scale) {
  for (int j = 0; j < m; ++j) {
    double* dst = out + static_cast<std::size_t>(j) * m;
    std::fill(dst, dst + m, 0.0);
    const double* t = table.data() + static_cast<std::size_t>(j) * m;
    for (int k = 0; k < m; ++k) {
      const double w = t[k];
      const double* src = in + static_cast<std::size_t>(k) * m;
      for (int c = 0; c < m; ++c) dst[c] += w * src[c];
    }
    for (int c = 0; c < m; ++c) dst[c] *= scale;
  }
}

// Applies `first` along axis 0 and `second` along axis 1 (1-D: only `first`).
std::vector<double> separable(const Grid& g, const std::vector<double>& first,
                              const std::vector<double>& second,
                              std::span<const double> in, double scale) {
  const int m = g.per_axis();
  std::vector<double> out(in.size());
  if (g.dim() == 1) {
    apply_inner(first, m, 1, in.data(), out.data(), scale);
    return out;
  }
  std::vector<double> tmp(in.size());
  apply_inner(second, m, m, in.data(), tmp.data(), 1.0);
  apply_outer(first, m, tmp.data(), out.data(), scale);
  return out;
}

}  // namespace

Grid::Grid(int dim, int modes) : dim_(dim), modes_(modes) {
  if (dim != 1 && dim != 2)
    throw Error(ErrorKind::invalid_argument,
                "grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (modes < 4)
    throw Error(ErrorKind::invalid_argument,
                "grid needs N >= 4, got " + std::to_string(modes));
  const int m = modes - 1;
  size_ = dim == 1 ? static_cast<std::size_t>(m)
                   : static_cast<std::size_t>(m) * static_cast<std::size_t>(m);

  auto sine = std::make_shared<std::vector<double>>(
      static_cast<std::size_t>(m) * m);
  auto deriv = std::make_shared<std::vector<double>>(
      static_cast<std::size_t>(m) * m);
  for (int k = 1; k <= m; ++k) {
    for (int j = 1; j <= m; ++j) {
      // Reduce k*j mod 2N so the argument stays in [0, 2 pi).
      const long r = (static_cast<long>(k) * j) % (2L * modes);
      const double arg = pi * static_cast<double>(r) / modes;
      (*sine)[static_cast<std::size_t>(k - 1) * m + (j - 1)] = std::sin(arg);
      (*deriv)[static_cast<std::size_t>(j - 1) * m + (k - 1)] =
          k * std::cos(arg);
    }
  }
  auto lambda = std::make_shared<std::vector<int>>(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto k = mode_of(i);
    (*lambda)[i] = k[0] * k[0] + k[1] * k[1];
  }
  sine_ = std::move(sine);
  deriv_ = std::move(deriv);
  lambda_ = std::move(lambda);
}

double Grid::node(int j) const { return pi * j / modes_; }

std::array<int, 2> Grid::mode_of(std::size_t idx) const {
  const auto m = static_cast<std::size_t>(per_axis());
  if (dim_ == 1) return {static_cast<int>(idx) + 1, 0};
  return {static_cast<int>(idx / m) + 1, static_cast<int>(idx % m) + 1};
}

std::size_t Grid::index_of(int k1, int k2) const {
  const int m = per_axis();
  if (k1 < 1 || k1 > m || (dim_ == 2 && (k2 < 1 || k2 > m)))
    throw Error(ErrorKind::invalid_argument, "mode index out of range");
  if (dim_ == 1) return static_cast<std::size_t>(k1 - 1);
  return static_cast<std::size_t>(k1 - 1) * m + static_cast<std::size_t>(k2 - 1);
}

double Grid::cell_volume() const noexcept {
  const double h = pi / modes_;
  return dim_ == 1 ? h : h * h;
}

double Grid::parseval_factor() const noexcept {
  const double h = pi / 2.0;
  return dim_ == 1 ? h : h * h;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, Representation rep)
    : grid_(std::move(grid)), rep_(rep), values_(grid_.size(), 0.0) {}

ScalarField::ScalarField(Grid grid, Representation rep,
                         std::vector<double> values)
    : grid_(std::move(grid)), rep_(rep), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::invalid_argument,
                "field has " + std::to_string(values_.size()) +
                    " values, grid expects " + std::to_string(grid_.size()));
}

ScalarField ScalarField::mode(const Grid& grid, double amplitude, int k1,
                              int k2) {
  ScalarField f(grid, Representation::spectral);
  f[grid.index_of(k1, k2)] = amplitude;
  return f;
}

ScalarField ScalarField::sample(
    const Grid& grid, const std::function<double(double, double)>& fn) {
  ScalarField f(grid, Representation::physical);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto j = grid.mode_of(i);  // same layout for node indices
    f[i] = fn(grid.node(j[0]), grid.dim() == 2 ? grid.node(j[1]) : 0.0);
  }
  return f;
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void ScalarField::check_compatible(const ScalarField& other) const {
  if (!(grid_ == other.grid_))
    throw Error(ErrorKind::invalid_argument, "fields live on different grids");
  if (rep_ != other.rep_)
    throw Error(ErrorKind::tag_mismatch,
                "cannot combine spectral and physical fields");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += s * other.values_[i];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

void require(const ScalarField& f, Representation rep, const char* op) {
  if (f.representation() != rep)
    throw Error(ErrorKind::tag_mismatch,
                std::string(op) + ": expected a " +
                    (rep == Representation::spectral ? "spectral" : "physical") +
                    " field");
}

// ---------------------------------------------------------------------------

ScalarField dst_forward(const ScalarField& f) {
  require(f, Representation::physical, "dst_forward");
  const Grid& g = f.grid();
  const double s = 2.0 / g.modes();
  const double scale = g.dim() == 1 ? s : s * s;
  return {g, Representation::spectral,
          separable(g, g.sine_table(), g.sine_table(), f.values(), scale)};
}

ScalarField dst_inverse(const ScalarField& c) {
  require(c, Representation::spectral, "dst_inverse");
  const Grid& g = c.grid();
  return {g, Representation::physical,
          separable(g, g.sine_table(), g.sine_table(), c.values(), 1.0)};
}

ScalarField laplacian_apply(const ScalarField& f) {
  require(f, Representation::spectral, "laplacian_apply");
  ScalarField out = f;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= -static_cast<double>(f.grid().eigenvalue(i));
  return out;
}

ScalarField laplacian_solve(const ScalarField& g) {
  require(g, Representation::spectral, "laplacian_solve");
  ScalarField out = g;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] /= -static_cast<double>(g.grid().eigenvalue(i));
  return out;
}

std::vector<ScalarField> gradient(const ScalarField& f) {
  require(f, Representation::spectral, "gradient");
  const Grid& g = f.grid();
  std::vector<ScalarField> out;
  out.reserve(static_cast<std::size_t>(g.dim()));
  if (g.dim() == 1) {
    out.emplace_back(g, Representation::physical,
                     separable(g, g.derivative_table(), g.sine_table(),
                               f.values(), 1.0));
    return out;
  }
  out.emplace_back(g, Representation::physical,
                   separable(g, g.derivative_table(), g.sine_table(),
                             f.values(), 1.0));
  out.emplace_back(g, Representation::physical,
                   separable(g, g.sine_table(), g.derivative_table(),
                             f.values(), 1.0));
  return out;
}

ScalarField gradient_squared(const ScalarField& f) {
  const auto grad = gradient(f);
  ScalarField out(f.grid(), Representation::physical);
  for (const auto& d : grad)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i] * d[i];
  return out;
}

ScalarField dealias(ScalarField f) {
  require(f, Representation::spectral, "dealias");
  const Grid& g = f.grid();
  const int cut = g.dealias_cutoff();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = g.mode_of(i);
    if (k[0] > cut || k[1] > cut) f[i] = 0.0;
  }
  return f;
}

// ---------------------------------------------------------------------------

SpectralState::SpectralState(const Grid& grid)
    : z(grid, Representation::spectral),
      u(grid, Representation::spectral),
      theta(grid, Representation::spectral) {}

SpectralState::SpectralState(ScalarField z_, ScalarField u_,
                             ScalarField theta_, double t_)
    : z(std::move(z_)), u(std::move(u_)), theta(std::move(theta_)), t(t_) {
  for (const ScalarField* f : {&z, &u, &theta}) {
    require(*f, Representation::spectral, "SpectralState");
    if (!(f->grid() == z.grid()))
      throw Error(ErrorKind::invalid_argument,
                  "state components must share one grid");
  }
}

bool SpectralState::all_finite() const noexcept {
  return z.all_finite() && u.all_finite() && theta.all_finite();
}

ScalarField& SpectralState::component(int i) {
  switch (i) {
    case 0: return z;
    case 1: return u;
    case 2: return theta;
  }
  throw Error(ErrorKind::invalid_argument, "state component index");
}

const ScalarField& SpectralState::component(int i) const {
  return const_cast<SpectralState*>(this)->component(i);
}

SpectralState& SpectralState::operator+=(const SpectralState& o) {
  z += o.z;
  u += o.u;
  theta += o.theta;
  return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& o) {
  z -= o.z;
  u -= o.u;
  theta -= o.theta;
  return *this;
}

SpectralState& SpectralState::operator*=(double s) noexcept {
  z *= s;
  u *= s;
  theta *= s;
  return *this;
}

SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
SpectralState operator*(double s, SpectralState a) { return a *= s; }

double coefficient_sup(const SpectralState& x) {
  return std::max({x.z.max_abs(), x.u.max_abs(), x.theta.max_abs()});
}

}  // namespace plateflow

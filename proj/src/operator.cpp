/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <limits>
#include <sstream>

#include "plateflow/errors.hpp"

namespace plateflow {

using cplx = std::complex<double>;

Mat3 identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      c[i * 3 + j] = s;
    }
  return c;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c[i] = a[i] + b[i];
  return c;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c[i] = a[i] - b[i];
  return c;
}

Mat3 operator*(double s, const Mat3& a) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c[i] = s * a[i];
  return c;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
          a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
          a[6] * v[0] + a[7] * v[1] + a[8] * v[2]};
}

double norm1(const Mat3& a) {
  double best = 0.0;
  for (int j = 0; j < 3; ++j)
    best = std::max(best, std::abs(a[j]) + std::abs(a[3 + j]) +
                              std::abs(a[6 + j]));
  return best;
}

// ---------------------------------------------------------------------------
// Eigenvalues

namespace {

// z^3 + b z^2 + c z + d
struct Cubic {
  double b, c, d;
  cplx operator()(cplx z) const { return ((z + b) * z + c) * z + d; }
  cplx derivative(cplx z) const { return (3.0 * z + 2.0 * b) * z + c; }
};

Cubic characteristic_polynomial(const Mat3& m) {
  const double tr = m[0] + m[4] + m[8];
  const double minors = (m[0] * m[4] - m[1] * m[3]) +
                        (m[0] * m[8] - m[2] * m[6]) +
                        (m[4] * m[8] - m[5] * m[7]);
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                     m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  return {-tr, minors, -det};
}

cplx polish(const Cubic& p, cplx z) {
  for (int it = 0; it < 8; ++it) {
    const cplx fz = p(z);
    const cplx dz = p.derivative(z);
    if (std::abs(dz) == 0.0) break;
    const cplx next = z - fz / dz;
    if (!(std::abs(p(next)) < std::abs(fz))) break;
    z = next;
  }
  return z;
}

std::array<cplx, 3> cross(const std::array<cplx, 3>& a,
                          const std::array<cplx, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double vnorm(const std::array<cplx, 3>& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

}  // namespace

Eigenvalues characteristic_roots(const Mat3& m) {
  const Cubic p = characteristic_polynomial(m);
  const double shift = p.b / 3.0;
  // y^3 + P y + Q with z = y - b/3
  const double P = p.c - p.b * p.b / 3.0;
  const double Q = 2.0 * p.b * p.b * p.b / 27.0 - p.b * p.c / 3.0 + p.d;
  const double scale = std::max({1.0, std::abs(p.b), std::abs(p.c), std::abs(p.d)});

  Eigenvalues roots;
  const double disc = Q * Q / 4.0 + P * P * P / 27.0;
  if (std::abs(P) <= 1e-14 * scale && std::abs(Q) <= 1e-14 * scale) {
    roots = {cplx(0.0), cplx(0.0), cplx(0.0)};
  } else if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-Q / 2.0 + sq);
    const double v = std::cbrt(-Q / 2.0 - sq);
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    roots = {cplx(u + v), cplx(-(u + v) / 2.0, im), cplx(-(u + v) / 2.0, -im)};
  } else {
    const double r = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * Q / (P * r), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots[k] = cplx(r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  }
  for (auto& z : roots) {
    z = polish(p, z - shift);
    if (std::abs(z.imag()) <= 1e-15 * scale) z = cplx(z.real(), 0.0);
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

double eigenpair_residual(const Mat3& m, cplx z) {
  std::array<std::array<cplx, 3>, 3> rows;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rows[i][j] = cplx(m[i * 3 + j]) - (i == j ? z : cplx(0.0));

  // Null vector: best cross product of two rows; rank <= 1 handled below.
  std::array<cplx, 3> v{};
  double best = 0.0;
  for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    const auto c = cross(rows[a], rows[b]);
    if (const double n = vnorm(c); n > best) {
      best = n;
      v = c;
    }
  }
  const double mscale = std::max(1.0, norm1(m));
  if (best <= 1e-10 * mscale * mscale) {
    int r = 0;
    for (int i = 1; i < 3; ++i)
      if (vnorm(rows[i]) > vnorm(rows[r])) r = i;
    if (vnorm(rows[r]) <= 1e-12 * mscale) {
      v = {cplx(1.0), cplx(0.0), cplx(0.0)};
    } else {
      int e = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(rows[r][i]) < std::abs(rows[r][e])) e = i;
      std::array<cplx, 3> unit{};
      unit[e] = 1.0;
      v = cross(rows[r], unit);
    }
  }
  std::array<cplx, 3> res{};
  for (int i = 0; i < 3; ++i)
    res[i] = rows[i][0] * v[0] + rows[i][1] * v[1] + rows[i][2] * v[2];
  return vnorm(res) / vnorm(v);
}

Eigenvalues eig_M(const Mat3& m) {
  const Eigenvalues ev = characteristic_roots(m);
  // Purely imaginary roots come back with round-off real parts of either sign.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, norm1(m));
  for (const auto& z : ev) {
    if (!(z.real() > floor)) {
      std::ostringstream os;
      os << "coupling matrix is not positive-stable: eigenvalue " << z.real()
         << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
         << "i has non-positive real part";
      throw Error(ErrorKind::non_hurwitz, os.str());
    }
  }
  return ev;
}

CouplingMatrix::CouplingMatrix()
    : CouplingMatrix(Mat3{0, 1, 0, -1, 0, 1, 0, -1, 1}) {}

CouplingMatrix::CouplingMatrix(const Mat3& m) : m_(m), eig_(eig_M(m)) {}

SpectrumReport spectral_bound(const CouplingMatrix& m, const Grid& grid) {
  SpectrumReport r;
  r.eigenvalues = m.eigenvalues();
  r.lambda_min = grid.lambda_min();
  r.spectral_bound = -r.lambda_min * m.min_real_part();
  r.omega_max = -r.spectral_bound;
  return r;
}

// ---------------------------------------------------------------------------
// phi-functions

namespace {

constexpr double kTaylorThreshold = 0.1;
constexpr int kTaylorTerms = 25;

// sum_{k < terms} X^k / (k + j)!  by Horner.
Mat3 taylor_phi(const Mat3& x, int j) {
  double inv_fact[kTaylorTerms + 3];
  inv_fact[0] = 1.0;
  for (int i = 1; i < kTaylorTerms + 3; ++i) inv_fact[i] = inv_fact[i - 1] / i;
  const Mat3 eye = identity3();
  Mat3 acc = inv_fact[kTaylorTerms - 1 + j] * eye;
  for (int k = kTaylorTerms - 2; k >= 0; --k)
    acc = inv_fact[k + j] * eye + x * acc;
  return acc;
}

}  // namespace

PhiTriple phi_functions(const Mat3& b, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::invalid_argument, "phi_functions requires h > 0");
  const Mat3 x = h * b;
  const double nx = norm1(x);
  int squarings = 0;
  if (nx >= kTaylorThreshold)
    squarings = static_cast<int>(std::ceil(std::log2(nx / kTaylorThreshold))) + 1;
  const Mat3 y = std::ldexp(1.0, -squarings) * x;

  PhiTriple r{taylor_phi(y, 0), taylor_phi(y, 1), taylor_phi(y, 2)};
  const Mat3 eye = identity3();
  for (int s = 0; s < squarings; ++s) {
    // phi2(2Y) = (phi1(Y)^2 + 2 phi2(Y)) / 4,  phi1(2Y) = (e^Y + I) phi1(Y) / 2
    const Mat3 p2 = 0.25 * (r.phi1 * r.phi1 + 2.0 * r.phi2);
    const Mat3 p1 = 0.5 * ((r.exp + eye) * r.phi1);
    r.exp = r.exp * r.exp;
    r.phi1 = p1;
    r.phi2 = p2;
  }
  return r;
}

Mat3 matrix_exponential(const Mat3& x) {
  const double nx = norm1(x);
  int squarings = 0;
  if (nx >= kTaylorThreshold)
    squarings = static_cast<int>(std::ceil(std::log2(nx / kTaylorThreshold))) + 1;
  Mat3 e = taylor_phi(std::ldexp(1.0, -squarings) * x, 0);
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

// ---------------------------------------------------------------------------

namespace {

void apply_blockwise(const Grid& g, const std::vector<const Mat3*>& mats,
                     const SpectralState& x, SpectralState& out, bool add) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 v{x.z[i], x.u[i], x.theta[i]};
    const Vec3 w = *mats[i] * v;
    if (add) {
      out.z[i] += w[0];
      out.u[i] += w[1];
      out.theta[i] += w[2];
    } else {
      out.z[i] = w[0];
      out.u[i] = w[1];
      out.theta[i] = w[2];
    }
  }
}

}  // namespace

PlateOperator::PlateOperator(Grid grid, CouplingMatrix coupling, double h)
    : grid_(std::move(grid)), coupling_(std::move(coupling)), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::invalid_argument, "step size must be positive");
  std::map<int, std::size_t> seen;
  block_of_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const int lam = grid_.eigenvalue(i);
    auto it = seen.find(lam);
    if (it == seen.end()) {
      ModeBlock blk;
      blk.lambda = lam;
      blk.generator = -static_cast<double>(lam) * coupling_.matrix();
      blk.cache = phi_functions(blk.generator, h_);
      it = seen.emplace(lam, blocks_.size()).first;
      blocks_.push_back(blk);
    }
    block_of_[i] = it->second;
  }
}

PlateOperator PlateOperator::with_step(double h) const {
  return PlateOperator(grid_, coupling_, h);
}

SpectralState PlateOperator::apply_exp(const SpectralState& x) const {
  std::vector<const Mat3*> mats(grid_.size());
  for (std::size_t i = 0; i < mats.size(); ++i) mats[i] = &block(i).cache.exp;
  SpectralState out(grid_);
  apply_blockwise(grid_, mats, x, out, false);
  out.t = x.t + h_;
  return out;
}

SpectralState PlateOperator::exp_euler_update(const SpectralState& x,
                                              const SpectralState& n) const {
  SpectralState out = apply_exp(x);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Vec3 w = block(i).cache.phi1 * Vec3{n.z[i], n.u[i], n.theta[i]};
    out.z[i] += h_ * w[0];
    out.u[i] += h_ * w[1];
    out.theta[i] += h_ * w[2];
  }
  return out;
}

void PlateOperator::add_phi2(SpectralState& y, const SpectralState& d) const {
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Vec3 w = block(i).cache.phi2 * Vec3{d.z[i], d.u[i], d.theta[i]};
    y.z[i] += h_ * w[0];
    y.u[i] += h_ * w[1];
    y.theta[i] += h_ * w[2];
  }
}

SpectralState semigroup_apply(const SpectralState& x,
                              const CouplingMatrix& coupling, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorKind::invalid_argument, "semigroup time must be >= 0");
  const Grid& g = x.grid();
  std::map<int, Mat3> cache;
  std::vector<const Mat3*> mats(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int lam = g.eigenvalue(i);
    auto it = cache.find(lam);
    if (it == cache.end())
      it = cache.emplace(lam, t == 0.0 ? identity3()
                                       : matrix_exponential(
                                             (-t * lam) * coupling.matrix()))
               .first;
    mats[i] = &it->second;
  }
  SpectralState out(g);
  apply_blockwise(g, mats, x, out, false);
  out.t = x.t + t;
  return out;
}

}  // namespace plateflow

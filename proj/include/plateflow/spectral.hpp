/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Sine-basis spectral representation on the box (0, pi)^n, n in {1, 2}.
//
// A field is stored either as nodal values at the interior nodes
// x_j = j*pi/N, j = 1..N-1 (per axis), or as coefficients of the products of
// sines  prod_i sin(k_i x_i), k_i = 1..N-1.  Coefficients are plain amplitudes,
// so f(x) = sin(x) has c_1 = 1.  With that convention the transform pair is
//
//   f_j = sum_k c_k prod_i sin(k_i x_{j_i})
//   c_k = (2/N)^n sum_j f_j prod_i sin(k_i x_{j_i})
//
// and the discrete Parseval identity reads
//
//   (pi/N)^n sum_j f_j^2 = (pi/2)^n sum_k c_k^2.
//
// Every sine mode is an eigenfunction of the Dirichlet Laplacian with
// eigenvalue -lambda_k, lambda_k = sum_i k_i^2; the Navier conditions
// W = Delta W = Theta = 0 hold identically in this basis.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace plateflow {

class Grid {
public:
  /// `dim` in {1, 2}; `modes` is N >= 4 (N - 1 modes per axis).
  Grid(int dim, int modes);

  int dim() const noexcept { return dim_; }
  int modes() const noexcept { return modes_; }
  int per_axis() const noexcept { return modes_ - 1; }
  std::size_t size() const noexcept { return size_; }

  double node(int j) const;
  /// Multi-index (k_1, k_2) of flat index `idx`; k_2 = 0 in 1-D.
  std::array<int, 2> mode_of(std::size_t idx) const;
  std::size_t index_of(int k1, int k2 = 0) const;
  int eigenvalue(std::size_t idx) const { return (*lambda_)[idx]; }
  int lambda_min() const noexcept { return dim_; }
  /// Largest retained wavenumber per axis under the 2/3 rule.
  int dealias_cutoff() const noexcept { return (2 * modes_) / 3; }

  /// Quadrature weight (pi/N)^n of one node.
  double cell_volume() const noexcept;
  /// (pi/2)^n: discrete L2 norm squared equals this times sum c_k^2.
  double parseval_factor() const noexcept;

  /// sin(k x_j) for k, j in 1..N-1, row-major in (k-1, j-1).  Symmetric.
  const std::vector<double>& sine_table() const { return *sine_; }
  /// k cos(k x_j), row-major in (j-1, k-1).
  const std::vector<double>& derivative_table() const { return *deriv_; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.modes_ == b.modes_;
  }

private:
  int dim_;
  int modes_;
  std::size_t size_;
  std::shared_ptr<const std::vector<double>> sine_;
  std::shared_ptr<const std::vector<double>> deriv_;
  std::shared_ptr<const std::vector<int>> lambda_;
};

enum class Representation { spectral, physical };

class ScalarField {
public:
  ScalarField(Grid grid, Representation rep);
  ScalarField(Grid grid, Representation rep, std::vector<double> values);

  /// Spectral field with a single coefficient `amplitude` at mode (k1, k2).
  static ScalarField mode(const Grid& grid, double amplitude, int k1,
                          int k2 = 0);
  /// Physical field sampled from f(x1, x2) at the nodes (x2 = 0 in 1-D).
  static ScalarField sample(const Grid& grid,
                            const std::function<double(double, double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  bool is_spectral() const noexcept { return rep_ == Representation::spectral; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s) noexcept;
  /// this += s * other
  ScalarField& axpy(double s, const ScalarField& other);

private:
  void check_compatible(const ScalarField& other) const;

  Grid grid_;
  Representation rep_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws Error(tag_mismatch) unless `f` carries representation `rep`.
void require(const ScalarField& f, Representation rep, const char* op);

ScalarField dst_forward(const ScalarField& f);
ScalarField dst_inverse(const ScalarField& c);

ScalarField laplacian_apply(const ScalarField& f);
ScalarField laplacian_solve(const ScalarField& g);

/// Nodal values of each partial derivative of a spectral field.
std::vector<ScalarField> gradient(const ScalarField& f);
ScalarField gradient_squared(const ScalarField& f);

/// Zeroes every coefficient with some k_i above the 2/3 cutoff.
ScalarField dealias(ScalarField f);

/// The triple x = (Z, U, Theta) of spectral fields at time t, where
/// Z = Delta W, U = W_t.
struct SpectralState {
  explicit SpectralState(const Grid& grid);
  SpectralState(ScalarField z, ScalarField u, ScalarField theta, double t = 0.0);

  const Grid& grid() const noexcept { return z.grid(); }
  bool all_finite() const noexcept;

  ScalarField& component(int i);
  const ScalarField& component(int i) const;

  SpectralState& operator+=(const SpectralState& other);
  SpectralState& operator-=(const SpectralState& other);
  SpectralState& operator*=(double s) noexcept;

  ScalarField z;
  ScalarField u;
  ScalarField theta;
  double t = 0.0;
};

SpectralState operator+(SpectralState a, const SpectralState& b);
SpectralState operator-(SpectralState a, const SpectralState& b);
SpectralState operator*(double s, SpectralState a);

/// Max-abs over all coefficients of all three components.
double coefficient_sup(const SpectralState& x);

}  // namespace plateflow

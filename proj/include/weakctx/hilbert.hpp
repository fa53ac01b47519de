// Copyright 2026 The weakctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small dense complex linear algebra for finite-dimensional quantum
// mechanics: normalized states, operators, projectors and the spectral
// decomposition of Hermitian operators.
//
// Dimensions here are tiny (d <= ~16), so everything is a dense row-major
// array and eigenproblems are solved by cyclic Jacobi rotations.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weakctx/errors.hpp"

namespace weakctx {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

namespace tolerance {
// Accepted deviation of a user-supplied state from unit norm before it is
// rejected. Within this band the state is rescaled.
inline constexpr double kStateInput = 1e-6;
inline constexpr double kStateNorm = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kProjector = 1e-10;
// Eigenvalues closer than this (relative to max(1, |A|)) share a projector.
inline constexpr double kEigenCluster = 1e-8;
}  // namespace tolerance

/// Hermitian inner product, conjugate-linear in the first argument.
inline Complex vdot(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) {
    throw ValidationError("inner product: dimension mismatch (" + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()) + ")");
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

inline double norm(std::span<const Complex> u) { return std::sqrt(std::real(vdot(u, u))); }

/// A d x d complex matrix. Entries are stored row-major.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::size_t dim) : dim_(dim), entries_(dim * dim, Complex{0.0, 0.0}) {}

  static Operator identity(std::size_t dim) {
    Operator out(dim);
    for (std::size_t i = 0; i < dim; ++i) out(i, i) = 1.0;
    return out;
  }

  /// Builds from explicit rows; the matrix must be square with finite entries.
  static Operator from_rows(const std::vector<CVector>& rows) {
    const std::size_t dim = rows.size();
    if (dim == 0) throw ValidationError("operator: empty matrix");
    Operator out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (rows[i].size() != dim) throw ValidationError("operator: matrix is not square");
      for (std::size_t j = 0; j < dim; ++j) {
        const Complex z = rows[i][j];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          throw ValidationError("operator: non-finite entry");
        }
        out(i, j) = z;
      }
    }
    return out;
  }

  static Operator diagonal(std::span<const double> values) {
    Operator out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
  }

  /// |u><v|
  static Operator outer(std::span<const Complex> u, std::span<const Complex> v) {
    if (u.size() != v.size()) throw ValidationError("outer product: dimension mismatch");
    Operator out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * std::conj(v[j]);
    return out;
  }

  std::size_t dim() const { return dim_; }

  Complex operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }

  Operator adjoint() const {
    Operator out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Complex trace() const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) acc += (*this)(i, i);
    return acc;
  }

  /// Largest absolute entry.
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  bool is_hermitian(double tol = tolerance::kHermitian) const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
  }

  CVector apply(std::span<const Complex> v) const {
    if (v.size() != dim_) throw ValidationError("operator apply: dimension mismatch");
    CVector out(dim_, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < dim_; ++i) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  Operator& operator+=(const Operator& rhs) {
    check_same_dim(rhs);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += rhs.entries_[k];
    return *this;
  }
  Operator& operator-=(const Operator& rhs) {
    check_same_dim(rhs);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= rhs.entries_[k];
    return *this;
  }
  Operator& operator*=(Complex s) {
    for (auto& z : entries_) z *= s;
    return *this;
  }

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
  friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(Operator lhs, double s) { return lhs *= Complex{s, 0.0}; }
  friend Operator operator*(double s, Operator rhs) { return rhs *= Complex{s, 0.0}; }

  friend Operator operator*(const Operator& a, const Operator& b) {
    a.check_same_dim(b);
    const std::size_t d = a.dim_;
    Operator out(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < d; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

 private:
  void check_same_dim(const Operator& other) const {
    if (other.dim_ != dim_) throw ValidationError("operator arithmetic: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

/// Max-norm distance between two operators of equal dimension.
inline double max_norm_distance(const Operator& a, const Operator& b) { return (a - b).max_abs(); }

/// A unit vector in C^d, d >= 2. Only constructible through the
/// normalizing factory, so every State has norm 1 to within 1e-12.
class State {
 public:
  static State from_amplitudes(CVector amplitudes) {
    if (amplitudes.size() < 2) throw ValidationError("state: dimension must be at least 2");
    for (const auto& z : amplitudes) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ValidationError("state: non-finite amplitude");
      }
    }
    const double n = norm(amplitudes);
    if (std::abs(n - 1.0) > tolerance::kStateInput) {
      throw ValidationError("state: norm " + std::to_string(n) + " deviates from 1 by more than 1e-6");
    }
    for (auto& z : amplitudes) z /= n;
    return State(std::move(amplitudes));
  }

  static State basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw ValidationError("state: basis index out of range");
    CVector amps(dim, Complex{0.0, 0.0});
    amps[index] = 1.0;
    return from_amplitudes(std::move(amps));
  }

  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  /// |s><s|
  Operator projector() const { return Operator::outer(amplitudes_, amplitudes_); }

 private:
  explicit State(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {}

  CVector amplitudes_;
};

inline Complex inner(const State& u, const State& v) { return vdot(u.amplitudes(), v.amplitudes()); }

/// <u|A|v>
inline Complex matrix_element(const State& u, const Operator& a, const State& v) {
  return vdot(u.amplitudes(), a.apply(v.amplitudes()));
}

/// ||P^2 - P||_max
inline double idempotence_residual(const Operator& p) { return max_norm_distance(p * p, p); }

/// True iff P is Hermitian and idempotent, both within 1e-10.
inline bool validate_projector(const Operator& p) {
  if (p.dim() == 0) return false;
  return p.is_hermitian(tolerance::kProjector) && idempotence_residual(p) <= tolerance::kProjector;
}

struct SpectralTerm {
  double eigenvalue;
  Operator projector;
};

/// Distinct eigenvalues in strictly increasing order with their
/// eigenprojectors.
struct SpectralDecomposition {
  std::vector<SpectralTerm> terms;

  Operator reconstruct() const {
    Operator out(terms.empty() ? 0 : terms.front().projector.dim());
    for (const auto& t : terms) out += t.eigenvalue * t.projector;
    return out;
  }

  double min_eigenvalue() const { return terms.front().eigenvalue; }
  double max_eigenvalue() const { return terms.back().eigenvalue; }
};

namespace detail {

// Cyclic Jacobi for a real symmetric n x n matrix (row-major). On return
// `a` is diagonal up to rounding and the columns of `v` hold eigenvectors.
inline void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::size_t n) {
  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [n](std::vector<double>& m, std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    if (std::sqrt(off) <= 1e-15 * scale) return;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw NumericalError("spectral decomposition: Jacobi iteration did not converge");
}

}  // namespace detail

/// Spectral decomposition of a Hermitian operator.
///
/// The d x d Hermitian matrix H = X + iY is embedded as the real symmetric
/// 2d x 2d matrix [[X, -Y], [Y, X]], whose spectrum is that of H with every
/// eigenvalue doubled. For a cluster of real eigenvectors (u; v) spanning
/// one eigenspace, the complex eigenprojector is 1/2 sum (u + iv)(u + iv)^dagger,
/// independent of the basis chosen inside the cluster.
inline SpectralDecomposition spectral_decompose(const Operator& a) {
  if (!a.is_hermitian()) throw ValidationError("spectral decomposition: operator is not Hermitian");
  const std::size_t d = a.dim();
  const std::size_t n = 2 * d;

  std::vector<double> real(n * n, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Complex z = a(i, j);
      real[i * n + j] = z.real();
      real[i * n + (j + d)] = -z.imag();
      real[(i + d) * n + j] = z.imag();
      real[(i + d) * n + (j + d)] = z.real();
    }
  }
  std::vector<double> vecs;
  detail::jacobi_eigen(real, vecs, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return real[x * n + x] < real[y * n + y]; });

  const double threshold = tolerance::kEigenCluster * std::max(1.0, a.max_abs());
  SpectralDecomposition out;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && real[order[end] * n + order[end]] - real[order[end - 1] * n + order[end - 1]] <= threshold) {
      ++end;
    }
    if ((end - start) % 2 != 0) {
      throw NumericalError("spectral decomposition: unpaired eigenvalue in real embedding");
    }
    double mean = 0.0;
    Operator proj(d);
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t col = order[k];
      mean += real[col * n + col];
      CVector z(d);
      for (std::size_t i = 0; i < d; ++i) z[i] = Complex{vecs[i * n + col], vecs[(i + d) * n + col]};
      proj += Operator::outer(z, z);
    }
    mean /= static_cast<double>(end - start);
    proj *= Complex{0.5, 0.0};
    // Exact Hermiticity.
    proj = 0.5 * (proj + proj.adjoint());
    out.terms.push_back({mean, std::move(proj)});
    start = end;
  }
  return out;
}

}  // namespace weakctx

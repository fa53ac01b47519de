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

// Dense two-phase primal simplex with Bland's anti-cycling rule.
//
// Problems here have at most a few thousand columns and a known small
// optimum, so a full tableau is simpler than a revised method and plenty
// fast. Bland's rule (lowest eligible index enters, lowest basic index wins
// ratio ties) guarantees termination on the heavily degenerate LPs the
// noncontextual bound produces.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "weakctx/errors.hpp"

namespace weakctx::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Row {
  std::vector<std::pair<std::size_t, double>> coefficients;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// maximize c^T x subject to rows, x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;

  explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, 0.0) {}

  void add_row(std::vector<std::pair<std::size_t, double>> coefficients, Sense sense, double rhs) {
    for (const auto& [j, v] : coefficients) {
      if (j >= num_vars) throw ValidationError("lp: coefficient index out of range");
      (void)v;
    }
    rows.push_back({std::move(coefficients), sense, rhs});
  }
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 1'000'000;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double rhs(std::size_t i) const { return at(i, cols_); }
  // Objective row sits below the constraint rows.
  std::size_t obj() const { return rows_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t width = cols_ + 1;
    double* prow = &data_[r * width];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < width; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * width];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) {
        if (prow[j] != 0.0) row[j] -= f * prow[j];
      }
      row[c] = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Runs simplex iterations on the objective row (stored as -reduced costs,
// so a negative entry marks an improving column). Columns at or beyond
// `allowed_cols` never enter.
inline Status iterate(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed_cols,
                      const SimplexOptions& opts, std::size_t& pivots) {
  while (true) {
    std::size_t enter = allowed_cols;
    for (std::size_t j = 0; j < allowed_cols; ++j) {
      if (t.at(t.obj(), j) < -opts.pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter == allowed_cols) return Status::kOptimal;

    std::size_t leave = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= opts.pivot_tol) continue;
      const double ratio = t.rhs(i) / a;
      const bool tie = std::abs(ratio - best_ratio) <= 1e-14;
      if (leave == t.rows() || (!tie && ratio < best_ratio) || (tie && basis[i] < basis[leave])) {
        if (!tie) best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == t.rows()) return Status::kUnbounded;
    if (++pivots > opts.max_pivots) throw NumericalError("simplex: pivot budget exhausted");
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace detail

inline Solution solve(const LinearProgram& program, const SimplexOptions& opts = {}) {
  const std::size_t n = program.num_vars;
  const std::size_t m = program.rows.size();
  if (program.objective.size() != n) throw ValidationError("lp: objective size mismatch");

  // Column layout: [original | slack/surplus | artificial].
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (const auto& row : program.rows) {
    if (row.sense != Sense::kEqual) ++num_slack;
    const bool flip = row.rhs < 0.0;
    const bool needs_art = row.sense == Sense::kEqual || (row.sense == Sense::kLessEqual) == flip;
    if (needs_art) ++num_art;
  }
  const std::size_t art_begin = n + num_slack;
  const std::size_t cols = art_begin + num_art;

  detail::Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::size_t next_slack = n;
  std::size_t next_art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = program.rows[i];
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [j, v] : row.coefficients) t.at(i, j) += sign * v;
    t.rhs(i) = sign * row.rhs;
    Sense sense = row.sense;
    if (sign < 0.0 && sense != Sense::kEqual) {
      sense = sense == Sense::kLessEqual ? Sense::kGreaterEqual : Sense::kLessEqual;
    }
    if (sense == Sense::kLessEqual) {
      t.at(i, next_slack) = 1.0;
      basis[i] = next_slack++;
    } else {
      if (sense == Sense::kGreaterEqual) t.at(i, next_slack++) = -1.0;
      t.at(i, next_art) = 1.0;
      basis[i] = next_art++;
    }
  }

  Solution sol;
  // Phase 1: maximize -(sum of artificials).
  if (num_art > 0) {
    for (std::size_t j = art_begin; j < cols; ++j) t.at(t.obj(), j) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art_begin) continue;
      for (std::size_t j = 0; j <= cols; ++j) t.at(t.obj(), j) -= t.at(i, j);
    }
    detail::iterate(t, basis, cols, opts, sol.pivots);
    // Objective row rhs holds max -(sum of artificials); zero iff feasible.
    if (t.rhs(t.obj()) < -opts.feasibility_tol) {
      sol.status = Status::kInfeasible;
      return sol;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art_begin) continue;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > opts.pivot_tol) {
          t.pivot(i, j);
          basis[i] = j;
          ++sol.pivots;
          break;
        }
      }
      // A row with no eligible column is redundant; its artificial stays
      // basic at zero and can never re-enter.
    }
  }

  // Phase 2.
  for (std::size_t j = 0; j <= cols; ++j) t.at(t.obj(), j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.at(t.obj(), j) = -program.objective[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = basis[i];
    const double f = t.at(t.obj(), b);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= cols; ++j) t.at(t.obj(), j) -= f * t.at(i, j);
  }
  sol.status = detail::iterate(t, basis, art_begin, opts, sol.pivots);
  if (sol.status != Status::kOptimal) return sol;

  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t.rhs(i);
  }
  sol.objective = t.rhs(t.obj());
  return sol;
}

}  // namespace weakctx::lp

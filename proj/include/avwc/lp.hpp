#pragma once

// Self-contained two-phase dense simplex for the small LPs that decide
// symmetrizability and the F-function. Bland's pivoting rule avoids cycling;
// problem sizes stay below ~100 x 100.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "avwc/error.hpp"

namespace avwc {

enum class RowKind { LessEqual, GreaterEqual, Equal };

struct LpRow {
  std::vector<double> coeffs;
  RowKind kind = RowKind::LessEqual;
  double rhs = 0.0;
};

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  std::vector<double> x;
};

/// Minimize c.x subject to the rows, x >= 0.
class SimplexSolver {
public:
  static LpResult minimize(const std::vector<double>& c, const std::vector<LpRow>& rows) {
    SimplexSolver s(c, rows);
    return s.run();
  }

private:
  static constexpr double kEps = 1e-10;

  std::size_t n_;               // structural variables
  std::size_t m_;               // rows
  std::size_t total_;           // structural + slack/surplus + artificial
  std::size_t art_begin_;       // first artificial column
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;

  SimplexSolver(const std::vector<double>& c, const std::vector<LpRow>& rows)
      : n_(c.size()), m_(rows.size()) {
    // count extra columns
    std::size_t slack = 0, art = 0;
    std::vector<LpRow> norm = rows;
    for (auto& r : norm) {
      if (r.coeffs.size() != n_)
        throw Error(ErrorKind::SolverFailure, "LP row width mismatch");
      if (r.rhs < 0) { // keep b >= 0
        for (auto& v : r.coeffs) v = -v;
        r.rhs = -r.rhs;
        if (r.kind == RowKind::LessEqual) r.kind = RowKind::GreaterEqual;
        else if (r.kind == RowKind::GreaterEqual) r.kind = RowKind::LessEqual;
      }
      if (r.kind == RowKind::LessEqual) ++slack;
      else if (r.kind == RowKind::GreaterEqual) { ++slack; ++art; }
      else ++art;
    }
    art_begin_ = n_ + slack;
    total_ = art_begin_ + art;
    a_.assign(m_, std::vector<double>(total_, 0.0));
    b_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    cost_ = c;
    cost_.resize(total_, 0.0);

    std::size_t next_slack = n_, next_art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = norm[i];
      for (std::size_t j = 0; j < n_; ++j) a_[i][j] = r.coeffs[j];
      b_[i] = r.rhs;
      if (r.kind == RowKind::LessEqual) {
        a_[i][next_slack] = 1.0;
        basis_[i] = next_slack++;
      } else if (r.kind == RowKind::GreaterEqual) {
        a_[i][next_slack++] = -1.0;
        a_[i][next_art] = 1.0;
        basis_[i] = next_art++;
      } else {
        a_[i][next_art] = 1.0;
        basis_[i] = next_art++;
      }
    }
  }

  // one simplex phase on the given objective; returns false when unbounded
  bool iterate(const std::vector<double>& obj, std::vector<double>& reduced, double& value,
               bool restrict_artificials) {
    // price out the basis to form reduced costs each iteration (small m)
    const std::size_t limit = restrict_artificials ? total_ : art_begin_;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > 50000) throw Error(ErrorKind::SolverFailure, "simplex iteration cap hit");
      std::vector<double> y(m_, 0.0); // multipliers via basis costs
      // compute reduced cost: obj_j - sum_i y_i a_ij with y from B^T y = c_B.
      // Using the explicit tableau (a_ holds the current tableau), the
      // reduced costs are obj_j - sum_i obj[basis_i] * a_ij.
      reduced.assign(limit, 0.0);
      for (std::size_t j = 0; j < limit; ++j) {
        double r = obj[j];
        for (std::size_t i = 0; i < m_; ++i) r -= obj[basis_[i]] * a_[i][j];
        reduced[j] = r;
      }
      (void)y;
      // Bland: smallest index with negative reduced cost
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced[j] < -kEps) { enter = j; break; }
      }
      if (enter == limit) {
        value = 0.0;
        for (std::size_t i = 0; i < m_; ++i) value += obj[basis_[i]] * b_[i];
        return true;
      }
      // ratio test, Bland ties by smallest basis index
      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][enter] > kEps) {
          double ratio = b_[i] / a_[i][enter];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (leave == m_ || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m_) return false; // unbounded
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double piv = a_[row][col];
    for (auto& v : a_[row]) v /= piv;
    b_[row] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = a_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) a_[i][j] -= f * a_[row][j];
      b_[i] -= f * b_[row];
    }
    basis_[row] = col;
  }

  LpResult run() {
    LpResult res;
    // phase 1
    if (art_begin_ < total_) {
      std::vector<double> phase1(total_, 0.0);
      for (std::size_t j = art_begin_; j < total_; ++j) phase1[j] = 1.0;
      std::vector<double> reduced;
      double v1 = 0.0;
      if (!iterate(phase1, reduced, v1, /*restrict_artificials=*/true))
        throw Error(ErrorKind::SolverFailure, "phase-1 unbounded");
      if (v1 > 1e-7) {
        res.feasible = false;
        return res;
      }
      // drive remaining artificials out of the basis when possible
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= art_begin_) {
          std::size_t col = art_begin_;
          for (std::size_t j = 0; j < art_begin_; ++j) {
            if (std::abs(a_[i][j]) > kEps) { col = j; break; }
          }
          if (col < art_begin_) pivot(i, col);
          // otherwise the row is redundant; harmless to keep
        }
      }
    }
    // phase 2
    std::vector<double> reduced;
    double v2 = 0.0;
    if (!iterate(cost_, reduced, v2, /*restrict_artificials=*/false)) {
      res.feasible = true;
      res.bounded = false;
      return res;
    }
    res.feasible = true;
    res.objective = v2;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = b_[i];
    return res;
  }
};

} // namespace avwc

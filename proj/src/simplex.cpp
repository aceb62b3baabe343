#include "liecramer/simplex.hpp"

#include <vector>

namespace liecramer {

namespace {

constexpr double kPivotEps = 1e-12;

struct Tableau {
  Matrix t;                      // rows 0..m-1 constraints, row m objective
  std::vector<Eigen::Index> basis;
  Eigen::Index m = 0;
  Eigen::Index rhs = 0;

  void pivot(Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // Returns false if unbounded.
  bool optimize(Eigen::Index allowed_cols) {
    for (int guard = 0; guard < 10000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t(m, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) <= kPivotEps) continue;
        const double ratio = t(i, rhs) / t(i, enter);
        if (leave < 0 || ratio < best - kPivotEps ||
            (ratio <= best + kPivotEps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    fail(ErrorKind::Convergence, "solve_lp: iteration limit reached");
  }
};

}  // namespace

std::optional<LinearProgramSolution> solve_lp(const Vector& c, const Matrix& a, const Vector& b,
                                              double feasibility_tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) fail(ErrorKind::InvalidArgument, "solve_lp: shape mismatch");

  Tableau tab;
  tab.m = m;
  tab.rhs = n + m;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * a.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, tab.rhs) = sign * b[i];
    tab.basis[static_cast<std::size_t>(i)] = n + i;
  }

  // Phase one: maximize -sum(artificials).
  for (Eigen::Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  tab.t.block(m, n, 1, m).setZero();
  tab.optimize(n + m);
  if (tab.t(m, tab.rhs) < -feasibility_tol) return std::nullopt;

  // Drive artificials out of the basis where possible; rows where that is
  // impossible are redundant and keep a zero-level artificial.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase two.
  tab.t.row(m).setZero();
  tab.t.row(m).head(n) = -c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bcol = tab.basis[static_cast<std::size_t>(i)];
    const double cost = bcol < n ? c[bcol] : 0.0;
    if (cost != 0.0) tab.t.row(m) += cost * tab.t.row(i);
  }
  if (!tab.optimize(n)) fail(ErrorKind::InvalidArgument, "solve_lp: objective is unbounded");

  LinearProgramSolution sol;
  sol.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bcol = tab.basis[static_cast<std::size_t>(i)];
    if (bcol < n) sol.x[bcol] = std::max(0.0, tab.t(i, tab.rhs));
  }
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace liecramer

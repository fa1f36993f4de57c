#include "nscf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nscf::lp {
namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-11;

// Dense tableau for  min cost.y  s.t.  E y = r (r >= 0), y >= 0.
class Tableau {
 public:
  Tableau(const RMat& E, const RVec& r, int n_real)
      : rows_(static_cast<int>(E.rows())),
        cols_(static_cast<int>(E.cols())),
        n_real_(n_real),
        t_(E.rows(), E.cols() + 1),
        basis_(E.rows(), -1),
        allowed_(E.cols(), true) {
    t_.leftCols(cols_) = E;
    t_.col(cols_) = r;
  }

  void set_basis(int row, int col) { basis_[row] = col; }
  void forbid(int col) { allowed_[col] = false; }
  const std::vector<int>& basis() const { return basis_; }
  const RMat& data() const { return t_; }
  int pivots() const { return pivots_; }

  // Returns false when the objective is unbounded below.
  bool run(const RVec& cost) {
    RVec d = reduced_costs(cost);
    int stall = 0;
    double last = objective(cost);
    const int max_iter = 50 * (rows_ + cols_) + 1000;
    for (int it = 0; it < max_iter; ++it) {
      const bool bland = stall > 30;
      int enter = -1;
      double best = -kCostEps;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed_[j] || d[j] >= -kCostEps) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (d[j] < best) {
          best = d[j];
          enter = j;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotEps) continue;
        const double q = t_(i, cols_) / a;
        if (q < ratio - 1e-14 ||
            (q <= ratio + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      d = reduced_costs(cost);
      const double now = objective(cost);
      stall = (now < last - 1e-13) ? 0 : stall + 1;
      last = now;
    }
    return true;
  }

  void pivot(int r, int s) {
    ++pivots_;
    t_.row(r) /= t_(r, s);
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, s);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = s;
  }

  double objective(const RVec& cost) const {
    double v = 0.0;
    for (int i = 0; i < rows_; ++i) v += cost[basis_[i]] * t_(i, cols_);
    return v;
  }

  // After phase one: pivot artificial columns out of the basis where a real
  // column can replace them. Rows that cannot be repaired are redundant.
  void expel_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < n_real_) continue;
      int best = -1;
      double mag = kPivotEps;
      for (int j = 0; j < n_real_; ++j) {
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

 private:
  RVec reduced_costs(const RVec& cost) const {
    RVec d = cost;
    for (int i = 0; i < rows_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb != 0.0) d -= cb * t_.row(i).head(cols_).transpose();
    }
    return d;
  }

  int rows_;
  int cols_;
  int n_real_;
  RMat t_;
  std::vector<int> basis_;
  std::vector<bool> allowed_;
  int pivots_ = 0;
};

}  // namespace

Result maximize(const RVec& c, const RMat& A, const RVec& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  Result out;

  // Dual standard form  A^T y = c, y >= 0, rows sign-normalized so rhs >= 0.
  RMat E(n, m + n);
  E.setZero();
  RVec r = c;
  E.leftCols(m) = A.transpose();
  for (int i = 0; i < n; ++i) {
    if (r[i] < 0) {
      E.row(i).head(m) *= -1.0;
      r[i] = -r[i];
    }
    E(i, m + i) = 1.0;
  }

  Tableau tab(E, r, m);
  for (int i = 0; i < n; ++i) tab.set_basis(i, m + i);

  RVec phase1 = RVec::Zero(m + n);
  phase1.tail(n).setOnes();
  tab.run(phase1);
  const double infeas = tab.objective(phase1);
  if (infeas > 1e-9 * std::max(1.0, r.cwiseAbs().maxCoeff())) {
    // Dual infeasible means the primal is unbounded (x = 0 is feasible).
    out.status = Status::Unbounded;
    out.pivots = tab.pivots();
    return out;
  }
  tab.expel_artificials();
  for (int j = m; j < m + n; ++j) tab.forbid(j);

  RVec phase2 = RVec::Zero(m + n);
  phase2.head(m) = b;
  if (!tab.run(phase2)) {
    out.status = Status::Infeasible;
    out.pivots = tab.pivots();
    return out;
  }

  out.status = Status::Optimal;
  out.value = tab.objective(phase2);
  out.pivots = tab.pivots();

  // Complementary slackness: constraints whose dual variable is basic are
  // tight at the primal optimum.
  std::vector<int> tight;
  for (int col : tab.basis()) {
    if (col < m) tight.push_back(col);
  }
  if (!tight.empty()) {
    RMat At(static_cast<Eigen::Index>(tight.size()), n);
    RVec bt(static_cast<Eigen::Index>(tight.size()));
    for (std::size_t k = 0; k < tight.size(); ++k) {
      At.row(static_cast<Eigen::Index>(k)) = A.row(tight[k]);
      bt[static_cast<Eigen::Index>(k)] = b[tight[k]];
    }
    out.x = At.completeOrthogonalDecomposition().solve(bt);
  } else {
    out.x = RVec::Zero(n);
  }
  return out;
}

}  // namespace nscf::lp

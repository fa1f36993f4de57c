#pragma once

#include "nscf/types.hpp"

namespace nscf::lp {

enum class Status { Optimal, Unbounded, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;
  RVec x;                 // primal maximizer (valid when Optimal)
  int pivots = 0;
};

// maximize c.x subject to A x <= b, x unrestricted in sign.
//
// Solved through its dual  min b.y  s.t.  A^T y = c, y >= 0  with a dense
// two-phase tableau simplex. The dual has dim(x) rows, so the tableau stays
// small even when A has many rows (Lipschitz constraints are O(m^2)).
Result maximize(const RVec& c, const RMat& A, const RVec& b);

}  // namespace nscf::lp

// SPDX-License-Identifier: Apache-2.0
#include "stabkit/box.hpp"

#include "stabkit/error.hpp"

namespace stabkit {

Box::Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() < 1) throw InvalidInput("box bounds must have equal positive dimension");
  if (!lo.allFinite() || !hi.allFinite()) throw InvalidInput("box bounds must be finite");
}

Box Box::unit(int dim) { return Box(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)); }

Box Box::cube(const Eigen::Ref<const Eigen::VectorXd>& center, double side) {
  return Box(center.array() - 0.5 * side, center.array() + 0.5 * side);
}

Box Box::intersect(const Box& other) const {
  if (other.dim() != dim()) throw InvalidInput("box dimension mismatch");
  Box out;
  out.lo = lo.cwiseMax(other.lo);
  out.hi = hi.cwiseMin(other.hi);
  return out;
}

}  // namespace stabkit

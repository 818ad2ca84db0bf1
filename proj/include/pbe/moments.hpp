#pragma once

#include <cmath>

#include <Eigen/Core>

namespace pbe {

/// sum_i pivot_i^order * conc_i. Order 1 is the mass, order 0 the particle number.
template <typename ConcDerived, typename PivotDerived>
typename ConcDerived::Scalar moment(const Eigen::MatrixBase<ConcDerived>& conc,
                                   const Eigen::MatrixBase<PivotDerived>& pivots, double order) {
  using Scalar = typename ConcDerived::Scalar;
  if (order == 0.0) return conc.sum();
  if (order == 1.0) return pivots.dot(conc);
  return (pivots.array().pow(Scalar(order)) * conc.array()).sum();
}

/// sum_i (pivot_i^a + pivot_i^{-b}) * |u_i|
template <typename ConcDerived, typename PivotDerived>
typename ConcDerived::Scalar weighted_l1(const Eigen::MatrixBase<ConcDerived>& u,
                                        const Eigen::MatrixBase<PivotDerived>& pivots, double a,
                                        double b) {
  using Scalar = typename ConcDerived::Scalar;
  return ((pivots.array().pow(Scalar(a)) + pivots.array().pow(Scalar(-b))) * u.array().abs()).sum();
}

} // namespace pbe

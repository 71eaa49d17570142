#pragma once

// qpm bounds, majorization and the squeezing check over tiling traces.

#include <algorithm>
#include <functional>
#include <utility>

#include "qregion/cpti.hpp"
#include "qregion/fock.hpp"

namespace qregion {

struct OrderedEigenvalues {
  RealVector descending;
  RealVector ascending;
  double total = 0.0;
};

inline OrderedEigenvalues ordered(const RealVector& v) {
  OrderedEigenvalues o;
  o.descending = v;
  std::sort(o.descending.data(), o.descending.data() + o.descending.size(), std::greater<>());
  o.ascending = o.descending.reverse();
  o.total = v.sum();
  return o;
}

/// (lambda_min, lambda_max): the range of qpm's a state can have on the region.
inline std::pair<double, double> qpm_bounds(const FockOperator& k, double tol = 1e-9) {
  const Spectrum s = hermitian_spectrum(k, tol);
  return {s.eigenvalues[k.dim() - 1], s.eigenvalues[0]};
}

namespace detail {

inline bool totals_match(double sp, double sq, double tol) { return std::abs(sp - sq) <= tol * std::max(1.0, std::abs(sp)); }

}  // namespace detail

/// p majorizes q: descending partial sums of p dominate those of q (within
/// tol) and the totals agree within tol * max(1, |sum p|).
inline bool majorizes(const RealVector& p, const RealVector& q, double tol) {
  if (p.size() != q.size()) throw DimensionMismatch("majorizes: length mismatch");
  const RealVector a = ordered(p).descending, b = ordered(q).descending;
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sa < sb - tol) return false;
  }
  return detail::totals_match(sa, sb, tol);
}

/// Ascending form: partial sums of p sorted non-decreasing stay at or above
/// those of q. With equal totals this is the same order as majorizes(q, p).
inline bool majorizes_ascending(const RealVector& p, const RealVector& q, double tol) {
  if (p.size() != q.size()) throw DimensionMismatch("majorizes_ascending: length mismatch");
  const RealVector a = ordered(p).ascending, b = ordered(q).ascending;
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sa < sb - tol) return false;
  }
  return detail::totals_match(sa, sb, tol);
}

struct SqueezingReport {
  bool holds = false;
  int pairs_checked = 0;
  int degenerate_pairs = 0;  // strict lambda'_min < lambda'_max waived
};

/// 4 lambda_min <= lambda'_min < lambda'_max <= 4 lambda_max for every
/// consecutive pair of records (the factor is the generator count of the
/// step map). Needs at least two records.
inline SqueezingReport squeezing_report(const TilingTrace& trace, double tol) {
  SqueezingReport r;
  if (trace.steps.size() < 2) return r;
  r.holds = true;
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    const TilingStep& a = trace.steps[i - 1];
    const TilingStep& b = trace.steps[i];
    const double f = b.step ? b.step->expected_sum : 4.0;
    ++r.pairs_checked;
    if (b.lambda_min < f * a.lambda_min - tol) r.holds = false;
    if (b.lambda_max > f * a.lambda_max + tol) r.holds = false;
    if (b.lambda_max - b.lambda_min <= tol) {
      ++r.degenerate_pairs;
    } else if (!(b.lambda_min < b.lambda_max)) {
      r.holds = false;
    }
  }
  return r;
}

inline bool squeezing_check(const TilingTrace& trace, double tol) { return squeezing_report(trace, tol).holds; }

/// Row and column sums equal `sum` within tol and entries >= -1e-12, over
/// the top-left k rows/columns (full length sums).
inline bool is_doubly_stochastic(const RealMatrix& h, int k, double tol, double sum = 1.0) {
  if (h.rows() != h.cols()) throw DimensionMismatch("is_doubly_stochastic: matrix not square");
  k = std::min<int>(k, h.rows());
  if (h.minCoeff() < -1e-12) return false;
  if ((h.topRows(k).rowwise().sum().array() - sum).abs().maxCoeff() > tol) return false;
  if ((h.leftCols(k).colwise().sum().array() - sum).abs().maxCoeff() > tol) return false;
  return true;
}

}  // namespace qregion

#pragma once

// Region operators: the displaced-parity kernel, quadrature construction over
// arbitrary regions, and the closed forms for segments, lines, rectangles
// (coherent symbol) and origin-centred disks.
//
// Normalization: 2D regions use the Wigner kernel (1/pi) D(q,p) Pi D(q,p)^+
// with measure dq dp, so the whole plane maps to the identity and
// Tr K = area / (2 pi). Segments, lines and the origin point use the bare
// kernel D Pi D^+ with arc-length measure.

#include <cmath>
#include <vector>

#include "qregion/fock.hpp"
#include "qregion/geometry.hpp"
#include "qregion/parallel.hpp"

namespace qregion {

enum class Normalization { wigner, parity };

inline const char* to_string(Normalization n) { return n == Normalization::wigner ? "wigner" : "parity"; }

namespace detail {

// Packed lower triangle, ordered by diagonal offset k then by column n:
// entry (n + k, n) sits at offset[k] + n.
struct KernelTables {
  int d = 0;
  std::vector<std::size_t> offset;
  std::vector<double> half_lgamma;  // lgamma(k+1)/2
  std::vector<double> up;           // 1 / sqrt((n+1)(n+k+1))
  std::vector<double> back;         // sqrt(n(n+k))

  explicit KernelTables(int dim) : d(dim), offset(dim + 1), half_lgamma(dim) {
    offset[0] = 0;
    for (int k = 0; k < d; ++k) offset[k + 1] = offset[k] + (d - k);
    up.resize(offset[d]);
    back.resize(offset[d]);
    for (int k = 0; k < d; ++k) {
      half_lgamma[k] = 0.5 * std::lgamma(k + 1.0);
      for (int n = 0; n + k < d; ++n) {
        up[offset[k] + n] = 1.0 / std::sqrt((n + 1.0) * (n + k + 1.0));
        back[offset[k] + n] = std::sqrt(double(n) * (n + k));
      }
    }
  }
  std::size_t packed_size() const { return offset[d]; }
};

/// acc += scale * <m|D(beta) Pi|n> over the packed lower triangle.
inline void add_displaced_parity(const KernelTables& t, Complex beta, double scale, Vector& acc) {
  const double r = std::abs(beta);
  const double x = r * r;
  const double logr = r > 0.0 ? std::log(r) : 0.0;
  const Complex unit = r > 0.0 ? beta / r : Complex(1.0, 0.0);
  Complex phase(scale, 0.0);
  for (int k = 0; k < t.d; ++k) {
    if (k > 0) phase *= unit;
    double g;
    if (r == 0.0) {
      if (k > 0) break;
      g = 1.0;
    } else {
      g = std::exp(k * logr - t.half_lgamma[k] - 0.5 * x);
    }
    const std::size_t base = t.offset[k];
    double gm1 = 0.0;
    for (int n = 0; n + k < t.d; ++n) {
      acc[base + n] += (n % 2 == 0 ? phase : -phase) * g;
      const double next = ((2.0 * n + 1.0 + k - x) * g - t.back[base + n] * gm1) * t.up[base + n];
      gm1 = g;
      g = next;
    }
  }
}

inline Matrix unpack_hermitian(const KernelTables& t, const Vector& packed) {
  Matrix out(t.d, t.d);
  for (int k = 0; k < t.d; ++k)
    for (int n = 0; n + k < t.d; ++n) {
      const Complex v = packed[t.offset[k] + n];
      out(n + k, n) = v;
      out(n, n + k) = std::conj(v);
    }
  for (int n = 0; n < t.d; ++n) out(n, n) = out(n, n).real();
  return out;
}

inline double kernel_prefactor(Normalization n) { return n == Normalization::wigner ? 1.0 / kPi : 1.0; }

}  // namespace detail

/// Delta(q,p) = c D(q,p) Pi D(q,p)^+ = c D(2 alpha) Pi, c = 1/pi (wigner) or 1.
inline FockOperator phase_kernel(double q, double p, const TruncationConfig& cfg,
                                 Normalization norm = Normalization::wigner) {
  cfg.validate();
  detail::require_finite(q, "kernel q");
  detail::require_finite(p, "kernel p");
  const detail::KernelTables t(cfg.dim);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(t.packed_size()));
  detail::add_displaced_parity(t, 2.0 * phase_point_to_alpha(q, p), detail::kernel_prefactor(norm), acc);
  return FockOperator(detail::unpack_hermitian(t, acc), true);
}

// ---------------------------------------------------------------------------
// Closed forms

/// Working dimension for closed forms built from functions of truncated
/// quadratures: the padding keeps the returned block free of cutoff effects.
inline int padded_dim(int dim) { return std::max(2 * dim, dim + 32); }

/// sin(Q_theta L)/Q_theta Pi, the operator of the centred segment of length L
/// along (-sin theta, cos theta).
inline FockOperator segment_operator_closed_form(double length, double theta, const TruncationConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(length) || !(length > 0.0)) throw InvalidArgument("segment length must be positive");
  detail::require_finite(theta, "segment angle");
  const TruncationConfig work{padded_dim(cfg.dim), cfg.effective_dim, cfg.tol};
  const FockOperator f = spectral_function(rotated_quadrature(theta, work), [length](double x) {
    return std::abs(x) < 1e-8 ? length * (1.0 - x * x * length * length / 6.0) : std::sin(x * length) / x;
  });
  Matrix k = f.matrix() * parity(work).matrix();
  k = k.topLeftCorner(cfg.dim, cfg.dim).eval();
  return FockOperator(0.5 * (k + k.adjoint()), true);
}

struct LineProjector {
  FockOperator projector;  // |q><q| / <q|q>, idempotent
  double raw_scale;        // <q|q> of the truncated eigenket
};

/// Projector on the line q cos(theta) + p sin(theta) = offset, built from the
/// Q_theta eigenket.
inline LineProjector line_projector(double theta, double offset, const TruncationConfig& cfg) {
  detail::require_finite(theta, "line angle");
  detail::require_finite(offset, "line offset");
  const Vector ket = position_eigenket(offset, theta, cfg);
  const double scale = ket.squaredNorm();
  if (!(scale > 0.0)) throw NumericalError("line offset far outside the truncation window");
  Matrix k = ket * ket.adjoint() / scale;
  return {FockOperator(0.5 * (k + k.adjoint()), true), scale};
}

/// <z|K_rect|z> for the Wigner-normalized rectangle operator.
inline double rectangle_coherent_symbol(Complex z, const Rectangle& r) {
  const double qz = std::sqrt(2.0) * z.real(), pz = std::sqrt(2.0) * z.imag();
  return 0.25 * (std::erf(r.x0 + r.A - qz) - std::erf(r.x0 - qz)) * (std::erf(r.k0 + r.B - pz) - std::erf(r.k0 - pz));
}

/// Eigenvalues lambda_n = (-1)^n int_0^{R^2} e^{-u} L_n(2u) du, n < dim, of the
/// origin-centred disk of radius R (the operator is diagonal). Composite
/// Gauss-Legendre, panels doubled until the vector settles to 1e-14.
inline RealVector disk_spectrum_radial(double radius, const TruncationConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(radius) || !(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  const int d = cfg.dim;
  const double top = radius * radius;
  const GaussRule g = gauss_legendre(32);
  auto integrate = [&](int panels) {
    RealVector sum = RealVector::Zero(d);
    const double h = top / panels;
    for (int j = 0; j < panels; ++j) {
      const double mid = (j + 0.5) * h;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double u = mid + 0.5 * h * g.nodes[i];
        sum += (0.5 * h * g.weights[i]) * damped_laguerre(2.0 * u, d);
      }
    }
    return sum;
  };
  int panels = std::max(1, static_cast<int>(std::ceil(top / 4.0)));
  RealVector prev = integrate(panels);
  for (int iter = 0; iter < 12; ++iter) {
    panels *= 2;
    RealVector cur = integrate(panels);
    const double change = (cur - prev).cwiseAbs().maxCoeff();
    prev = std::move(cur);
    if (change < 1e-14) break;
  }
  for (int n = 1; n < d; n += 2) prev[n] = -prev[n];
  return prev;
}

inline FockOperator disk_operator(double radius, const TruncationConfig& cfg) {
  const RealVector l = disk_spectrum_radial(radius, cfg);
  return FockOperator(l.cast<Complex>().asDiagonal().toDenseMatrix(), true);
}

/// D(s,t) K D(s,t)^+ with the unitary truncated displacement, so the
/// spectrum is preserved exactly.
inline FockOperator displaced_conjugate(const FockOperator& k, double s, double t, const TruncationConfig& cfg) {
  detail::require_hermitian(k, cfg.tol, "displaced_conjugate");
  TruncationConfig c = cfg;
  c.dim = k.dim();
  c.effective_dim = std::min(c.effective_dim, c.dim);
  const Matrix d = unitary_displacement(s, t, c).matrix();
  Matrix out = d * k.matrix() * d.adjoint();
  return FockOperator(0.5 * (out + out.adjoint()), true);
}

// ---------------------------------------------------------------------------
// Quadrature construction

namespace detail {

inline constexpr std::size_t kNodeChunk = 64;

inline Matrix integrate_nodes(const std::vector<QuadratureNode>& nodes, int dim, int threads) {
  const KernelTables t(dim);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(t.packed_size()));
  const Vector packed = ordered_chunk_sum(nodes.size(), kNodeChunk, threads, zero, [&](std::size_t b, std::size_t e) {
    Vector acc = zero;
    for (std::size_t i = b; i < e; ++i) {
      const QuadratureNode& nd = nodes[i];
      const double c =
          kernel_prefactor(nd.measure == Measure::area ? Normalization::wigner : Normalization::parity);
      add_displaced_parity(t, 2.0 * phase_point_to_alpha(nd.point.q, nd.point.p), c * nd.weight, acc);
    }
    return acc;
  });
  return unpack_hermitian(t, packed);
}

inline Matrix build_at_order(const Region& r, const TruncationConfig& cfg, int order, int threads) {
  auto [nodes, atoms] = decompose_region(r, order);
  Matrix k = integrate_nodes(nodes, cfg.dim, threads);
  for (const Point& x : atoms.points)
    k += phase_kernel(x.q, x.p, cfg, Normalization::parity).matrix();
  for (const Line& l : atoms.lines) k += line_projector(l.theta, l.offset, cfg).projector.matrix();
  return k;
}

inline bool needs_quadrature(const Region& r) {
  auto [nodes, atoms] = decompose_region(r, 4);
  return !nodes.empty();
}

}  // namespace detail

/// Region operator by quadrature of the kernel. Lines and the origin point
/// use their closed forms. With `adaptive` set the order doubles until the
/// Frobenius change drops below `adapt_tol` or `max_order` is reached.
inline FockOperator build_region_operator(const Region& r, const TruncationConfig& cfg, const QuadratureSpec& spec = {}) {
  cfg.validate();
  spec.validate();
  Matrix k = detail::build_at_order(r, cfg, spec.order, spec.threads);
  if (spec.adaptive && detail::needs_quadrature(r)) {
    for (int order = 2 * spec.order; order <= spec.max_order; order *= 2) {
      Matrix next = detail::build_at_order(r, cfg, order, spec.threads);
      const double change = (next - k).norm();
      k = std::move(next);
      if (change < spec.adapt_tol) break;
    }
  }
  if (!all_finite(k)) throw NumericalError("region operator has non-finite entries");
  return FockOperator(std::move(k), true, cfg.tol);
}

}  // namespace qregion

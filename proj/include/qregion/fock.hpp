#pragma once

// Truncated Fock-basis operator algebra.
//
// Every operator here lives on span{|0>, ..., |d-1>}. Closed-form builders
// (displacement matrix elements, kernels) return the exact top-left d x d
// block of the infinite-dimensional operator. Identities that only hold in
// infinite dimension are asserted on the top-left effective_dim block.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qregion/errors.hpp"
#include "qregion/special.hpp"

namespace qregion {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

struct TruncationConfig {
  int dim = 32;
  int effective_dim = 16;
  double tol = 1e-9;

  void validate() const {
    if (dim < 2) throw InvalidTruncation("dim must be at least 2, got " + std::to_string(dim));
    if (effective_dim < 1 || effective_dim > dim) {
      throw InvalidTruncation("effective_dim must lie in [1, dim], got " + std::to_string(effective_dim));
    }
    if (!(tol > 0.0)) throw InvalidTruncation("tol must be positive");
  }
};

/// Truncation with the default effective block floor(dim/2).
inline TruncationConfig truncation(int dim, int effective_dim = 0, double tol = 1e-9) {
  TruncationConfig cfg{dim, effective_dim > 0 ? effective_dim : std::max(1, dim / 2), tol};
  cfg.validate();
  return cfg;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
  }
  return true;
}

/// Largest deviation from hermiticity, relative to max(1, max|A_ij|).
inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint()) / std::max(1.0, max_abs(m));
}

class FockOperator {
 public:
  FockOperator() = default;

  explicit FockOperator(Matrix entries, bool hermitian_hint = false, double tol = 1e-9)
      : entries_(std::move(entries)), hermitian_(hermitian_hint) {
    if (entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("FockOperator needs a square matrix");
    }
    if (!all_finite(entries_)) throw NumericalError("FockOperator entries must be finite");
    if (hermitian_ && hermiticity_defect(entries_) > tol) {
      throw NotHermitian("FockOperator flagged hermitian but max|A - A^+| = " +
                         std::to_string(hermiticity_defect(entries_)));
    }
  }

  static FockOperator identity(int dim) { return FockOperator(Matrix::Identity(dim, dim), true); }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  bool hermitian_hint() const { return hermitian_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  FockOperator adjoint() const { return FockOperator(entries_.adjoint(), hermitian_); }
  Complex trace() const { return entries_.trace(); }

  /// Top-left k x k block.
  Matrix block(int k) const { return entries_.topLeftCorner(k, k); }

 private:
  Matrix entries_;
  bool hermitian_ = false;
};

inline FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator product: dimension mismatch");
  return FockOperator(a.matrix() * b.matrix());
}

inline FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator sum: dimension mismatch");
  return FockOperator(a.matrix() + b.matrix(), a.hermitian_hint() && b.hermitian_hint());
}

inline FockOperator operator*(double s, const FockOperator& a) {
  return FockOperator(s * a.matrix(), a.hermitian_hint());
}

/// Max |A - B| over the top-left k x k block.
inline double block_max_diff(const Matrix& a, const Matrix& b, int k) {
  return max_abs(a.topLeftCorner(k, k) - b.topLeftCorner(k, k));
}

/// Frobenius norm of (A - B) over the top-left k x k block.
inline double block_frobenius_diff(const Matrix& a, const Matrix& b, int k) {
  return (a.topLeftCorner(k, k) - b.topLeftCorner(k, k)).norm();
}

// ---------------------------------------------------------------------------
// Canonical operators

enum class BasicKind { annihilation, creation, number, position, momentum, rotated_quadrature, parity, rotation };

inline FockOperator build_basic_operator(BasicKind kind, const TruncationConfig& cfg, double theta = 0.0) {
  cfg.validate();
  if (!std::isfinite(theta)) throw NumericalError("basic operator angle must be finite");
  const int d = cfg.dim;
  const Complex i(0.0, 1.0);
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Matrix ad = a.adjoint();
  const double r2 = std::sqrt(2.0);
  switch (kind) {
    case BasicKind::annihilation:
      return FockOperator(a);
    case BasicKind::creation:
      return FockOperator(ad);
    case BasicKind::number: {
      Matrix n = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) n(k, k) = double(k);
      return FockOperator(n, true);
    }
    case BasicKind::position:
      return FockOperator((a + ad) / r2, true);
    case BasicKind::momentum:
      return FockOperator(i * (ad - a) / r2, true);
    case BasicKind::rotated_quadrature:
      return FockOperator(((a + ad) / r2) * std::cos(theta) + (i * (ad - a) / r2) * std::sin(theta), true);
    case BasicKind::parity: {
      Matrix p = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
      return FockOperator(p, true);
    }
    case BasicKind::rotation: {
      Matrix r = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) r(k, k) = std::polar(1.0, k * theta);
      return FockOperator(r);
    }
  }
  throw InvalidArgument("unknown basic operator kind");
}

inline FockOperator annihilation(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::annihilation, cfg); }
inline FockOperator creation(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::creation, cfg); }
inline FockOperator number_operator(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::number, cfg); }
inline FockOperator position(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::position, cfg); }
inline FockOperator momentum(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::momentum, cfg); }
inline FockOperator parity(const TruncationConfig& cfg) { return build_basic_operator(BasicKind::parity, cfg); }

/// Q cos(theta) + P sin(theta) = R(theta) Q R(theta)^+.
inline FockOperator rotated_quadrature(double theta, const TruncationConfig& cfg) {
  return build_basic_operator(BasicKind::rotated_quadrature, cfg, theta);
}

/// R(theta) = exp(i theta N); conjugation by it rotates phase space
/// counter-clockwise by theta.
inline FockOperator rotation(double theta, const TruncationConfig& cfg) {
  return build_basic_operator(BasicKind::rotation, cfg, theta);
}

// ---------------------------------------------------------------------------
// Displacements

namespace detail {

/// Visits the lower triangle of <m|D(beta)|n>, m >= n, as f(m, n, value).
///
/// With k = m - n the element is sqrt(n!/m!) beta^k e^{-|beta|^2/2} L_n^{(k)}(|beta|^2).
/// The normalized g_n = sqrt(n!/(n+k)!) |beta|^k e^{-x/2} L_n^{(k)}(x) obeys
///   g_{n+1} = ((2n+1+k-x) g_n - sqrt(n(n+k)) g_{n-1}) / sqrt((n+1)(n+k+1)),
/// started from g_0 = exp(k log|beta| - lgamma(k+1)/2 - x/2).
template <class F>
void for_each_displacement_lower(Complex beta, int d, F&& f) {
  const double r = std::abs(beta);
  const double x = r * r;
  const double phi = std::arg(beta);
  const double logr = r > 0.0 ? std::log(r) : 0.0;
  for (int k = 0; k < d; ++k) {
    double g0;
    if (r == 0.0) {
      g0 = (k == 0) ? 1.0 : 0.0;
    } else {
      g0 = std::exp(k * logr - 0.5 * std::lgamma(k + 1.0) - 0.5 * x);
    }
    const Complex phase = std::polar(1.0, k * phi);
    double gm1 = 0.0, g = g0;
    for (int n = 0; n + k < d; ++n) {
      f(n + k, n, phase * g);
      const double next = ((2.0 * n + 1.0 + k - x) * g - std::sqrt(double(n) * (n + k)) * gm1) /
                          std::sqrt((n + 1.0) * (n + k + 1.0));
      gm1 = g;
      g = next;
    }
  }
}

/// Full closed-form block of D(beta), with D^+(beta) = D(-beta) giving the
/// upper triangle: <n|D(beta)|m> = (-1)^{m-n} conj(<m|D(beta)|n>) for m > n.
inline Matrix displacement_block(Complex beta, int d) {
  Matrix out(d, d);
  for_each_displacement_lower(beta, d, [&](int m, int n, Complex v) {
    out(m, n) = v;
    if (m != n) out(n, m) = ((m - n) % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
  });
  return out;
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + " must be finite");
}

}  // namespace detail

/// Phase-space coordinate (q, p) to the coherent amplitude alpha = (q + ip)/sqrt(2).
inline Complex phase_point_to_alpha(double q, double p) { return Complex(q, p) / std::sqrt(2.0); }

/// Closed-form D(q,p) = exp i(pQ - qP): the exact top-left block of the
/// infinite-dimensional unitary. Not unitary at finite dim.
inline FockOperator displacement_operator(double q, double p, const TruncationConfig& cfg) {
  cfg.validate();
  detail::require_finite(q, "displacement q");
  detail::require_finite(p, "displacement p");
  return FockOperator(detail::displacement_block(phase_point_to_alpha(q, p), cfg.dim));
}

/// exp(i(pQ_d - qP_d)) with the truncated quadratures: exactly unitary in the
/// truncated space and equal to the closed form on low rows and columns.
/// Used wherever a Kraus generator has to be unitary.
inline FockOperator unitary_displacement(double q, double p, const TruncationConfig& cfg) {
  cfg.validate();
  detail::require_finite(q, "displacement q");
  detail::require_finite(p, "displacement p");
  const Matrix gen = p * position(cfg).matrix() - q * momentum(cfg).matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
  const Matrix& v = es.eigenvectors();
  Vector phases(cfg.dim);
  for (int k = 0; k < cfg.dim; ++k) phases[k] = std::polar(1.0, es.eigenvalues()[k]);
  return FockOperator(v * phases.asDiagonal() * v.adjoint());
}

// ---------------------------------------------------------------------------
// Quadrature eigenvectors and coherent states

/// Bra amplitudes <q_theta|n> = psi_n(q_theta) e^{-i n theta}, n < dim.
/// Reliable for |q_theta| <= sqrt(2 effective_dim)/2; outside that window the
/// truncated expansion misses a visible part of the state.
inline Vector position_eigenvector_amplitudes(double q_theta, double theta, const TruncationConfig& cfg) {
  cfg.validate();
  const RealVector psi = hermite_functions(q_theta, cfg.dim);
  Vector out(cfg.dim);
  for (int n = 0; n < cfg.dim; ++n) out[n] = psi[n] * std::polar(1.0, -n * theta);
  return out;
}

/// Ket components <n|q_theta>; Q_theta |q_theta> = q_theta |q_theta>.
inline Vector position_eigenket(double q_theta, double theta, const TruncationConfig& cfg) {
  return position_eigenvector_amplitudes(q_theta, theta, cfg).conjugate();
}

/// Coherent state |z> (a|z> = z|z>), truncated.
inline Vector coherent_state(Complex z, int dim) {
  Vector v(dim);
  v[0] = std::exp(-0.5 * std::norm(z));
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * z / std::sqrt(double(n));
  return v;
}

/// <z|K|z>.
inline Complex coherent_symbol(const FockOperator& k, Complex z) {
  const Vector v = coherent_state(z, k.dim());
  return v.dot(k.matrix() * v);
}

// ---------------------------------------------------------------------------
// Spectral tools

struct Spectrum {
  RealVector eigenvalues;  // non-increasing
  Matrix eigenvectors;     // columns, in eigenvalue order; A = U diag(lambda) U^+
};

namespace detail {

inline void require_hermitian(const FockOperator& a, double tol, const char* what) {
  const double defect = hermiticity_defect(a.matrix());
  if (defect > tol) throw NotHermitian(std::string(what) + ": input not hermitian (defect " + std::to_string(defect) + ")");
}

// Make the first component with |c| > 1e-10 * max|c| real and positive.
inline void fix_phase(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-10 * scale) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

inline bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

}  // namespace detail

/// Deterministic eigendecomposition of a Hermitian operator. Eigenvalues come
/// out non-increasing; each eigenvector has its first non-negligible component
/// real positive; eigenvalues equal to within 64 eps ||A|| form a tie group
/// ordered lexicographically by eigenvector components.
inline Spectrum hermitian_spectrum(const FockOperator& a, double tol = 1e-9) {
  detail::require_hermitian(a, tol, "hermitian_spectrum");
  const int d = a.dim();
  const Matrix sym = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_spectrum: eigensolver failed");

  Spectrum s;
  s.eigenvalues.resize(d);
  s.eigenvectors.resize(d, d);
  std::vector<Vector> vecs(d);
  std::vector<double> vals(d);
  for (int k = 0; k < d; ++k) {
    vals[k] = es.eigenvalues()[d - 1 - k];
    vecs[k] = es.eigenvectors().col(d - 1 - k);
    detail::fix_phase(vecs[k]);
  }
  const double tie = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_abs(sym));
  std::vector<int> order(d);
  for (int k = 0; k < d; ++k) order[k] = k;
  int start = 0;
  while (start < d) {
    int end = start + 1;
    while (end < d && vals[end - 1] - vals[end] <= tie) ++end;
    if (end - start > 1) {
      std::sort(order.begin() + start, order.begin() + end,
                [&](int x, int y) { return detail::lex_less(vecs[x], vecs[y]); });
    }
    start = end;
  }
  for (int k = 0; k < d; ++k) {
    s.eigenvalues[k] = vals[order[k]];
    s.eigenvectors.col(k) = vecs[order[k]];
  }
  return s;
}

/// f(A) for Hermitian A, via the eigendecomposition. f must be total: supply
/// removable singularities (sin(xL)/x at 0) yourself.
template <class F>
FockOperator spectral_function(const FockOperator& a, F&& f, double tol = 1e-9) {
  detail::require_hermitian(a, tol, "spectral_function");
  const Matrix sym = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  RealVector fv(a.dim());
  for (int k = 0; k < a.dim(); ++k) fv[k] = f(es.eigenvalues()[k]);
  const Matrix& v = es.eigenvectors();
  Matrix out = v * fv.cast<Complex>().asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint());
  return FockOperator(std::move(out), true);
}

/// (A o B)_ij = A_ij B_ij.
inline Matrix hadamard_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("hadamard_product: shape mismatch");
  return a.cwiseProduct(b);
}

/// |U_ij|^2, i.e. U o conj(U) as a real matrix.
inline RealMatrix hadamard_square(const Matrix& u) { return u.cwiseAbs2(); }

/// A (x) X on ancilla (x) system, ancilla index slowest-varying.
inline Matrix ancilla_embed(const Matrix& ancilla_op, const Matrix& x) {
  const Eigen::Index m = ancilla_op.rows(), d = x.rows();
  Matrix out(m * d, m * d);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out.block(i * d, j * d, d, d) = ancilla_op(i, j) * x;
  return out;
}

/// Tr_A over an m-dimensional ancilla factor (slowest index).
inline FockOperator ancilla_partial_trace(const Matrix& block, int ancilla_dim) {
  if (ancilla_dim < 1 || block.rows() != block.cols() || block.rows() % ancilla_dim != 0) {
    throw DimensionMismatch("ancilla_partial_trace: block size not divisible by ancilla dimension");
  }
  const Eigen::Index d = block.rows() / ancilla_dim;
  Matrix out = Matrix::Zero(d, d);
  for (int a = 0; a < ancilla_dim; ++a) out += block.block(a * d, a * d, d, d);
  return FockOperator(std::move(out));
}

}  // namespace qregion

#pragma once

// Completely positive trace-increasing maps eps(X) = sum_i G_i X G_i^+ with
// unitary generators: rotations, origin reflection, displacements, polygon
// copy maps, west/north tiling steps. Also their duals, block dilations, the
// tiling iteration and the eigenvalue step matrices.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qregion/fock.hpp"
#include "qregion/geometry.hpp"
#include "qregion/region_ops.hpp"

namespace qregion {

enum class MapKind { identity, rotation, reflection, displacement, polygon, west, north, tile_step, rotation_set, composed };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::identity: return "identity";
    case MapKind::rotation: return "rotation";
    case MapKind::reflection: return "reflection";
    case MapKind::displacement: return "displacement";
    case MapKind::polygon: return "polygon";
    case MapKind::west: return "west";
    case MapKind::north: return "north";
    case MapKind::tile_step: return "tile-step";
    case MapKind::rotation_set: return "rotation-set";
    case MapKind::composed: return "composed";
  }
  return "?";
}

inline MapKind parse_map_kind(const std::string& s) {
  for (MapKind k : {MapKind::identity, MapKind::rotation, MapKind::reflection, MapKind::displacement, MapKind::polygon,
                    MapKind::west, MapKind::north, MapKind::tile_step, MapKind::rotation_set, MapKind::composed})
    if (s == to_string(k)) return k;
  throw InvalidArgument("unknown map kind '" + s + "'");
}

/// phi: rotation angle; (q, p): displacement or (mu, nu) for a tile step;
/// sides: polygon M; angles: rotation_set angles.
struct MapParams {
  double phi = 0.0;
  double q = 0.0;
  double p = 0.0;
  int sides = 0;
  std::vector<double> angles;
};

class KrausMap {
 public:
  /// Generators must be unitary on the effective block within 1e-6.
  KrausMap(std::vector<FockOperator> generators, std::string label, MapKind kind, const TruncationConfig& cfg)
      : gens_(std::move(generators)), label_(std::move(label)), kind_(kind) {
    if (gens_.empty()) throw InvalidArgument("Kraus map needs at least one generator");
    const int d = gens_.front().dim();
    const int e = std::min(cfg.effective_dim, d);
    for (const auto& g : gens_) {
      if (g.dim() != d) throw DimensionMismatch("Kraus generators differ in dimension");
      const Matrix gg = g.matrix().adjoint() * g.matrix();
      const double defect = max_abs(gg.topLeftCorner(e, e) - Matrix::Identity(e, e));
      if (defect > 1e-6) throw NumericalError("Kraus generator not unitary on the effective block: " + std::to_string(defect));
    }
  }

  const std::vector<FockOperator>& generators() const { return gens_; }
  const std::string& label() const { return label_; }
  MapKind kind() const { return kind_; }
  int dim() const { return gens_.front().dim(); }
  int size() const { return static_cast<int>(gens_.size()); }

 private:
  std::vector<FockOperator> gens_;
  std::string label_;
  MapKind kind_;
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline KrausMap rotation_set_map(const std::vector<double>& angles, const TruncationConfig& cfg) {
  if (angles.empty()) throw InvalidArgument("rotation set needs at least one angle");
  std::vector<FockOperator> g;
  std::string label = "rotations{";
  for (std::size_t i = 0; i < angles.size(); ++i) {
    g.push_back(rotation(angles[i], cfg));
    label += (i ? "," : "") + detail::fmt_num(angles[i]);
  }
  return KrausMap(std::move(g), label + "}", MapKind::rotation_set, cfg);
}

/// outer o inner, stored with the explicit products outer_i inner_j, ordered
/// by outer index then inner index.
inline KrausMap compose(const KrausMap& outer, const KrausMap& inner, const TruncationConfig& cfg,
                        MapKind kind = MapKind::composed) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch("compose: dimension mismatch");
  std::vector<FockOperator> g;
  for (const auto& a : outer.generators())
    for (const auto& b : inner.generators()) g.push_back(FockOperator(a.matrix() * b.matrix()));
  return KrausMap(std::move(g), outer.label() + " o " + inner.label(), kind, cfg);
}

inline KrausMap make_map(MapKind kind, const MapParams& prm, const TruncationConfig& cfg) {
  cfg.validate();
  for (double v : {prm.phi, prm.q, prm.p}) detail::require_finite(v, "map parameter");
  const FockOperator id = FockOperator::identity(cfg.dim);
  switch (kind) {
    case MapKind::identity:
      return KrausMap({id}, "identity", kind, cfg);
    case MapKind::rotation:
      return KrausMap({id, rotation(prm.phi, cfg)}, "rotation(" + detail::fmt_num(prm.phi) + ")", kind, cfg);
    case MapKind::reflection:
      return KrausMap({id, parity(cfg)}, "reflection-origin", kind, cfg);
    case MapKind::displacement:
      return KrausMap({id, unitary_displacement(prm.q, prm.p, cfg)},
                      "displacement(" + detail::fmt_num(prm.q) + "," + detail::fmt_num(prm.p) + ")", kind, cfg);
    case MapKind::west:
      return KrausMap({id, unitary_displacement(prm.q, 0.0, cfg)}, "west(" + detail::fmt_num(prm.q) + ")", kind, cfg);
    case MapKind::north:
      return KrausMap({id, unitary_displacement(0.0, prm.p, cfg)}, "north(" + detail::fmt_num(prm.p) + ")", kind, cfg);
    case MapKind::polygon: {
      if (prm.sides < 3) throw InvalidArgument("polygon map needs M >= 3");
      std::vector<FockOperator> g;
      for (int j = 0; j < prm.sides; ++j) g.push_back(rotation(2.0 * kPi * j / prm.sides, cfg));
      return KrausMap(std::move(g), "polygon(" + std::to_string(prm.sides) + ")", kind, cfg);
    }
    case MapKind::tile_step: {
      const KrausMap w = make_map(MapKind::west, {0.0, prm.q, 0.0}, cfg);
      const KrausMap n = make_map(MapKind::north, {0.0, 0.0, prm.p}, cfg);
      // {1, D(mu,0), D(0,nu), D(0,nu) D(mu,0)}
      const KrausMap c = compose(n, w, cfg, MapKind::tile_step);
      return KrausMap(c.generators(), "tile-step(" + detail::fmt_num(prm.q) + "," + detail::fmt_num(prm.p) + ")",
                      kind, cfg);
    }
    case MapKind::rotation_set:
      return rotation_set_map(prm.angles, cfg);
    case MapKind::composed:
      break;
  }
  throw InvalidArgument("make_map: use compose() for composed maps");
}

// ---------------------------------------------------------------------------
// Application

inline FockOperator apply_kraus_map(const KrausMap& m, const FockOperator& x) {
  if (x.dim() != m.dim()) throw DimensionMismatch("apply_kraus_map: dimension mismatch");
  Matrix out = Matrix::Zero(x.dim(), x.dim());
  for (const auto& g : m.generators()) out.noalias() += g.matrix() * x.matrix() * g.matrix().adjoint();
  if (x.hermitian_hint()) out = (0.5 * (out + out.adjoint())).eval();
  return FockOperator(std::move(out), x.hermitian_hint());
}

/// eps*(rho) = sum_i G_i^+ rho G_i, so Tr(rho eps(X)) = Tr(eps*(rho) X).
inline FockOperator dual_apply(const KrausMap& m, const FockOperator& rho) {
  if (rho.dim() != m.dim()) throw DimensionMismatch("dual_apply: dimension mismatch");
  detail::require_hermitian(rho, 1e-9, "dual_apply");
  if (std::abs(rho.trace() - 1.0) > 1e-9) throw InvalidArgument("dual_apply: state must have unit trace");
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& g : m.generators()) out.noalias() += g.matrix().adjoint() * rho.matrix() * g.matrix();
  return FockOperator(0.5 * (out + out.adjoint()), true);
}

// ---------------------------------------------------------------------------
// Dilations. Ancilla index is the slowest-varying one.

namespace detail {

inline const Matrix& second_generator(const KrausMap& m) {
  if (m.size() != 2) throw InvalidArgument("two-generator dilation needs exactly 2 generators, got " + std::to_string(m.size()));
  const Matrix& g0 = m.generators()[0].matrix();
  if (max_abs(g0 - Matrix::Identity(g0.rows(), g0.cols())) > 1e-12)
    throw InvalidArgument("two-generator dilation needs the identity as first generator");
  return m.generators()[1].matrix();
}

}  // namespace detail

/// [[1, -S^+], [S, 1]] for eps = {1, S}: V V^+ = 2 1 and
/// Tr_A(V (|0><0| (x) X) V^+) = X + S X S^+.
inline Matrix dilation_unitary(const KrausMap& m) {
  const Matrix& s = detail::second_generator(m);
  const Eigen::Index d = s.rows();
  Matrix v(2 * d, 2 * d);
  v << Matrix::Identity(d, d), -s.adjoint(), s, Matrix::Identity(d, d);
  return v;
}

/// [[1, -S], [S^+, 1]]: the dilation of the dual map, rho + S^+ rho S.
inline Matrix dual_dilation_unitary(const KrausMap& m) {
  const Matrix& s = detail::second_generator(m);
  const Eigen::Index d = s.rows();
  Matrix v(2 * d, 2 * d);
  v << Matrix::Identity(d, d), -s, s.adjoint(), Matrix::Identity(d, d);
  return v;
}

/// Blocks <j|V|k> = w^{jk} G_j with w = exp(2 pi i / M). V V^+ = M 1, and any
/// ancilla input |k> reproduces the Kraus sum.
inline Matrix naimark_dilation(const KrausMap& m) {
  const int n = m.size();
  const int d = m.dim();
  Matrix v(Eigen::Index(n) * d, Eigen::Index(n) * d);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      v.block(Eigen::Index(j) * d, Eigen::Index(k) * d, d, d) =
          std::polar(1.0, 2.0 * kPi * ((j * k) % n) / n) * m.generators()[j].matrix();
  return v;
}

/// Dilation of the M-gon copy map, <j|V|k> = w^{jk} R(2 pi j / M).
inline Matrix polygon_dilation(int sides, const TruncationConfig& cfg) {
  if (sides < 3) throw InvalidArgument("polygon dilation needs M >= 3");
  return naimark_dilation(make_map(MapKind::polygon, {0.0, 0.0, 0.0, sides}, cfg));
}

/// Tr_A(V (|k><k| (x) X) V^+).
inline FockOperator dilated_apply(const Matrix& v, const FockOperator& x, int ancilla_dim, int input = 0) {
  if (v.rows() != v.cols() || v.rows() != Eigen::Index(ancilla_dim) * x.dim())
    throw DimensionMismatch("dilated_apply: block size does not match ancilla and system");
  if (input < 0 || input >= ancilla_dim) throw InvalidArgument("dilated_apply: ancilla input out of range");
  Matrix proj = Matrix::Zero(ancilla_dim, ancilla_dim);
  proj(input, input) = 1.0;
  return ancilla_partial_trace(v * ancilla_embed(proj, x.matrix()) * v.adjoint(), ancilla_dim);
}

// ---------------------------------------------------------------------------
// Step matrices and diagonal transfer

struct StepMatrix {
  RealMatrix entries;
  double expected_sum = 0.0;
  int effective_dim = 0;
  double max_row_deviation = 0.0;  // |row sum - expected| over effective rows
  double max_col_deviation = 0.0;
  double min_entry = 0.0;
};

/// S = sum_g |U'^+ G U|^2 (elementwise), where X = U diag(lambda) U^+ and
/// eps(X) = U' diag(lambda') U'^+. Then lambda' = S lambda.
inline StepMatrix step_matrix(const KrausMap& m, const Spectrum& before, const Spectrum& after, int effective_dim) {
  const int d = m.dim();
  if (before.eigenvectors.rows() != d || after.eigenvectors.rows() != d)
    throw DimensionMismatch("step_matrix: spectra dimension mismatch");
  StepMatrix s;
  s.entries = RealMatrix::Zero(d, d);
  s.expected_sum = m.size();
  s.effective_dim = std::min(effective_dim, d);
  for (const auto& g : m.generators())
    s.entries += hadamard_square(after.eigenvectors.adjoint() * g.matrix() * before.eigenvectors);
  const int e = s.effective_dim;
  s.max_row_deviation = (s.entries.topRows(e).rowwise().sum().array() - s.expected_sum).abs().maxCoeff();
  s.max_col_deviation = (s.entries.leftCols(e).colwise().sum().array() - s.expected_sum).abs().maxCoeff();
  s.min_entry = s.entries.minCoeff();
  return s;
}

/// max_{i < e} |lambda'_i - (S lambda)_i|.
inline double eigenvalue_update_residual(const StepMatrix& s, const Spectrum& before, const Spectrum& after) {
  const RealVector pred = s.entries * before.eigenvalues;
  return (after.eigenvalues - pred).head(s.effective_dim).cwiseAbs().maxCoeff();
}

/// Diagonal of eps(diag(d)) = sum_g (G o conj(G)) d.
inline RealVector diagonal_transfer(const KrausMap& m, const RealVector& diag) {
  if (diag.size() != m.dim()) throw DimensionMismatch("diagonal_transfer: length mismatch");
  RealVector out = RealVector::Zero(m.dim());
  for (const auto& g : m.generators()) out += hadamard_square(g.matrix()) * diag;
  return out;
}

/// Number-state diagonal of eps(X) from the spectrum X = U diag(lambda) U^+:
/// sum_g |G U|^2 lambda.
inline RealVector number_state_qpm(const KrausMap& m, const Spectrum& x) {
  if (x.eigenvectors.rows() != m.dim()) throw DimensionMismatch("number_state_qpm: dimension mismatch");
  RealVector out = RealVector::Zero(m.dim());
  for (const auto& g : m.generators()) out += hadamard_square(g.matrix() * x.eigenvectors) * x.eigenvalues;
  return out;
}

// ---------------------------------------------------------------------------
// Polygon construction

/// The hexagon from one [a, 2pi/6] triangle: eps_1 = {1, R(pi/3), R(-pi/3)}
/// builds the upper half, eps_2 = {1, Pi} adds its origin reflection.
inline FockOperator hexagon_from_triangle(const FockOperator& triangle, const TruncationConfig& cfg) {
  const KrausMap e1 = rotation_set_map({0.0, kPi / 3, -kPi / 3}, cfg);
  const KrausMap e2 = make_map(MapKind::reflection, {}, cfg);
  return apply_kraus_map(e2, apply_kraus_map(e1, triangle));
}

// ---------------------------------------------------------------------------
// Tiling

enum class TileMode { rectangle, disk };

inline const char* to_string(TileMode m) { return m == TileMode::rectangle ? "rectangle" : "disk"; }

struct TilingStep {
  Region region;
  double area = 0.0;
  FockOperator op;
  Spectrum spectrum;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::optional<StepMatrix> step;   // absent for the initial record
  double update_residual = 0.0;     // lambda' vs S lambda, effective block
  double shift_q = 0.0, shift_p = 0.0;
};

struct TilingTrace {
  TileMode mode = TileMode::rectangle;
  std::vector<TilingStep> steps;
};

/// West-north tiling. Step s applies the tile-step map with shifts equal to
/// the current extent: (A 2^s, B 2^s) for a rectangle, d 2^s for a disk, so
/// the covered area quadruples at every step.
inline TilingTrace tile_run(const FockOperator& x0, const Region& r0, int steps, TileMode mode,
                            const TruncationConfig& cfg) {
  cfg.validate();
  if (steps < 0) throw InvalidArgument("tile_run: negative step count");
  if (x0.dim() != cfg.dim) throw DimensionMismatch("tile_run: operator dimension differs from config");
  const Rectangle* rect = r0.get_if<Rectangle>();
  const Disk* dk = r0.get_if<Disk>();
  if (mode == TileMode::rectangle && !rect) throw InvalidArgument("rectangle tiling needs a rectangle");
  if (mode == TileMode::disk && (!dk || dk->center.q != 0.0 || dk->center.p != 0.0))
    throw InvalidArgument("disk tiling needs an origin-centred disk");

  TilingTrace trace;
  trace.mode = mode;
  auto record = [&](Region r, FockOperator op) {
    TilingStep st;
    st.area = region_area(r);
    st.region = std::move(r);
    st.spectrum = hermitian_spectrum(op, 1e-8);
    st.lambda_max = st.spectrum.eigenvalues[0];
    st.lambda_min = st.spectrum.eigenvalues[op.dim() - 1];
    st.op = std::move(op);
    trace.steps.push_back(std::move(st));
  };
  record(r0, x0);
  for (int s = 0; s < steps; ++s) {
    const double scale = std::ldexp(1.0, s);
    double mu, nu;
    Region next;
    if (mode == TileMode::rectangle) {
      mu = rect->A * scale;
      nu = rect->B * scale;
      next = rectangle(rect->x0, rect->k0, 2 * mu, 2 * nu);
    } else {
      mu = nu = dk->diameter * scale;
      next = disk_cluster(0.0, dk->diameter, (1 << (s + 1)) - 1);
    }
    const KrausMap m = make_map(MapKind::tile_step, {0.0, mu, nu}, cfg);
    FockOperator advanced = apply_kraus_map(m, trace.steps.back().op);
    record(std::move(next), std::move(advanced));
    TilingStep& cur = trace.steps.back();
    const TilingStep& before = trace.steps[trace.steps.size() - 2];
    cur.step = step_matrix(m, before.spectrum, cur.spectrum, cfg.effective_dim);
    cur.update_residual = eigenvalue_update_residual(*cur.step, before.spectrum, cur.spectrum);
    cur.shift_q = mu;
    cur.shift_p = nu;
  }
  return trace;
}

}  // namespace qregion

#pragma once

// The invariant suite: one named check per acceptance property, with pinned
// dimensions and tolerances. `dim_cap` lowers every pinned dimension to
// min(pinned, cap) for quick runs; the tolerances stay as pinned.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qregion/cpti.hpp"
#include "qregion/dsl.hpp"
#include "qregion/io.hpp"
#include "qregion/region_ops.hpp"
#include "qregion/spectra.hpp"

namespace qregion::verify {

struct Options {
  int dim_cap = 0;  // 0: pinned dimensions
  int threads = 1;
  unsigned long long seed = 20240611;
  std::filesystem::path scratch_dir;  // empty: a fresh directory under the system temp dir
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// The DSL round-trip corpus.
inline const std::vector<std::string>& roundtrip_corpus() {
  static const std::vector<std::string> corpus = {
      "point",
      "seg(1.5,0)",
      "seg(1.5,0.6283185307179586)",
      "line(0,0)",
      "line(1.5707963267948966,-0.25)",
      "rect(0,0,1,1)",
      "rect(-6,-6,12,12)",
      "rect(0.1,-0.2,3e-3,2.5E+2)",
      "disk(0,0,2)",
      "disk(-1.25,0.75,0.5)",
      "tri(0.8660254037844386,6)",
      "poly(0.8660254037844386,6)",
      "poly(1,3)",
      "rot(1.0471975511965976,tri(0.866,6))",
      "refl(rect(0,0,1,1))",
      "disp(1,-1,disk(0,0,1))",
      "union(rect(0,0,1,1),rect(1,0,1,1))",
      "union(disk(0,0,1),disk(2,0,1),point)",
      "refl(union(tri(0.866,6),rot(1.0471976,tri(0.866,6)),rot(-1.0471976,tri(0.866,6))))",
      "disp(0.5,0.5,rot(-0.3,refl(union(seg(1,0),line(0.2,3)))))",
  };
  return corpus;
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// "label = value (< tol)" and the comparison result.
struct Check {
  bool ok = true;
  std::string text;

  void below(const std::string& label, double value, double tol) {
    const bool pass = value < tol;
    ok = ok && pass;
    add(label + " = " + sci(value) + (pass ? " < " : " >= ") + sci(tol));
  }
  void require(const std::string& label, bool pass) {
    ok = ok && pass;
    add(label + (pass ? " ok" : " FAILED"));
  }
  /// Reported, not gated.
  void info(const std::string& label, double value) { add(label + " = " + sci(value) + " (info)"); }
  void add(const std::string& s) { text += (text.empty() ? "" : "; ") + s; }
};

inline QuadratureSpec fixed(int order, int threads) {
  QuadratureSpec s;
  s.order = order;
  s.adaptive = false;
  s.threads = threads;
  return s;
}

inline Matrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

class Suite {
 public:
  explicit Suite(const Options& opt) : opt_(opt) {}

  int dim(int pinned) const { return opt_.dim_cap > 0 ? std::min(pinned, opt_.dim_cap) : pinned; }

  Check whole_plane() const {
    Check c;
    const auto cfg = truncation(dim(24));
    const FockOperator k = build_region_operator(rectangle(-6, -6, 12, 12), cfg, fixed(128, opt_.threads));
    c.below("max|K-1| on " + std::to_string(cfg.effective_dim) + "x" + std::to_string(cfg.effective_dim) + " block",
            block_max_diff(k.matrix(), Matrix::Identity(cfg.dim, cfg.dim), cfg.effective_dim), 1e-3);
    return c;
  }

  Check segment_closed_form() const {
    Check c;
    const auto cfg = truncation(dim(32));
    for (double th : {0.0, kPi / 5, kPi / 2}) {
      const Matrix a = segment_operator_closed_form(1.5, th, cfg).matrix();
      const Matrix q = build_region_operator(segment(1.5, th), cfg, fixed(64, opt_.threads)).matrix();
      c.below("rel frob theta=" + sci(th), (a - q).norm() / a.norm(), 1e-8);
    }
    return c;
  }

  Check segment_eigen_relation() const {
    Check c;
    const auto cfg = truncation(dim(64));
    const int e = cfg.effective_dim;
    const double len = 1.5;
    double worst = 0.0;
    for (double th : {0.0, kPi / 5, kPi / 2}) {
      const Matrix k = segment_operator_closed_form(len, th, cfg).matrix();
      for (double q : {0.3, 1.0, 2.0}) {
        const Vector plus = position_eigenket(q, th, cfg), minus = position_eigenket(-q, th, cfg);
        const double lam = std::sin(q * len) / q;
        for (int sign : {1, -1}) {
          const Vector psi = plus + double(sign) * minus;
          const Vector r = k * psi - sign * lam * psi;
          worst = std::max(worst, r.head(e).norm() / psi.head(e).norm());
        }
      }
    }
    c.below("max residual (effective block)", worst, 1e-3);
    return c;
  }

  Check line_projector_props() const {
    Check c;
    const auto cfg = truncation(dim(64));
    double idem = 0.0, shape = 0.0;
    for (double th : {0.0, 0.7}) {
      const LineProjector lp = line_projector(th, 0.0, cfg);
      const Matrix& k = lp.projector.matrix();
      idem = std::max(idem, max_abs(k * k - k));
      // Symbol of the unit-normalized |q><q| along the axis at angle theta.
      for (int i = 0; i <= 3; ++i)
        for (int j = 0; j < 8; ++j) {
          const Complex z = std::polar(0.5 * i, kPi * j / 4 + 0.2);
          const double x = std::sqrt(2.0) * (z.real() * std::cos(th) + z.imag() * std::sin(th));
          const double expect = std::exp(-x * x) / std::sqrt(kPi);
          shape = std::max(shape, std::abs(lp.raw_scale * coherent_symbol(lp.projector, z).real() - expect));
        }
    }
    c.below("max|K^2-K|", idem, 1e-9);
    c.below("coherent symbol vs Gaussian, |z|<=1.5", shape, 1e-4);
    return c;
  }

  Check rectangle_symbol() const {
    Check c;
    const auto cfg = truncation(dim(48));
    const Rectangle rect{0, 0, 1, 1};
    const FockOperator k = build_region_operator(Region(rect), cfg, fixed(64, opt_.threads));
    double worst = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const Complex z = std::polar(0.5 * i, 2 * kPi * j / 5 + 0.1);
        worst = std::max(worst, std::abs(coherent_symbol(k, z).real() - rectangle_coherent_symbol(z, rect)));
      }
    c.below("max symbol error over 25 samples", worst, 1e-4);
    return c;
  }

  Check isospectrality() const {
    Check c;
    const auto cfg = truncation(dim(48));
    const int top = cfg.dim / 2;
    const QuadratureSpec spec = fixed(64, opt_.threads);
    const FockOperator k = build_region_operator(rectangle(0, 0, 1, 1), cfg, spec);
    const RealVector base = hermitian_spectrum(k).eigenvalues.head(top);
    // The shifted operator is D K D^+; it must equal the shifted-rectangle
    // quadrature on the effective block. Spectra of separately truncated
    // quadratures differ in the unconverged tail and are only reported.
    double conj = 0.0, block = 0.0, direct = 0.0;
    for (auto [s, t] : {std::pair{1.0, 0.0}, {0.0, -1.0}, {-1.0, 1.0}, {0.5, 0.3}}) {
      const FockOperator shifted = displaced_conjugate(k, s, t, cfg);
      const FockOperator quad = build_region_operator(rectangle(s, t, 1, 1), cfg, spec);
      conj = std::max(conj, (hermitian_spectrum(shifted).eigenvalues.head(top) - base).cwiseAbs().maxCoeff());
      block = std::max(block, block_max_diff(shifted.matrix(), quad.matrix(), cfg.effective_dim));
      direct = std::max(direct, (hermitian_spectrum(quad).eigenvalues.head(top) - base).cwiseAbs().maxCoeff());
    }
    c.below("top d/2 eigenvalues of D K D^+ vs K", conj, 1e-6);
    c.below("max|D K D^+ - K_shifted| on effective block", block, 1e-6);
    c.info("top d/2 eigenvalues of separately truncated K_shifted", direct);
    return c;
  }

  Check disk_spectrum() const {
    Check c;
    const auto cfg = truncation(dim(48));
    const RealVector l = disk_spectrum_radial(1.0, cfg);
    c.below("|lambda0 - (1-e^-1)|", std::abs(l[0] - (1 - std::exp(-1.0))), 1e-8);
    c.below("|lambda1 - (1-3e^-1)|", std::abs(l[1] - (1 - 3 * std::exp(-1.0))), 1e-8);
    Matrix off = build_region_operator(disk({0, 0}, 2.0), cfg, fixed(64, opt_.threads)).matrix();
    off.diagonal().setZero();
    c.below("max off-diagonal", max_abs(off), 1e-10);
    return c;
  }

  Check hexagon() const {
    Check c;
    const auto cfg = truncation(dim(48));
    const double a = std::sqrt(3.0) / 2;
    const QuadratureSpec spec = fixed(64, opt_.threads);
    const FockOperator tri = build_region_operator(polygon_triangle(a, 6), cfg, spec);
    const FockOperator hex = build_region_operator(canonical_polygon(a, 6), cfg, spec);
    c.below("frob(eps2 eps1 K_tri - K_hex) on effective block",
            block_frobenius_diff(hexagon_from_triangle(tri, cfg).matrix(), hex.matrix(), cfg.effective_dim), 1e-4);
    return c;
  }

  std::vector<KrausMap> all_maps(const TruncationConfig& cfg) const {
    std::vector<KrausMap> maps;
    maps.push_back(make_map(MapKind::identity, {}, cfg));
    maps.push_back(make_map(MapKind::rotation, {0.7}, cfg));
    maps.push_back(make_map(MapKind::reflection, {}, cfg));
    maps.push_back(make_map(MapKind::displacement, {0, -0.2, 0.9}, cfg));
    maps.push_back(make_map(MapKind::polygon, {0, 0, 0, 6}, cfg));
    maps.push_back(make_map(MapKind::west, {0, 0.5}, cfg));
    maps.push_back(make_map(MapKind::north, {0, 0, 0.5}, cfg));
    maps.push_back(make_map(MapKind::tile_step, {0, 0.5, 0.5}, cfg));
    MapParams set;
    set.angles = {0.0, kPi / 3, -kPi / 3};
    maps.push_back(make_map(MapKind::rotation_set, set, cfg));
    maps.push_back(compose(make_map(MapKind::reflection, {}, cfg), maps.back(), cfg, MapKind::composed));
    return maps;
  }

  Check duality() const {
    Check c;
    const auto cfg = truncation(dim(16));
    double worst = 0.0;
    for (const KrausMap& m : all_maps(cfg)) {
      std::mt19937_64 rng(opt_.seed);
      for (int trial = 0; trial < 20; ++trial) {
        const FockOperator rho(random_state(cfg.dim, rng), true);
        const FockOperator x(random_hermitian(cfg.dim, rng), true);
        const Complex lhs = (rho.matrix() * apply_kraus_map(m, x).matrix()).trace();
        const Complex rhs = (dual_apply(m, rho).matrix() * x.matrix()).trace();
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    c.below("max |Tr(rho eps(X)) - Tr(eps*(rho) X)| over 10 kinds x 20 pairs", worst, 1e-10);
    return c;
  }

  Check dilation() const {
    Check c;
    const auto cfg = truncation(dim(24));
    const int d = cfg.dim;
    std::mt19937_64 rng(opt_.seed + 1);
    const FockOperator x(random_hermitian(d, rng), true);
    const FockOperator rho(random_state(d, rng), true);
    double kraus = 0.0, unit2 = 0.0;
    for (const KrausMap& m : {make_map(MapKind::reflection, {}, cfg), make_map(MapKind::rotation, {0.7}, cfg),
                              make_map(MapKind::west, {0, 0.5}, cfg), make_map(MapKind::north, {0, 0, 0.5}, cfg),
                              make_map(MapKind::displacement, {0, -0.2, 0.9}, cfg)}) {
      const Matrix v = dilation_unitary(m), w = dual_dilation_unitary(m);
      kraus = std::max(kraus, max_abs(dilated_apply(v, x, 2).matrix() - apply_kraus_map(m, x).matrix()));
      kraus = std::max(kraus, max_abs(dilated_apply(w, rho, 2).matrix() - dual_apply(m, rho).matrix()));
      unit2 = std::max(unit2, max_abs(v * v.adjoint() - 2.0 * Matrix::Identity(2 * d, 2 * d)));
      unit2 = std::max(unit2, max_abs(w * w.adjoint() - 2.0 * Matrix::Identity(2 * d, 2 * d)));
    }
    const Matrix v6 = polygon_dilation(6, cfg);
    const KrausMap poly = make_map(MapKind::polygon, {0, 0, 0, 6}, cfg);
    const Matrix ref = apply_kraus_map(poly, x).matrix();
    for (int input = 0; input < 6; ++input)
      kraus = std::max(kraus, max_abs(dilated_apply(v6, x, 6, input).matrix() - ref));
    c.below("dilated vs Kraus sum", kraus, 1e-12);
    c.below("max|VV^+ - 2*1|", unit2, 1e-12);
    c.below("max|VV^+ - 6*1| (M=6)", max_abs(v6 * v6.adjoint() - 6.0 * Matrix::Identity(6 * d, 6 * d)), 1e-12);
    return c;
  }

  struct StepData {
    KrausMap map;
    Spectrum before, after;
    StepMatrix step;
  };

  StepData step_data(const FockOperator& x, const KrausMap& m, const TruncationConfig& cfg) const {
    const Spectrum v = hermitian_spectrum(x), w = hermitian_spectrum(apply_kraus_map(m, x));
    return {m, v, w, step_matrix(m, v, w, cfg.effective_dim)};
  }

  FockOperator small_square(const TruncationConfig& cfg) const {
    return build_region_operator(rectangle(0, 0, 0.5, 0.5), cfg, fixed(64, opt_.threads));
  }

  Check step_sums() const {
    Check c;
    const auto cfg = truncation(dim(64));
    const FockOperator sq = small_square(cfg);
    const StepData sigma = step_data(sq, make_map(MapKind::west, {0, 0.5}, cfg), cfg);
    const StepData gamma = step_data(sq, make_map(MapKind::tile_step, {0, 0.5, 0.5}, cfg), cfg);
    const StepData e = step_data(disk_operator(0.5, cfg), make_map(MapKind::tile_step, {0, 1.0, 1.0}, cfg), cfg);
    for (const auto& [name, s, want] : {std::tuple{"Sigma", &sigma.step, 2.0}, {"Gamma", &gamma.step, 4.0}, {"E", &e.step, 4.0}}) {
      c.require(std::string(name) + " sum = " + sci(want), s->expected_sum == want);
      c.below(std::string(name) + " row/col deviation", std::max(s->max_row_deviation, s->max_col_deviation), 1e-3);
      c.require(std::string(name) + " non-negative", s->min_entry >= -1e-12);
    }
    return c;
  }

  Check eigen_update() const {
    Check c;
    const auto cfg = truncation(dim(64));
    const StepData gamma = step_data(small_square(cfg), make_map(MapKind::tile_step, {0, 0.5, 0.5}, cfg), cfg);
    const StepData e = step_data(disk_operator(0.5, cfg), make_map(MapKind::tile_step, {0, 1.0, 1.0}, cfg), cfg);
    c.below("|lambda' - Gamma lambda|", eigenvalue_update_residual(gamma.step, gamma.before, gamma.after), 1e-6);
    c.below("|lambda' - E lambda|", eigenvalue_update_residual(e.step, e.before, e.after), 1e-6);
    return c;
  }

  Check diagonal() const {
    Check c;
    const auto cfg = truncation(dim(48));
    double worst = 0.0;
    for (double md : {0.5, 1.0, 2.0}) {
      const double radius = 0.5 * md;
      const KrausMap m = make_map(MapKind::tile_step, {0, md, md}, cfg);
      const RealVector lam = disk_spectrum_radial(radius, cfg);
      const RealVector direct = apply_kraus_map(m, disk_operator(radius, cfg)).matrix().diagonal().real();
      worst = std::max(worst, (diagonal_transfer(m, lam) - direct).cwiseAbs().maxCoeff());
    }
    const FockOperator sq = small_square(cfg);
    const KrausMap t = make_map(MapKind::tile_step, {0, 0.5, 0.5}, cfg);
    const RealVector direct = apply_kraus_map(t, sq).matrix().diagonal().real();
    worst = std::max(worst, (number_state_qpm(t, hermitian_spectrum(sq)) - direct).cwiseAbs().maxCoeff());
    c.below("max|transfer - direct diagonal|", worst, 1e-10);
    return c;
  }

  Check majorization() const {
    Check c;
    const auto cfg = truncation(dim(64));
    const double tol = 1e-3;
    const Region sq = rectangle(0, 0, 0.5, 0.5);
    const TilingTrace rect = tile_run(small_square(cfg), sq, 2, TileMode::rectangle, cfg);
    const TilingTrace disk_t = tile_run(disk_operator(0.5, cfg), disk({0, 0}, 1.0), 1, TileMode::disk, cfg);
    for (const TilingTrace* t : {&rect, &disk_t}) {
      const std::string tag = to_string(t->mode);
      for (std::size_t i = 1; i < t->steps.size(); ++i) {
        const RealVector lam = t->steps[i].step->expected_sum * t->steps[i - 1].spectrum.eigenvalues;
        const RealVector& lp = t->steps[i].spectrum.eigenvalues;
        const std::string at = tag + " step " + std::to_string(i);
        c.require(at + " 4lambda majorizes lambda'", majorizes(lam, lp, tol));
        c.require(at + " ascending form", majorizes_ascending(lp, lam, tol));
      }
      c.require(tag + " squeezing", squeezing_check(*t, tol));
    }
    return c;
  }

  Check trace_convention() const {
    Check c;
    const int d = dim(64);
    const QuadratureSpec spec = fixed(64, opt_.threads);
    const double t0 = build_region_operator(rectangle(0, 0, 1, 1), truncation(d), spec).trace().real();
    const double t1 = build_region_operator(rectangle(0, 0, 1, 1), truncation(d + 1), spec).trace().real();
    const double target = 1.0 / (2 * kPi);
    c.below("|parity-averaged trace - 1/(2pi)| / (1/(2pi))", std::abs(0.5 * (t0 + t1) - target) / target, 0.05);
    const auto cfg = truncation(d);
    double worst = 0.0;
    for (int sides : {3, 4, 6}) {
      const FockOperator tri = build_region_operator(polygon_triangle(std::sqrt(3.0) / 2, sides), cfg, spec);
      const double ratio = apply_kraus_map(make_map(MapKind::polygon, {0, 0, 0, sides}, cfg), tri).trace().real() /
                           tri.trace().real();
      worst = std::max(worst, std::abs(ratio - sides) / sides);
    }
    c.below("polygon trace ratio, relative error", worst, 1e-6);
    return c;
  }

  Check tooling() const {
    Check c;
    int roundtrip_ok = 0;
    for (const std::string& text : roundtrip_corpus()) {
      const dsl::Node a = dsl::parse_region_expression(text);
      if (dsl::parse_region_expression(dsl::print(a)) == a) ++roundtrip_ok;
    }
    c.require("DSL round-trip " + std::to_string(roundtrip_ok) + "/" + std::to_string(roundtrip_corpus().size()),
              roundtrip_ok == static_cast<int>(roundtrip_corpus().size()));

    namespace fs = std::filesystem;
    fs::path dir = opt_.scratch_dir;
    if (dir.empty()) {
      std::random_device rd;
      dir = fs::temp_directory_path() / ("qregion-verify-" + hex64((std::uint64_t(rd()) << 32) | rd()));
    }
    const auto cfg = truncation(dim(16));
    const FockOperator k = build_region_operator(canonical_polygon(0.8, 6), cfg, fixed(32, 1));
    bool exact = false;
    try {
      save_operator(k, dir / "k.hdr");
      const Matrix back = load_operator(dir / "k.hdr", cfg.dim).op.matrix();
      exact = std::memcmp(back.data(), k.matrix().data(), sizeof(Complex) * static_cast<std::size_t>(k.matrix().size())) == 0;
    } catch (const Error& e) {
      c.add(std::string("save/load error: ") + e.what());
    }
    if (opt_.scratch_dir.empty()) fs::remove_all(dir);
    c.require("save/load bit-exact", exact);

    bool same = true;
    for (const Region& r : {canonical_polygon(0.8, 6), rectangle(0, 0, 1, 1), disk({0.2, 0.1}, 1.5)}) {
      const std::string one = matrix_text(build_region_operator(r, cfg, fixed(40, 1)).matrix());
      const std::string many = matrix_text(build_region_operator(r, cfg, fixed(40, std::max(4, opt_.threads))).matrix());
      same = same && one == many;
    }
    c.require("byte-identical output for 1 vs " + std::to_string(std::max(4, opt_.threads)) + " threads", same);
    return c;
  }

 private:
  Options opt_;
};

}  // namespace detail

struct Criterion {
  int id;
  const char* name;
  detail::Check (detail::Suite::*run)() const;
};

inline const std::vector<Criterion>& criteria() {
  using S = detail::Suite;
  static const std::vector<Criterion> list = {
      {1, "whole_plane_identity", &S::whole_plane},
      {2, "segment_closed_form", &S::segment_closed_form},
      {3, "segment_eigen_relation", &S::segment_eigen_relation},
      {4, "line_projector", &S::line_projector_props},
      {5, "rectangle_symbol", &S::rectangle_symbol},
      {6, "isospectrality", &S::isospectrality},
      {7, "disk_spectrum", &S::disk_spectrum},
      {8, "hexagon_equivalence", &S::hexagon},
      {9, "duality", &S::duality},
      {10, "dilation_equivalence", &S::dilation},
      {11, "step_matrix_sums", &S::step_sums},
      {12, "eigenvalue_update", &S::eigen_update},
      {13, "diagonal_transfer", &S::diagonal},
      {14, "majorization_squeezing", &S::majorization},
      {15, "trace_area_convention", &S::trace_convention},
      {16, "tooling", &S::tooling},
  };
  return list;
}

/// Runs one criterion; exceptions count as failures.
inline Result run_criterion(const Criterion& cr, const Options& opt) {
  Result r;
  r.id = cr.id;
  r.name = cr.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const detail::Check c = (detail::Suite(opt).*cr.run)();
    r.pass = c.ok;
    r.detail = c.text;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs every criterion in order. `on_result` (optional) sees each result as
/// soon as it is available.
inline std::vector<Result> run_all(const Options& opt, const std::function<void(const Result&)>& on_result = {}) {
  std::vector<Result> out;
  for (const Criterion& cr : criteria()) {
    out.push_back(run_criterion(cr, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

inline std::string format_line(const Result& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-24s (%.1fs) ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace qregion::verify

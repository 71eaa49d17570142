// qregion: batch front end for region operators.
//
//   qregion build    --expr E      operator matrix files (cached)
//   qregion spectrum --expr E      eigenvalue file
//   qregion bounds   --expr E      (lambda_min, lambda_max)
//   qregion tile     --expr E      tiling trace, plot series, outlines
//   qregion verify                 invariant suite, one line per property
//   qregion eval     --expr E      parse, print and build
//
// Exit codes: 0 ok, 1 usage/config, 2 numerical precondition, 3 verification.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "qregion/qregion.hpp"

namespace fs = std::filesystem;
using namespace qregion;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim = 32;
  int effective_dim = 0;  // 0: dim / 2
  int quad_order = 64;
  double tol = 1e-9;
  std::string out = "qregion-out";
  std::string expr;
  int steps = 2;
  unsigned long long seed = 1;
  int threads = 1;
  bool dim_given = false;  // verify caps its pinned dimensions only when set
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_value(const std::string& text, const std::string& where) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw UsageError(where + ": cannot parse '" + text + "'");
  return v;
}

/// key=value lines; '#' starts a comment. Keys mirror the long flags with
/// '_' for '-'.
void load_config(const fs::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string where = path.string() + ":" + std::to_string(n);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "dim") {
      cfg.dim = parse_value<int>(value, where);
      cfg.dim_given = true;
    }
    else if (key == "effective_dim") cfg.effective_dim = parse_value<int>(value, where);
    else if (key == "quad_order") cfg.quad_order = parse_value<int>(value, where);
    else if (key == "tol") cfg.tol = parse_value<double>(value, where);
    else if (key == "out") cfg.out = value;
    else if (key == "expr") cfg.expr = value;
    else if (key == "steps") cfg.steps = parse_value<int>(value, where);
    else if (key == "seed") cfg.seed = parse_value<unsigned long long>(value, where);
    else if (key == "threads") cfg.threads = parse_value<int>(value, where);
    else throw UsageError(where + ": unknown key '" + key + "'");
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Runner {
 public:
  explicit Runner(RunConfig rc) : rc_(std::move(rc)) {
    if (rc_.quad_order < 1) throw UsageError("--quad-order must be positive");
    if (rc_.threads < 1) throw UsageError("--threads must be positive");
    if (rc_.steps < 0) throw UsageError("--steps must be non-negative");
    cfg_ = truncation(rc_.dim, rc_.effective_dim, rc_.tol);
    spec_.order = rc_.quad_order;
    spec_.adaptive = false;
    spec_.threads = rc_.threads;
  }

  int build() {
    const Region r = region();
    const auto res = cache().get_or_build(r, cfg_, spec_);
    const fs::path hdr = out() / "operator.hdr";
    const std::uint64_t h = save_operator(res.op, hdr, meta(r));
    std::printf("operator %s\n", hdr.string().c_str());
    std::printf("dim %d  trace %s  hash fnv1a64:%s  cache %s\n", res.op.dim(), short_num(res.op.trace().real()).c_str(),
                hex64(h).c_str(), res.hit ? "hit" : "miss");
    return 0;
  }

  int spectrum() {
    const Region r = region();
    const Spectrum s = hermitian_spectrum(cache().get_or_build(r, cfg_, spec_).op, 1e-8);
    std::string body = "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) body += std::to_string(i) + "," + num(s.eigenvalues[i]) + "\n";
    const fs::path p = out() / "spectrum.csv";
    atomic_write(p, body);
    std::printf("spectrum %s (%d eigenvalues, max %s, min %s)\n", p.string().c_str(), cfg_.dim,
                short_num(s.eigenvalues[0]).c_str(), short_num(s.eigenvalues[cfg_.dim - 1]).c_str());
    return 0;
  }

  int bounds() {
    const Region r = region();
    const auto [lo, hi] = qpm_bounds(cache().get_or_build(r, cfg_, spec_).op, 1e-8);
    atomic_write(out() / "bounds.txt", "lambda_min=" + num(lo) + "\nlambda_max=" + num(hi) + "\n");
    std::printf("lambda_min %s\nlambda_max %s\n", short_num(lo).c_str(), short_num(hi).c_str());
    return 0;
  }

  int tile() {
    const Region r = region();
    TileMode mode;
    if (r.get_if<Rectangle>()) mode = TileMode::rectangle;
    else if (r.get_if<Disk>()) mode = TileMode::disk;
    else throw InvalidArgument("tile needs rect(...) or an origin-centred disk(0,0,d)");
    const FockOperator x0 = cache().get_or_build(r, cfg_, spec_).op;
    const TilingTrace t = tile_run(x0, r, rc_.steps, mode, cfg_);

    std::string trace =
        "step,region,area,trace,area_over_2pi,lambda_min,lambda_max,shift_q,shift_p,step_sum,row_deviation,"
        "col_deviation,update_residual\n";
    std::string spectra = "step,index,eigenvalue\n";
    std::string plot = "step,lambda_min,lambda_max,envelope_min,envelope_max\n";
    const double lo0 = t.steps[0].lambda_min, hi0 = t.steps[0].lambda_max;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const TilingStep& s = t.steps[k];
      const std::string step = std::to_string(k);
      trace += step + ",\"" + describe(s.region) + "\"," + num(s.area) + "," + num(s.op.trace().real()) + "," +
               num(s.area / (2 * kPi)) + "," + num(s.lambda_min) + "," + num(s.lambda_max) + "," + num(s.shift_q) +
               "," + num(s.shift_p) + "," + (s.step ? num(s.step->expected_sum) : "") + "," +
               (s.step ? num(s.step->max_row_deviation) : "") + "," + (s.step ? num(s.step->max_col_deviation) : "") +
               "," + (s.step ? num(s.update_residual) : "") + "\n";
      for (Eigen::Index i = 0; i < s.spectrum.eigenvalues.size(); ++i)
        spectra += step + "," + std::to_string(i) + "," + num(s.spectrum.eigenvalues[i]) + "\n";
      const double env = std::ldexp(1.0, 2 * static_cast<int>(k));
      plot += step + "," + num(s.lambda_min) + "," + num(s.lambda_max) + "," + num(env * lo0) + "," + num(env * hi0) + "\n";
      std::string outline = "polyline,q,p\n";
      const auto lines = region_outline(s.region);
      for (std::size_t l = 0; l < lines.size(); ++l)
        for (const Point& x : lines[l]) outline += std::to_string(l) + "," + num(x.q) + "," + num(x.p) + "\n";
      atomic_write(out() / ("outline_step" + step + ".csv"), outline);
    }
    atomic_write(out() / "trace.csv", trace);
    atomic_write(out() / "spectra.csv", spectra);
    atomic_write(out() / "plot.csv", plot);

    const bool squeezed = squeezing_check(t, 1e-3);
    std::printf("tile %s: %zu records in %s\n", to_string(mode), t.steps.size(), out().string().c_str());
    for (std::size_t k = 0; k < t.steps.size(); ++k)
      std::printf("  step %zu  area %s  lambda [%s, %s]\n", k, short_num(t.steps[k].area).c_str(),
                  short_num(t.steps[k].lambda_min).c_str(), short_num(t.steps[k].lambda_max).c_str());
    if (t.steps.size() > 1) std::printf("squeezing %s\n", squeezed ? "holds" : "VIOLATED");
    return 0;
  }

  int eval() {
    const dsl::Node ast = dsl::parse_region_expression(rc_.expr);
    const Region r = dsl::evaluate(ast, eval_options());
    const FockOperator k = build_region_operator(r, cfg_, spec_);
    std::printf("expr    %s\n", dsl::print(ast).c_str());
    std::printf("region  %s\n", describe(r).c_str());
    try {
      std::printf("area    %s\n", short_num(region_area(r)).c_str());
    } catch (const InvalidArgument&) {
      std::printf("area    undefined\n");
    }
    std::printf("dim     %d\ntrace   %s\n", k.dim(), short_num(k.trace().real()).c_str());
    if (hermiticity_defect(k.matrix()) <= 1e-8) {
      const auto [lo, hi] = qpm_bounds(k, 1e-8);
      std::printf("lambda  [%s, %s]\n", short_num(lo).c_str(), short_num(hi).c_str());
    }
    return 0;
  }

  int verify(bool capped) {
    verify::Options opt;
    opt.dim_cap = capped ? rc_.dim : 0;
    opt.threads = rc_.threads;
    opt.seed = rc_.seed;
    int failed = 0;
    verify::run_all(opt, [&](const verify::Result& r) {
      std::printf("%s\n", verify::format_line(r).c_str());
      std::fflush(stdout);
      if (!r.pass) ++failed;
    });
    const int total = static_cast<int>(verify::criteria().size());
    std::printf("%d/%d properties passed\n", total - failed, total);
    return failed == 0 ? 0 : 3;
  }

 private:
  dsl::EvalOptions eval_options() const {
    dsl::EvalOptions o;
    o.seed = rc_.seed;
    return o;
  }

  Region region() const {
    if (rc_.expr.empty()) throw UsageError("no region expression: pass --expr or set expr= in the config");
    return dsl::parse_region(rc_.expr, eval_options());
  }

  fs::path out() const { return rc_.out; }

  OperatorCache cache() const { return OperatorCache(out() / "cache"); }

  OperatorMeta meta(const Region& r) const {
    OperatorMeta m;
    m.normalization = to_string(Normalization::wigner);
    m.params["region"] = describe(r);
    m.params["effective_dim"] = std::to_string(cfg_.effective_dim);
    m.params["quad_order"] = std::to_string(spec_.order);
    m.params["tol"] = num(cfg_.tol);
    return m;
  }

  RunConfig rc_;
  TruncationConfig cfg_;
  QuadratureSpec spec_;
};

void report_parse_error(const std::string& text, const dsl::ParseError& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  // Echo the offending line with a caret under the column.
  std::istringstream in(text);
  std::string line;
  for (int i = 0; i < e.line() && std::getline(in, line); ++i) {
  }
  std::fprintf(stderr, "  %s\n  %s^\n", line.c_str(), std::string(std::max(0, e.column() - 1), ' ').c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region operators in the truncated Fock basis"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string config_path;
  auto* o_config = app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  auto* o_dim = app.add_option("--dim", flags.dim, "Fock truncation dimension");
  auto* o_eff = app.add_option("--effective-dim", flags.effective_dim, "effective block size (default dim/2)");
  auto* o_quad = app.add_option("--quad-order", flags.quad_order, "Gauss order per quadrature cell");
  auto* o_tol = app.add_option("--tol", flags.tol, "hermiticity tolerance");
  auto* o_out = app.add_option("--out", flags.out, "output directory");
  auto* o_expr = app.add_option("--expr", flags.expr, "region expression");
  auto* o_steps = app.add_option("--steps", flags.steps, "tiling steps");
  auto* o_seed = app.add_option("--seed", flags.seed, "random seed");
  auto* o_threads = app.add_option("--threads", flags.threads, "worker threads for quadrature");

  const char* names[][2] = {{"build", "build the region operator and write matrix files"},
                            {"spectrum", "write the eigenvalues of the region operator"},
                            {"bounds", "print (lambda_min, lambda_max)"},
                            {"tile", "run the west-north tiling and write trace and plot data"},
                            {"verify", "run the invariant suite (--dim caps the pinned dimensions)"},
                            {"eval", "parse an expression and build its operator"}};
  for (const auto& [name, help] : names) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  RunConfig rc;
  try {
    if (o_config->count()) load_config(config_path, rc);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  if (o_dim->count()) {
    rc.dim = flags.dim;
    rc.dim_given = true;
  }
  if (o_eff->count()) rc.effective_dim = flags.effective_dim;
  if (o_quad->count()) rc.quad_order = flags.quad_order;
  if (o_tol->count()) rc.tol = flags.tol;
  if (o_out->count()) rc.out = flags.out;
  if (o_expr->count()) rc.expr = flags.expr;
  if (o_steps->count()) rc.steps = flags.steps;
  if (o_seed->count()) rc.seed = flags.seed;
  if (o_threads->count()) rc.threads = flags.threads;

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Runner run(rc);
    if (cmd == "build") return run.build();
    if (cmd == "spectrum") return run.spectrum();
    if (cmd == "bounds") return run.bounds();
    if (cmd == "tile") return run.tile();
    if (cmd == "eval") return run.eval();
    if (cmd == "verify") return run.verify(rc.dim_given);
  } catch (const dsl::ParseError& e) {
    report_parse_error(rc.expr, e);
    return 1;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const InvalidTruncation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 1;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 1;
}

#pragma once

// Text serialization of operators, atomic file output and an on-disk
// operator cache.
//
// An operator is stored as two files: a header of key=value lines and a
// matrix file with dim^2 lines "row,col,re,im" in row-major order, 17
// significant digits. The header carries an FNV-1a 64 hash of the matrix
// file bytes.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "qregion/errors.hpp"
#include "qregion/fock.hpp"
#include "qregion/geometry.hpp"
#include "qregion/region_ops.hpp"

namespace qregion {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Stored content does not match its recorded hash.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::string_view kOperatorFormat = "qregion-operator/1";

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temporary file, then renames over the target.
inline void atomic_write(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

struct OperatorMeta {
  std::string normalization = "wigner";
  /// Creation parameters (region, quadrature order, ...). Keys must not
  /// contain '=' or newlines.
  std::map<std::string, std::string> params;
};

struct StoredOperator {
  FockOperator op;
  OperatorMeta meta;
  std::uint64_t hash = 0;
};

inline std::string matrix_text(const Matrix& m) {
  std::string s;
  s.reserve(static_cast<std::size_t>(m.size()) * 56);
  char buf[128];
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(r), static_cast<long>(c),
                    m(r, c).real(), m(r, c).imag());
      s += buf;
    }
  return s;
}

inline std::filesystem::path matrix_path_for(const std::filesystem::path& header) {
  std::filesystem::path m = header;
  m += ".matrix.csv";
  return m;
}

/// Saves K as `path` (header) plus `path`.matrix.csv. Returns the content hash.
inline std::uint64_t save_operator(const FockOperator& k, const std::filesystem::path& path,
                                   const OperatorMeta& meta = {}) {
  const std::string body = matrix_text(k.matrix());
  const std::uint64_t hash = fnv1a64(body);
  const std::filesystem::path mpath = matrix_path_for(path);
  std::string header;
  header += "format=" + std::string(kOperatorFormat) + "\n";
  header += "dim=" + std::to_string(k.dim()) + "\n";
  header += std::string("hermitian_hint=") + (k.hermitian_hint() ? "1" : "0") + "\n";
  header += "normalization=" + meta.normalization + "\n";
  for (const auto& [key, value] : meta.params) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos)
      throw InvalidArgument("operator parameter '" + key + "' is not representable in a header");
    header += "param." + key + "=" + value + "\n";
  }
  header += "hash=fnv1a64:" + hex64(hash) + "\n";
  header += "matrix=" + mpath.filename().string() + "\n";
  atomic_write(mpath, body);
  atomic_write(path, header);
  return hash;
}

namespace detail {

inline std::map<std::string, std::string> parse_header(const std::string& text, const std::string& where) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CorruptionError(where + ":" + std::to_string(n) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

inline const std::string& header_value(const std::map<std::string, std::string>& kv, const std::string& key,
                                       const std::string& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw CorruptionError(where + ": missing header key '" + key + "'");
  return it->second;
}

}  // namespace detail

/// Loads an operator saved by save_operator. Throws CorruptionError when the
/// matrix file does not match the header hash or is malformed, and
/// DimensionMismatch when the entry count disagrees with the header dim or
/// with expected_dim (if positive).
inline StoredOperator load_operator(const std::filesystem::path& path, int expected_dim = 0) {
  const std::string where = path.string();
  const auto kv = detail::parse_header(read_file(path), where);
  if (detail::header_value(kv, "format", where) != kOperatorFormat)
    throw CorruptionError(where + ": unknown format '" + kv.at("format") + "'");
  int dim = 0;
  try {
    dim = std::stoi(detail::header_value(kv, "dim", where));
  } catch (const std::logic_error&) {
    throw CorruptionError(where + ": bad dim");
  }
  if (dim < 1) throw CorruptionError(where + ": bad dim");
  if (expected_dim > 0 && dim != expected_dim)
    throw DimensionMismatch(where + ": stored dim " + std::to_string(dim) + " but expected " +
                            std::to_string(expected_dim));

  const std::string& hash_field = detail::header_value(kv, "hash", where);
  const std::string prefix = "fnv1a64:";
  if (hash_field.rfind(prefix, 0) != 0) throw CorruptionError(where + ": unsupported hash '" + hash_field + "'");
  const std::filesystem::path mpath = path.parent_path() / detail::header_value(kv, "matrix", where);
  const std::string body = read_file(mpath);
  const std::uint64_t hash = fnv1a64(body);
  if (hex64(hash) != hash_field.substr(prefix.size()))
    throw CorruptionError(where + ": content hash mismatch (header " + hash_field + ", matrix fnv1a64:" + hex64(hash) +
                          ")");

  long lines = 0;
  for (std::size_t i = 0; i < body.size(); ++i)
    if (body[i] == '\n' && i > 0 && body[i - 1] != '\n') ++lines;
  if (!body.empty() && body.back() != '\n') ++lines;
  if (lines != static_cast<long>(dim) * dim)
    throw DimensionMismatch(mpath.string() + ": " + std::to_string(lines) + " entries for dim " + std::to_string(dim));

  Matrix m(dim, dim);
  std::istringstream in(body);
  std::string line;
  long count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long r = -1, c = -1;
    double re = 0, im = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf%c", &r, &c, &re, &im, &tail) != 4)
      throw CorruptionError(mpath.string() + ": malformed line " + std::to_string(count + 1));
    if (r != count / dim || c != count % dim)
      throw CorruptionError(mpath.string() + ": entries out of row-major order at line " + std::to_string(count + 1));
    m(r, c) = Complex(re, im);
    ++count;
  }

  StoredOperator out;
  // The hash already vouches for the content; skip the hermiticity tolerance.
  out.op = FockOperator(std::move(m), detail::header_value(kv, "hermitian_hint", where) == "1",
                        std::numeric_limits<double>::infinity());
  out.meta.normalization = detail::header_value(kv, "normalization", where);
  for (const auto& [key, value] : kv)
    if (key.rfind("param.", 0) == 0) out.meta.params[key.substr(6)] = value;
  out.hash = hash;
  return out;
}

/// Region operators on disk, keyed by the canonical region descriptor and
/// the truncation and quadrature settings (thread count excluded, results do
/// not depend on it).
class OperatorCache {
 public:
  explicit OperatorCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  struct Result {
    FockOperator op;
    bool hit = false;
    std::uint64_t content_hash = 0;
    std::filesystem::path header;
  };

  static std::string key_text(const Region& r, const TruncationConfig& cfg, const QuadratureSpec& spec) {
    return describe(r) + "|dim=" + std::to_string(cfg.dim) + "|eff=" + std::to_string(cfg.effective_dim) +
           "|tol=" + format_number(cfg.tol) + "|order=" + std::to_string(spec.order) +
           "|adaptive=" + (spec.adaptive ? "1" : "0") + "|max_order=" + std::to_string(spec.max_order) +
           "|adapt_tol=" + format_number(spec.adapt_tol);
  }

  std::filesystem::path header_path(const Region& r, const TruncationConfig& cfg, const QuadratureSpec& spec) const {
    return dir_ / ("op-" + hex64(fnv1a64(key_text(r, cfg, spec))) + ".hdr");
  }

  Result get_or_build(const Region& r, const TruncationConfig& cfg, const QuadratureSpec& spec) {
    const std::filesystem::path hdr = header_path(r, cfg, spec);
    const std::string key = key_text(r, cfg, spec);
    if (std::filesystem::exists(hdr)) {
      try {
        StoredOperator s = load_operator(hdr, cfg.dim);
        if (s.meta.params["key"] == key) return {std::move(s.op), true, s.hash, hdr};
      } catch (const Error&) {
        // Unreadable or corrupt entry: rebuild and overwrite.
      }
    }
    FockOperator op = build_region_operator(r, cfg, spec);
    OperatorMeta meta;
    meta.normalization = to_string(Normalization::wigner);
    meta.params["key"] = key;
    meta.params["region"] = describe(r);
    const std::uint64_t h = save_operator(op, hdr, meta);
    return {std::move(op), false, h, hdr};
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace qregion

#include <gtest/gtest.h>

#include <random>

#include "qregion/spectra.hpp"

using namespace qregion;

namespace {

QuadratureSpec fixed(int order) {
  QuadratureSpec s;
  s.order = order;
  s.adaptive = false;
  return s;
}

RealVector vec(std::initializer_list<double> v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(d, d);
}

}  // namespace

TEST(Bounds, Examples) {
  const auto [lo, hi] = qpm_bounds(parity(truncation(4)));
  EXPECT_DOUBLE_EQ(lo, -1);
  EXPECT_DOUBLE_EQ(hi, 1);
  const auto [ilo, ihi] = qpm_bounds(FockOperator::identity(5));
  EXPECT_DOUBLE_EQ(ilo, 1);
  EXPECT_DOUBLE_EQ(ihi, 1);
  const auto [dlo, dhi] = qpm_bounds(disk_operator(1.0, truncation(48)));
  EXPECT_NEAR(dhi, 1 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(dlo, 1 - 3 * std::exp(-1.0), 1e-12);
  EXPECT_THROW(qpm_bounds(annihilation(truncation(4))), NotHermitian);
}

TEST(Ordered, Permutations) {
  const OrderedEigenvalues o = ordered(vec({0.5, -1, 3, 2}));
  EXPECT_EQ(o.descending, vec({3, 2, 0.5, -1}));
  EXPECT_EQ(o.ascending, vec({-1, 0.5, 2, 3}));
  EXPECT_DOUBLE_EQ(o.total, 4.5);
}

TEST(Majorization, Examples) {
  EXPECT_TRUE(majorizes(vec({2, 0}), vec({1, 1}), 1e-12));
  EXPECT_FALSE(majorizes(vec({1, 1}), vec({2, 0}), 1e-12));
  EXPECT_FALSE(majorizes(vec({2, 0}), vec({1, 2}), 1e-12));  // totals differ
  const RealVector l = vec({0.3, -0.1, 0.7, 0.0});
  EXPECT_TRUE(majorizes(l, l, 0));
  EXPECT_TRUE(majorizes_ascending(vec({1, 1}), vec({2, 0}), 1e-12));
  EXPECT_THROW(majorizes(vec({1}), vec({1, 2}), 0), DimensionMismatch);
}

TEST(Majorization, HardyLittlewoodPolya) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 12;
    const Matrix u = random_unitary(d, rng);
    const RealMatrix b = hadamard_square(u);
    RealVector x(d);
    for (int i = 0; i < d; ++i) x[i] = n(rng);
    const RealVector y = b * x;
    EXPECT_TRUE(majorizes(x, y, 1e-12));
    EXPECT_TRUE(majorizes_ascending(y, x, 1e-12));
    const RealVector z = hadamard_square(random_unitary(d, rng)) * y;
    EXPECT_TRUE(majorizes(y, z, 1e-12));
    EXPECT_TRUE(majorizes(x, z, 1e-12));  // transitivity
  }
}

TEST(Majorization, AfterTileStep) {
  const auto cfg = truncation(64);
  const Region r0 = rectangle(0, 0, 0.5, 0.5);
  const TilingTrace t = tile_run(build_region_operator(r0, cfg, fixed(64)), r0, 2, TileMode::rectangle, cfg);
  for (std::size_t i = 1; i < t.steps.size(); ++i) {
    const RealVector lam = 4.0 * t.steps[i - 1].spectrum.eigenvalues;
    const RealVector lp = t.steps[i].spectrum.eigenvalues;
    EXPECT_TRUE(majorizes(lam, lp, 1e-3)) << i;
    EXPECT_TRUE(majorizes_ascending(lp, lam, 1e-3)) << i;
    const RealMatrix h = t.steps[i].step->entries / 4.0;
    EXPECT_TRUE(is_doubly_stochastic(h, cfg.effective_dim, 1e-3));
  }
}

TEST(Squeezing, DegenerateWaiver) {
  TilingTrace t;
  for (int i = 0; i < 2; ++i) {
    TilingStep s;
    s.lambda_min = s.lambda_max = (i == 0 ? 0.25 : 1.0);
    t.steps.push_back(s);
  }
  const SqueezingReport r = squeezing_report(t, 1e-9);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.degenerate_pairs, 1);
  TilingTrace single;
  single.steps.resize(1);
  EXPECT_FALSE(squeezing_check(single, 1e-3));
}

TEST(Squeezing, RectangleAndDiskTiling) {
  {
    const auto cfg = truncation(64);
    const Region r0 = rectangle(0, 0, 0.5, 0.5);
    const TilingTrace t = tile_run(build_region_operator(r0, cfg, fixed(64)), r0, 2, TileMode::rectangle, cfg);
    EXPECT_TRUE(squeezing_check(t, 1e-3));
  }
  {
    const auto cfg = truncation(48);
    const Region r0 = disk({0, 0}, 1.0);
    const TilingTrace t = tile_run(disk_operator(0.5, cfg), r0, 1, TileMode::disk, cfg);
    EXPECT_TRUE(squeezing_check(t, 1e-3));
    const RealVector lam = 4.0 * t.steps[0].spectrum.eigenvalues;
    EXPECT_TRUE(majorizes(lam, t.steps[1].spectrum.eigenvalues, 1e-3));
  }
}

TEST(Squeezing, DetectsViolation) {
  TilingTrace t;
  t.steps.resize(2);
  t.steps[0].lambda_min = -0.1;
  t.steps[0].lambda_max = 0.5;
  t.steps[1].lambda_min = -0.1;
  t.steps[1].lambda_max = 2.5;  // above 4 * 0.5
  EXPECT_FALSE(squeezing_check(t, 1e-3));
}

TEST(DoublyStochastic, Checks) {
  EXPECT_TRUE(is_doubly_stochastic(RealMatrix::Identity(3, 3), 3, 1e-12));
  RealMatrix m = RealMatrix::Constant(2, 2, 0.5);
  EXPECT_TRUE(is_doubly_stochastic(m, 2, 1e-12));
  m(0, 0) = 0.6;
  EXPECT_FALSE(is_doubly_stochastic(m, 2, 1e-3));
}

TEST(Majorization, StableAcrossTruncation) {
  // The relation and the extremal eigenvalues should not depend on where the
  // Fock space is cut.
  const Region r0 = rectangle(0, 0, 0.5, 0.5);
  std::vector<std::pair<double, double>> extremes;
  for (int d : {48, 64, 80}) {
    const auto cfg = truncation(d);
    const TilingTrace t = tile_run(build_region_operator(r0, cfg, fixed(64)), r0, 1, TileMode::rectangle, cfg);
    EXPECT_TRUE(majorizes(4.0 * t.steps[0].spectrum.eigenvalues, t.steps[1].spectrum.eigenvalues, 1e-3)) << d;
    EXPECT_TRUE(squeezing_check(t, 1e-3)) << d;
    extremes.emplace_back(t.steps[1].lambda_min, t.steps[1].lambda_max);
  }
  for (std::size_t i = 1; i < extremes.size(); ++i) {
    EXPECT_NEAR(extremes[i].first, extremes[0].first, 1e-3);
    EXPECT_NEAR(extremes[i].second, extremes[0].second, 1e-3);
  }
}

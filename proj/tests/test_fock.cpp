#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qregion/fock.hpp"

using namespace qregion;

namespace {

// Independent oracle: Pade matrix exponential of i(pQ - qP) at a large
// dimension, cropped.
Matrix expm_displacement(double q, double p, int big, int keep) {
  const auto cfg = truncation(big);
  const Matrix gen = Complex(0, 1) * (p * position(cfg).matrix() - q * momentum(cfg).matrix());
  return gen.exp().topLeftCorner(keep, keep);
}

}  // namespace

TEST(BasicOperators, ParityAndRotation) {
  const auto cfg = truncation(4);
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() << 1, -1, 1, -1;
  EXPECT_EQ(parity(cfg).matrix(), expect);
  EXPECT_LT(max_abs(rotation(kPi, cfg).matrix() - expect), 1e-15);
  EXPECT_LT(max_abs(rotated_quadrature(0.0, cfg).matrix() - position(cfg).matrix()), 1e-15);
}

TEST(BasicOperators, LadderAction) {
  const auto cfg = truncation(6);
  const Matrix a = annihilation(cfg).matrix();
  for (int n = 1; n < 6; ++n) EXPECT_DOUBLE_EQ(a(n - 1, n).real(), std::sqrt(double(n)));
  EXPECT_EQ(creation(cfg).matrix(), a.adjoint());
  const Matrix nn = number_operator(cfg).matrix();
  EXPECT_LT(max_abs((a.adjoint() * a) - nn), 1e-14);
}

TEST(BasicOperators, RejectsBadTruncation) {
  EXPECT_THROW(truncation(1), InvalidTruncation);
  EXPECT_THROW(truncation(8, 9), InvalidTruncation);
  EXPECT_THROW(rotation(std::nan(""), truncation(4)), NumericalError);
}

TEST(BasicOperators, CanonicalCommutatorOnEffectiveBlock) {
  const auto cfg = truncation(40);
  for (double th : {0.0, 0.4, 1.3, 2.9}) {
    const Matrix a = rotated_quadrature(th, cfg).matrix();
    const Matrix b = rotated_quadrature(th + kPi / 2, cfg).matrix();
    const Matrix c = a * b - b * a;
    const Matrix id = Complex(0, 1) * Matrix::Identity(40, 40);
    EXPECT_LT(block_max_diff(c, id, cfg.effective_dim), 1e-9);
  }
}

TEST(BasicOperators, RotationConjugation) {
  const auto cfg = truncation(16);
  const double th = 0.7;
  const Matrix r = rotation(th, cfg).matrix();
  const Matrix q = position(cfg).matrix();
  EXPECT_LT(max_abs(r * q * r.adjoint() - rotated_quadrature(th, cfg).matrix()), 1e-13);
  EXPECT_LT(max_abs(r.adjoint() * q * r - rotated_quadrature(-th, cfg).matrix()), 1e-13);
}

TEST(Displacement, ZeroIsIdentity) {
  const auto cfg = truncation(12);
  EXPECT_LT(max_abs(displacement_operator(0, 0, cfg).matrix() - Matrix::Identity(12, 12)), 1e-15);
}

TEST(Displacement, VacuumElement) {
  const auto cfg = truncation(8);
  EXPECT_NEAR(displacement_operator(1.0, 0.0, cfg)(0, 0).real(), std::exp(-0.25), 1e-15);
  EXPECT_NEAR(expm_displacement(1.0, 0.0, 64, 1)(0, 0).real(), std::exp(-0.25), 1e-12);
}

TEST(Displacement, MatchesMatrixExponential) {
  const int keep = 24;
  const auto cfg = truncation(keep);
  for (auto [q, p] : {std::pair{0.3, -0.2}, {1.0, 0.5}, {-2.0, 1.5}, {3.0, -3.5}}) {
    const Matrix oracle = expm_displacement(q, p, 160, keep);
    EXPECT_LT(max_abs(displacement_operator(q, p, cfg).matrix() - oracle), 1e-11) << q << "," << p;
  }
}

TEST(Displacement, LargeArgumentStaysAccurate) {
  // |beta| up to 12, as reached by kernels over [-6,6]^2.
  const int keep = 24;
  const auto cfg = truncation(keep);
  for (auto [q, p] : {std::pair{8.5, 0.0}, {6.0 * std::sqrt(2.0), 6.0 * std::sqrt(2.0)}, {-12.0, 5.0}}) {
    const Matrix oracle = expm_displacement(q, p, 320, keep);
    EXPECT_LT(max_abs(displacement_operator(q, p, cfg).matrix() - oracle), 1e-10) << q << "," << p;
  }
}

TEST(Displacement, UnitaryVersionAgreesOnLowBlock) {
  const auto cfg = truncation(64);
  const Matrix u = unitary_displacement(0.8, -0.6, cfg).matrix();
  EXPECT_LT(max_abs(u * u.adjoint() - Matrix::Identity(64, 64)), 1e-12);
  EXPECT_LT(block_max_diff(u, displacement_operator(0.8, -0.6, cfg).matrix(), 16), 1e-10);
}

TEST(Displacement, ParityFlipsArgument) {
  const auto cfg = truncation(64);
  const Matrix pi = parity(cfg).matrix();
  for (auto [q, p] : {std::pair{1.0, 0.0}, {-0.4, 0.9}, {1.0, 1.0}}) {
    EXPECT_LT(block_max_diff(pi * displacement_operator(q, p, cfg).matrix() * pi,
                             displacement_operator(-q, -p, cfg).matrix(), cfg.effective_dim),
              1e-6);
  }
}

TEST(Displacement, CompositionUpToPhase) {
  const auto cfg = truncation(64);
  const Matrix d1 = displacement_operator(0.5, 0.2, cfg).matrix();
  const Matrix d2 = displacement_operator(-0.3, 0.7, cfg).matrix();
  const Matrix d12 = displacement_operator(0.2, 0.9, cfg).matrix();
  const Matrix prod = (d1 * d2).topLeftCorner(cfg.effective_dim, cfg.effective_dim);
  const Complex phase = prod(0, 0) / d12(0, 0);
  EXPECT_NEAR(std::abs(phase), 1.0, 1e-6);
  EXPECT_LT(block_max_diff(prod, phase * d12, cfg.effective_dim), 1e-6);
  // Weyl phase exp(i Im(alpha1 conj(alpha2)))
  EXPECT_NEAR(std::arg(phase), 0.5 * (0.2 * -0.3 - 0.5 * 0.7), 1e-6);
}

TEST(Displacement, RejectsNonFinite) {
  EXPECT_THROW(displacement_operator(std::numeric_limits<double>::infinity(), 0, truncation(4)), NumericalError);
}

TEST(QuadratureEigenvectors, HermiteValues) {
  const auto cfg = truncation(16);
  const Vector v = position_eigenvector_amplitudes(0.0, 0.0, cfg);
  EXPECT_EQ(v[1], Complex(0.0, 0.0));
  EXPECT_NEAR(v[0].real(), std::pow(kPi, -0.25), 1e-15);
}

TEST(QuadratureEigenvectors, EigenvalueEquationOnEffectiveBlock) {
  const auto cfg = truncation(64);
  for (double th : {0.0, 0.9}) {
    const Vector ket = position_eigenket(1.2, th, cfg);
    const Vector r = rotated_quadrature(th, cfg).matrix() * ket - 1.2 * ket;
    EXPECT_LT(r.head(cfg.effective_dim).norm(), 1e-12);
  }
}

TEST(QuadratureEigenvectors, VacuumExponentialConstruction) {
  // <n|q_theta> from pi^{-1/4} e^{-q^2/2} exp(sqrt2 e^{i th} q a^+ - e^{2i th} a^+^2 / 2)|0>.
  // a^+ only raises, so the truncated construction is exact.
  const auto cfg = truncation(14);
  const Matrix ad = creation(cfg).matrix();
  for (double th : {0.0, 0.6, 2.2}) {
    for (double q : {-1.1, 0.0, 0.7}) {
      const Complex e1 = std::polar(1.0, th), e2 = std::polar(1.0, 2 * th);
      const Matrix gen = std::sqrt(2.0) * e1 * q * ad - 0.5 * e2 * ad * ad;
      const Vector v = std::pow(kPi, -0.25) * std::exp(-0.5 * q * q) * gen.exp().col(0);
      EXPECT_LT((v - position_eigenket(q, th, cfg)).cwiseAbs().maxCoeff(), 1e-12) << th << "," << q;
    }
  }
}

TEST(QuadratureEigenvectors, CoherentOverlap) {
  const auto cfg = truncation(64);
  for (Complex z : {Complex(0.3, 0.4), Complex(-0.7, 0.2), Complex(0.0, -1.0)}) {
    const Vector c = coherent_state(z, 64);
    for (double th : {0.0, 0.5, 2.0}) {
      for (double q : {-2.0, -0.5, 1.0, 2.0}) {
        const Vector bra = position_eigenvector_amplitudes(q, th, cfg);
        const Complex got = (bra.transpose() * c)(0);
        const Complex w = z * std::polar(1.0, -th);
        const double qm = std::sqrt(2.0) * w.real(), pm = std::sqrt(2.0) * w.imag();
        const Complex expect = std::pow(kPi, -0.25) * std::exp(Complex(0, pm * q)) *
                               std::exp(-0.5 * (q - qm) * (q - qm)) * std::exp(Complex(0, -0.5 * qm * pm));
        EXPECT_LT(std::abs(got - expect), 1e-6);
      }
    }
  }
}

TEST(QuadratureEigenvectors, ParityFlip) {
  const auto cfg = truncation(20);
  const Vector a = position_eigenvector_amplitudes(0.8, 0.3, cfg);
  const Vector b = position_eigenvector_amplitudes(-0.8, 0.3, cfg);
  EXPECT_LT((parity(cfg).matrix() * a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpectralFunction, IdentityAndConstant) {
  const auto cfg = truncation(10);
  const FockOperator q = position(cfg);
  EXPECT_LT(max_abs(spectral_function(q, [](double x) { return x; }).matrix() - q.matrix()), 1e-13);
  EXPECT_LT(max_abs(spectral_function(q, [](double) { return 1.0; }).matrix() - Matrix::Identity(10, 10)), 1e-13);
  EXPECT_THROW(spectral_function(annihilation(cfg), [](double x) { return x; }), NotHermitian);
}

TEST(SpectralFunction, SincMatchesExponentialQuadrature) {
  // sin(QL)/Q = int_{-L/2}^{L/2} exp(2 i x Q) dx
  const auto cfg = truncation(32);
  const double len = 1.0;
  const FockOperator q = position(cfg);
  const FockOperator f = spectral_function(q, [len](double x) { return x == 0.0 ? len : std::sin(x * len) / x; });
  const GaussRule g = gauss_legendre(48, -0.5 * len, 0.5 * len);
  Matrix acc = Matrix::Zero(32, 32);
  for (int i = 0; i < 48; ++i) acc += g.weights[i] * (Complex(0, 2.0 * g.nodes[i]) * q.matrix()).exp();
  EXPECT_LT((acc - f.matrix()).norm(), 1e-8);
}

TEST(Spectrum, OrderingAndDeterminism) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 1, 3, 2;
  const Spectrum s = hermitian_spectrum(FockOperator(m, true));
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 3);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], 2);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], 1);

  const Spectrum p = hermitian_spectrum(parity(truncation(4)));
  EXPECT_DOUBLE_EQ(p.eigenvalues[0], 1);
  EXPECT_DOUBLE_EQ(p.eigenvalues[3], -1);
  // tie group ordered lexicographically: |0> before |2> since (0,..,1) < (1,..,0)
  EXPECT_EQ(p.eigenvectors(2, 0), Complex(1, 0));
  EXPECT_EQ(p.eigenvectors(0, 1), Complex(1, 0));
}

TEST(Spectrum, ReconstructionAndRepeatability) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Matrix a(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) a(i, j) = Complex(n(rng), n(rng));
  a = (a + a.adjoint()).eval();
  const FockOperator op(a, true);
  const Spectrum s1 = hermitian_spectrum(op), s2 = hermitian_spectrum(op);
  EXPECT_TRUE((s1.eigenvalues.array() == s2.eigenvalues.array()).all());
  for (int k = 1; k < 20; ++k) EXPECT_GE(s1.eigenvalues[k - 1], s1.eigenvalues[k]);
  const Matrix& v = s1.eigenvectors;
  EXPECT_LT(max_abs(v.adjoint() * v - Matrix::Identity(20, 20)), 1e-12);
  EXPECT_LT(max_abs(v * s1.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint() - a), 1e-12 * 20 * max_abs(a));
  EXPECT_THROW(hermitian_spectrum(annihilation(truncation(4))), NotHermitian);
}

TEST(Hadamard, Properties) {
  const auto cfg = truncation(8);
  const Matrix a = displacement_operator(0.3, 0.1, cfg).matrix();
  const Matrix b = position(cfg).matrix();
  EXPECT_EQ(hadamard_product(a, Matrix::Ones(8, 8)), a);
  EXPECT_EQ(hadamard_product(a, b), hadamard_product(b, a));
  EXPECT_THROW(hadamard_product(a, Matrix::Ones(7, 8)), DimensionMismatch);

  const RealMatrix s = hadamard_square(unitary_displacement(0.4, -0.9, cfg).matrix());
  EXPECT_LT((s.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-13);
  EXPECT_LT((s.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-13);
  const RealMatrix r = hadamard_square(rotation(1.1, cfg).matrix());
  EXPECT_LT((r - RealMatrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, Basics) {
  const auto cfg = truncation(5);
  const Matrix x = displacement_operator(0.2, 0.6, cfg).matrix();
  Matrix e00 = Matrix::Zero(3, 3);
  e00(0, 0) = 1;
  EXPECT_LT(max_abs(ancilla_partial_trace(ancilla_embed(e00, x), 3).matrix() - x), 1e-15);
  EXPECT_LT(max_abs(ancilla_partial_trace(ancilla_embed(Matrix::Identity(3, 3), x), 3).matrix() - 3.0 * x), 1e-15);
  EXPECT_THROW(ancilla_partial_trace(Matrix::Zero(7, 7), 3), DimensionMismatch);
}

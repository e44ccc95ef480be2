#include <gtest/gtest.h>

#include <random>

#include "engel/algebra.hpp"
#include "oracles/nilpotent_matrices.hpp"

using namespace engel;
using Q = mpq_class;
using QG = BasicGroupElement<Q>;
using QV = BasicLieVector<Q>;

namespace {

Q random_q(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-40, 40), den(1, 12);
  Q q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

QG random_qg(std::mt19937_64& rng) { return {random_q(rng), random_q(rng), random_q(rng), random_q(rng)}; }
QV random_qv(std::mt19937_64& rng) { return {random_q(rng), random_q(rng), random_q(rng), random_q(rng)}; }

GroupElement random_g(std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

void expect_near(const GroupElement& a, const GroupElement& b, double tol) {
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], tol) << "coordinate " << i + 1;
}

// Coordinate expressions of the left-invariant fields applied to f = x_k.
double field_on_coordinate(int i, int k, const GroupElement& x) {
  const std::array<std::array<double, 4>, 4> coeff{{
      {1.0, 0.0, -x.x2, -0.5 * (x.x3 + x.x1 * x.x2)},
      {0.0, 1.0, 0.0, 0.0},
      {0.0, 0.0, 1.0, 0.5 * x.x1},
      {0.0, 0.0, 0.0, 1.0},
  }};
  return coeff[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
}

}  // namespace

TEST(GroupLaw, ProductExamples) {
  EXPECT_EQ(multiply(QG{1, 0, 0, 0}, QG{0, 1, 0, 0}), (QG{1, 1, 0, 0}));
  EXPECT_EQ(multiply(QG{0, 1, 0, 0}, QG{1, 0, 0, 0}), (QG{1, 1, -1, 0}));
}

TEST(GroupLaw, IdentityAndInverse) {
  std::mt19937_64 rng(1);
  const QG e{};
  EXPECT_EQ(inverse(e), e);
  EXPECT_EQ(inverse(QG{1, 1, 0, 0}), (QG{-1, -1, -1, 0}));
  for (int k = 0; k < 50; ++k) {
    const auto g = random_qg(rng);
    EXPECT_EQ(multiply(g, e), g);
    EXPECT_EQ(multiply(e, g), g);
    EXPECT_EQ(multiply(g, inverse(g)), e);
    EXPECT_EQ(multiply(inverse(g), g), e);
    EXPECT_EQ(inverse(inverse(g)), g);
  }
}

TEST(GroupLaw, AssociativityExactAndFloating) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto x = random_qg(rng), y = random_qg(rng), z = random_qg(rng);
    EXPECT_EQ(multiply(multiply(x, y), z), multiply(x, multiply(y, z)));
  }
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_g(rng), y = random_g(rng), z = random_g(rng);
    expect_near(multiply(multiply(x, y), z), multiply(x, multiply(y, z)), 1e-12);
  }
}

TEST(GroupLaw, AgreesWithMatrixRealization) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_qg(rng), y = random_qg(rng);
    EXPECT_EQ(oracle::mul(oracle::group(x), oracle::group(y)), oracle::group(multiply(x, y)));
    EXPECT_EQ(oracle::group(inverse(x)), oracle::mul(oracle::group(QG{}), oracle::group(inverse(x))));
    EXPECT_EQ(oracle::mul(oracle::group(x), oracle::group(inverse(x))), oracle::identity());
  }
}

TEST(LieBracket, StructureConstants) {
  const auto X1 = basis_vector<Q>(1), X2 = basis_vector<Q>(2), X3 = basis_vector<Q>(3),
             X4 = basis_vector<Q>(4);
  EXPECT_EQ(bracket(X1, X2), X3);
  EXPECT_EQ(bracket(X1, X3), X4);
  EXPECT_EQ(bracket(X2, X3), QV{});
  EXPECT_EQ(bracket(X1, X4), QV{});
  EXPECT_EQ(bracket(X2, X4), QV{});
  EXPECT_EQ(bracket(X3, X4), QV{});
}

TEST(LieBracket, AntisymmetryBilinearityJacobi) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_qv(rng), b = random_qv(rng), c = random_qv(rng);
    const Q s = random_q(rng);
    EXPECT_EQ(bracket(a, b), -bracket(b, a));
    EXPECT_EQ(bracket(a + s * b, c), bracket(a, c) + s * bracket(b, c));
    EXPECT_EQ(bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b)), QV{});
  }
}

TEST(LieBracket, MatrixRealizationIsFaithfulHomomorphism) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_qv(rng), b = random_qv(rng);
    const auto A = oracle::algebra(a), B = oracle::algebra(b);
    EXPECT_EQ(oracle::add(oracle::mul(A, B), oracle::mul(B, A), -1), oracle::algebra(bracket(a, b)));
  }
}

TEST(Exponential, Examples) {
  EXPECT_EQ(exp_to_semidirect(QV{0, Q(7, 3), 0, 0}), (QG{0, Q(7, 3), 0, 0}));
  EXPECT_EQ(exp_to_semidirect(QV{1, 1, 0, 0}), (QG{1, 1, Q(-1, 2), Q(-1, 12)}));
}

TEST(Exponential, ConjugationByX2Line) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const Q x2 = random_q(rng);
    const QV y{random_q(rng), 0, random_q(rng), random_q(rng)};
    const QG c = multiply(multiply(exp_to_semidirect(QV{0, x2, 0, 0}), exp_to_semidirect(y)),
                          exp_to_semidirect(QV{0, -x2, 0, 0}));
    EXPECT_EQ(semidirect_to_exp(c), (QV{y.v1, 0, y.v3 - x2 * y.v1, y.v4}));
  }
}

TEST(Exponential, RoundTripAndMatrixExponential) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const auto v = random_qv(rng);
    EXPECT_EQ(semidirect_to_exp(exp_to_semidirect(v)), v);
    EXPECT_EQ(oracle::group(exp_to_semidirect(v)), oracle::expm(oracle::algebra(v)));
    const auto g = random_qg(rng);
    EXPECT_EQ(exp_to_semidirect(semidirect_to_exp(g)), g);
  }
}

TEST(Exponential, BchMatchesProductOfExponentials) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_qv(rng), b = random_qv(rng);
    EXPECT_EQ(exp_to_semidirect(bch(a, b)), multiply(exp_to_semidirect(a), exp_to_semidirect(b)));
  }
}

TEST(Dilation, Examples) {
  EXPECT_EQ(dilate(Q(1), QG{3, 4, 5, 6}), (QG{3, 4, 5, 6}));
  EXPECT_EQ(dilate(Q(2), QG{1, 1, 1, 1}), (QG{2, 2, 4, 8}));
  EXPECT_THROW(dilate(0.0, GroupElement{1, 1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(dilate(-1.0, GroupElement{1, 1, 1, 1}), std::invalid_argument);
}

TEST(Dilation, AutomorphismAndComposition) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_qg(rng), y = random_qg(rng);
    Q r = abs(random_q(rng)) + Q(1, 7), s = abs(random_q(rng)) + Q(1, 5);
    EXPECT_EQ(dilate(r, multiply(x, y)), multiply(dilate(r, x), dilate(r, y)));
    EXPECT_EQ(dilate(r, dilate(s, x)), dilate(Q(r * s), x));
    EXPECT_EQ(dilate(r, semidirect_to_exp(x)), semidirect_to_exp(dilate(r, x)));
  }
}

TEST(LeftInvariantDerivative, Examples) {
  const ScalarField f2 = [](const GroupElement& x) { return x.x2; };
  const ScalarField f3 = [](const GroupElement& x) { return x.x3; };
  const ScalarField f4 = [](const GroupElement& x) { return x.x4; };
  EXPECT_NEAR(left_invariant_derivative(f2, {0.3, -1.2, 2.0, 0.7}, 2), 1.0, 1e-10);
  EXPECT_NEAR(left_invariant_derivative(f4, {0, 0, 0, 0}, 1), 0.0, 1e-12);
  const double c = 1.7;
  EXPECT_NEAR(left_invariant_derivative(f3, {0, c, 0, 0}, 1), -c, 1e-10);
}

TEST(LeftInvariantDerivative, MatchesCoordinateVectorFields) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_g(rng);
    for (int i = 1; i <= 4; ++i) {
      for (int c = 0; c < 4; ++c) {
        const ScalarField f = [c](const GroupElement& y) { return y[c]; };
        EXPECT_NEAR(left_invariant_derivative(f, x, i), field_on_coordinate(i, c, x), 1e-8);
      }
    }
    // Nonlinear function: chain rule through the coordinate fields.
    const ScalarField g = [](const GroupElement& y) { return std::sin(y.x1) * y.x4 + y.x3 * y.x2 * y.x2; };
    const std::array<double, 4> grad{std::cos(x.x1) * x.x4, 2 * x.x3 * x.x2, x.x2 * x.x2, std::sin(x.x1)};
    for (int i = 1; i <= 4; ++i) {
      double expected = 0;
      for (int c = 0; c < 4; ++c) expected += field_on_coordinate(i, c, x) * grad[static_cast<std::size_t>(c)];
      EXPECT_NEAR(left_invariant_derivative(g, x, i), expected, 1e-7);
    }
  }
}

TEST(LeftInvariantDerivative, DilationHomogeneity) {
  std::mt19937_64 rng(11);
  const ScalarField f = [](const GroupElement& y) {
    return std::exp(-0.1 * (y.x1 * y.x1 + y.x2 * y.x2)) * std::cos(y.x3 + 0.5 * y.x4);
  };
  for (int k = 0; k < 50; ++k) {
    const auto x = random_g(rng, 1.0);
    const double r = 0.5 + 1.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    const ScalarField fr = [&](const GroupElement& y) { return f(dilate(r, y)); };
    for (int i = 1; i <= 4; ++i) {
      const double lhs = left_invariant_derivative(fr, x, i);
      const double rhs = std::pow(r, kWeights[static_cast<std::size_t>(i - 1)]) *
                         left_invariant_derivative(f, dilate(r, x), i);
      EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
}

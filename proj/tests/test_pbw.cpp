#include <gtest/gtest.h>

#include <random>

#include "engel/pbw.hpp"

using namespace engel;

namespace {

PBWPolynomial X(int i) { return PBWPolynomial::generator(i); }

std::vector<Word> random_words(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 6), letter(1, 4), num(-5, 5), den(1, 4);
  std::vector<Word> words(3);
  for (auto& w : words) {
    w.coeff = Rational(num(rng), den(rng));
    w.coeff.canonicalize();
    const int n = len(rng);
    for (int k = 0; k < n; ++k) w.letters.push_back(letter(rng));
  }
  return words;
}

}  // namespace

TEST(PBW, SingleBracket) {
  const auto p = pbw_normal_form(Word{1, {2, 1}});
  EXPECT_EQ(p, X(1) * X(2) - X(3));
  EXPECT_EQ(p.to_string(), "-1 * X1^0 X2^0 X3^1 X4^0 + 1 * X1^1 X2^1 X3^0 X4^0");
}

TEST(PBW, OrderedWordsAreFixed) {
  const auto p = pbw_normal_form(Word{Rational(3, 2), {1, 1, 2, 3, 4}});
  EXPECT_EQ(p, PBWPolynomial::monomial({2, 1, 1, 1}, Rational(3, 2)));
  EXPECT_TRUE(pbw_normal_form(Word{0, {4, 3, 2, 1}}).is_zero());
  EXPECT_EQ(PBWPolynomial().to_string(), "0");
}

TEST(PBW, CommutatorsOfGenerators) {
  EXPECT_EQ(commutator(X(1), X(2)), X(3));
  EXPECT_EQ(commutator(X(1), X(3)), X(4));
  EXPECT_TRUE(commutator(X(2), X(3)).is_zero());
  EXPECT_TRUE(commutator(X(1), X(4)).is_zero());
  EXPECT_TRUE(commutator(X(2), X(4)).is_zero());
  EXPECT_TRUE(commutator(X(3), X(4)).is_zero());
}

TEST(PBW, DiagonalPartIdentityOne) {
  // X2 X3 - [-1/2 X1, -X1^2 - X2^2] = 0
  const auto lhs = X(2) * X(3) - commutator(Rational(-1, 2) * X(1), minus_sublaplacian());
  EXPECT_TRUE(lhs.is_zero()) << lhs.to_string();
}

TEST(PBW, DiagonalPartIdentityTwo) {
  const auto lhs = commutator(X(3) * X(3), minus_sublaplacian());
  const auto expected = Rational(4) * PBWPolynomial::monomial({1, 0, 1, 1}) - Rational(2) * PBWPolynomial::monomial({0, 0, 0, 2});
  EXPECT_EQ(lhs, expected);
  EXPECT_EQ(lhs.to_string(), "-2 * X1^0 X2^0 X3^0 X4^2 + 4 * X1^1 X2^0 X3^1 X4^1");
}

TEST(PBW, FirstDiagonalPartSign) {
  // Under [X1,X3] = X4 the engine gives [X3, X1^2 + X2^2] = -2 X1 X4.
  const auto lhs = commutator(X(3), -minus_sublaplacian());
  EXPECT_EQ(lhs, Rational(-2) * PBWPolynomial::monomial({1, 0, 0, 1}));
}

TEST(PBW, ConfluenceUnderRandomRewriteOrders) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto words = random_words(rng);
    const auto ref = pbw_normal_form(words, RewriteOrder::Leftmost);
    EXPECT_EQ(pbw_normal_form(words, RewriteOrder::Rightmost), ref);
    for (std::uint64_t s = 0; s < 5; ++s) EXPECT_EQ(pbw_normal_form(words, RewriteOrder::Random, s), ref);
  }
}

TEST(PBW, ProductIsAssociativeAndJacobiHolds) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = pbw_normal_form(random_words(rng));
    const auto b = pbw_normal_form(random_words(rng));
    const auto c = pbw_normal_form(random_words(rng));
    EXPECT_EQ((a * b) * c, a * (b * c));
    const auto jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    EXPECT_TRUE(jac.is_zero());
  }
}

TEST(PBW, InvalidLetterRejected) {
  EXPECT_THROW(pbw_normal_form(Word{1, {1, 5}}), std::invalid_argument);
  EXPECT_THROW(PBWPolynomial::generator(0), std::invalid_argument);
}

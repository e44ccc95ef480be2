#pragma once

// Universal enveloping algebra of the Engel algebra, PBW basis X1^a X2^b X3^c X4^d.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace engel {

using Rational = mpq_class;
using Monomial = std::array<unsigned, 4>;

// A word X_{i1} X_{i2} ... with rational prefactor; letters are 1..4.
struct Word {
  Rational coeff{1};
  std::vector<int> letters;
};

enum class RewriteOrder { Leftmost, Rightmost, Random };

class PBWPolynomial {
 public:
  PBWPolynomial() = default;
  static PBWPolynomial generator(int i);
  static PBWPolynomial constant(const Rational& c);
  static PBWPolynomial monomial(const Monomial& m, const Rational& c = 1);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const Monomial& m) const;

  PBWPolynomial operator+(const PBWPolynomial& o) const;
  PBWPolynomial operator-(const PBWPolynomial& o) const;
  PBWPolynomial operator-() const;
  PBWPolynomial operator*(const PBWPolynomial& o) const;
  friend PBWPolynomial operator*(const Rational& s, const PBWPolynomial& p);
  bool operator==(const PBWPolynomial& o) const { return terms_ == o.terms_; }

  // Canonical text "c * X1^a X2^b X3^c X4^d + ...", terms sorted by exponent tuple.
  std::string to_string() const;

  void add_term(const Monomial& m, const Rational& c);

 private:
  std::map<Monomial, Rational> terms_;
};

PBWPolynomial commutator(const PBWPolynomial& a, const PBWPolynomial& b);

// Ordered form via X_j X_i -> X_i X_j - [X_i, X_j] for j > i.
PBWPolynomial pbw_normal_form(const Word& word, RewriteOrder order = RewriteOrder::Leftmost,
                              std::uint64_t seed = 0);
PBWPolynomial pbw_normal_form(const std::vector<Word>& words, RewriteOrder order = RewriteOrder::Leftmost,
                              std::uint64_t seed = 0);

// Convenience: -X1^2 - X2^2, the symbol of the sub-Laplacian with the sign used in H.
PBWPolynomial minus_sublaplacian();

}  // namespace engel

#include "engel/pbw.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace engel {

namespace {

using WordMap = std::map<std::vector<int>, Rational>;

// [X_i, X_j] for i < j: returns generator index or 0.
int bracket_index(int i, int j) {
  if (i == 1 && j == 2) return 3;
  if (i == 1 && j == 3) return 4;
  return 0;
}

void accumulate(WordMap& m, const std::vector<int>& w, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = m.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

std::vector<std::size_t> inversions(const std::vector<int>& w) {
  std::vector<std::size_t> pos;
  for (std::size_t k = 0; k + 1 < w.size(); ++k)
    if (w[k] > w[k + 1]) pos.push_back(k);
  return pos;
}

Monomial to_monomial(const std::vector<int>& w) {
  Monomial m{0, 0, 0, 0};
  for (int l : w) ++m[static_cast<std::size_t>(l - 1)];
  return m;
}

std::vector<int> to_word(const Monomial& m) {
  std::vector<int> w;
  for (int i = 0; i < 4; ++i)
    for (unsigned k = 0; k < m[static_cast<std::size_t>(i)]; ++k) w.push_back(i + 1);
  return w;
}

}  // namespace

PBWPolynomial PBWPolynomial::generator(int i) {
  if (i < 1 || i > 4) throw std::invalid_argument("PBWPolynomial::generator: index must be 1..4");
  Monomial m{0, 0, 0, 0};
  m[static_cast<std::size_t>(i - 1)] = 1;
  return monomial(m);
}

PBWPolynomial PBWPolynomial::constant(const Rational& c) { return monomial({0, 0, 0, 0}, c); }

PBWPolynomial PBWPolynomial::monomial(const Monomial& m, const Rational& c) {
  PBWPolynomial p;
  p.add_term(m, c);
  return p;
}

Rational PBWPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void PBWPolynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

PBWPolynomial PBWPolynomial::operator+(const PBWPolynomial& o) const {
  PBWPolynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

PBWPolynomial PBWPolynomial::operator-() const {
  PBWPolynomial r;
  for (const auto& [m, c] : terms_) r.add_term(m, -c);
  return r;
}

PBWPolynomial PBWPolynomial::operator-(const PBWPolynomial& o) const { return *this + (-o); }

PBWPolynomial operator*(const Rational& s, const PBWPolynomial& p) {
  PBWPolynomial r;
  for (const auto& [m, c] : p.terms_) r.add_term(m, s * c);
  return r;
}

PBWPolynomial PBWPolynomial::operator*(const PBWPolynomial& o) const {
  std::vector<Word> words;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Word w{ca * cb, to_word(ma)};
      auto wb = to_word(mb);
      w.letters.insert(w.letters.end(), wb.begin(), wb.end());
      words.push_back(std::move(w));
    }
  }
  return pbw_normal_form(words);
}

std::string PBWPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.get_str() << " * X1^" << m[0] << " X2^" << m[1] << " X3^" << m[2] << " X4^" << m[3];
  }
  return os.str();
}

PBWPolynomial commutator(const PBWPolynomial& a, const PBWPolynomial& b) { return a * b - b * a; }

PBWPolynomial pbw_normal_form(const Word& word, RewriteOrder order, std::uint64_t seed) {
  return pbw_normal_form(std::vector<Word>{word}, order, seed);
}

PBWPolynomial pbw_normal_form(const std::vector<Word>& words, RewriteOrder order, std::uint64_t seed) {
  WordMap pending;
  for (const auto& w : words) {
    for (int l : w.letters)
      if (l < 1 || l > 4) throw std::invalid_argument("pbw_normal_form: letters must be 1..4");
    accumulate(pending, w.letters, w.coeff);
  }
  std::mt19937_64 rng(seed);
  PBWPolynomial out;
  while (!pending.empty()) {
    auto it = pending.begin();
    if (order == RewriteOrder::Random) {
      std::uniform_int_distribution<std::size_t> pick(0, pending.size() - 1);
      std::advance(it, static_cast<long>(pick(rng)));
    }
    const std::vector<int> w = it->first;
    const Rational c = it->second;
    pending.erase(it);
    const auto inv = inversions(w);
    if (inv.empty()) {
      out.add_term(to_monomial(w), c);
      continue;
    }
    std::size_t k = inv.front();
    if (order == RewriteOrder::Rightmost) {
      k = inv.back();
    } else if (order == RewriteOrder::Random) {
      std::uniform_int_distribution<std::size_t> pick(0, inv.size() - 1);
      k = inv[pick(rng)];
    }
    const int hi = w[k], lo = w[k + 1];
    std::vector<int> swapped = w;
    std::swap(swapped[k], swapped[k + 1]);
    accumulate(pending, swapped, c);
    if (int b = bracket_index(lo, hi)) {
      std::vector<int> reduced(w.begin(), w.begin() + static_cast<long>(k));
      reduced.push_back(b);
      reduced.insert(reduced.end(), w.begin() + static_cast<long>(k) + 2, w.end());
      accumulate(pending, reduced, -c);
    }
  }
  return out;
}

PBWPolynomial minus_sublaplacian() {
  return -(PBWPolynomial::monomial({2, 0, 0, 0}) + PBWPolynomial::monomial({0, 2, 0, 0}));
}

}  // namespace engel

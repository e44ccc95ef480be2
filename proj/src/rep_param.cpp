#include "engel/rep_param.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace engel {

void validate(const RepParam& p) {
  if (const auto* g = std::get_if<Generic>(&p)) {
    if (g->delta == 0.0) throw std::invalid_argument("Generic representation requires delta != 0");
    if (!std::isfinite(g->delta) || !std::isfinite(g->beta)) throw std::invalid_argument("non-finite parameter");
  } else if (const auto* s = std::get_if<Schrodinger>(&p)) {
    if (s->lambda == 0.0) throw std::invalid_argument("Schrodinger representation requires lambda != 0");
    if (!std::isfinite(s->lambda)) throw std::invalid_argument("non-finite parameter");
  }
}

std::string describe(const RepParam& p) {
  if (const auto* g = std::get_if<Generic>(&p)) return fmt::format("Generic(delta={:.17g}, beta={:.17g})", g->delta, g->beta);
  if (const auto* s = std::get_if<Schrodinger>(&p)) return fmt::format("Schrodinger(lambda={:.17g})", s->lambda);
  const auto& c = std::get<Character>(p);
  return fmt::format("Character(alpha1={:.17g}, alpha2={:.17g})", c.alpha1, c.alpha2);
}

double real_cbrt(double v) { return std::cbrt(v); }

}  // namespace engel

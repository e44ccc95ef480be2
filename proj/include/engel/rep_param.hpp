#pragma once

// Points of the unitary dual: generic pi^{delta,beta}, Schrodinger pi^lambda, characters.

#include <string>
#include <variant>

namespace engel {

struct Generic {
  double delta;
  double beta;
};

struct Schrodinger {
  double lambda;
};

struct Character {
  double alpha1;
  double alpha2;
};

using RepParam = std::variant<Generic, Schrodinger, Character>;

// Throws std::invalid_argument for delta == 0 or lambda == 0.
void validate(const RepParam& p);

std::string describe(const RepParam& p);

// Real cube root, odd in its argument.
double real_cbrt(double v);

}  // namespace engel

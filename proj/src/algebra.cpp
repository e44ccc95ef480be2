#include "engel/algebra.hpp"

namespace engel {

double left_invariant_derivative(const ScalarField& f, const GroupElement& x, int i, double h) {
  if (i < 1 || i > 4) throw std::invalid_argument("left_invariant_derivative: direction must be 1..4");
  if (h <= 0.0) h = default_fd_step(x);
  const double fp = f(multiply(x, exp_generator(i, h)));
  const double fm = f(multiply(x, exp_generator(i, -h)));
  return (fp - fm) / (2.0 * h);
}

}  // namespace engel

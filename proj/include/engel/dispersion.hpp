#pragma once

// Critical points of the Montgomery branches, cone sections and Strichartz exponent arithmetic.

#include <array>
#include <string>
#include <vector>

#include "engel/spectral.hpp"
#include "json.hpp"

namespace engel {

struct DispersionOptions {
  double nu_min = -4.0;
  double nu_max = 4.0;
  int samples = 161;
  double tol = 1e-10;
  double curvature_step = 1e-3;
  double merge_tol = 1e-5;
  SolverOptions solver;
};

struct DispersionReport {
  int n;
  double nu_c;
  double mu_at_c;
  double derivative_at_c;
  double curvature;            // central differences of mu~_n' with Richardson halving
  double curvature_step;
  double curvature_resolvent;  // 2 + 2 <dH phi, D>, cross-check
  std::array<double, 2> bracket;
  int certificate;  // sign changes of mu~_n' over the scan
  std::string kind;  // "minimum" or "maximum"
};

struct CriticalPointScan {
  std::vector<DispersionReport> reports;
  int sign_changes = 0;
  std::string advisory;
};

// Rescaled branch derivative mu~_n'(nu) and value via Feynman-Hellmann.
double montgomery_derivative(double nu, int n, const SolverOptions& opts = {});

CriticalPointScan critical_points(int n, const DispersionOptions& opts = {});

nlohmann::json to_json(const DispersionReport& r);

struct ConeSection {
  double nu0;
  double beta(double delta) const { return nu0 * real_cbrt(delta); }
  bool contains(double delta, double beta, double tol = 1e-12) const;
};

struct CurvatureConsistency {
  double reference;  // mu~_n''(nu0)
  std::vector<double> deltas;
  std::vector<double> second_differences;  // d^2/dbeta^2 mu_n(delta, nu0 delta^{1/3})
  std::vector<double> first_derivatives;   // d/dbeta mu_n at the same points
  double max_deviation;
  double max_first_derivative;
};

CurvatureConsistency curvature_consistency(int n, double nu0, const std::vector<double>& deltas,
                                           const DispersionOptions& opts = {});

enum class StrichartzClass { NotAdmissible, AdmissibleButObstructed, Allowed };

// q, p in [2, inf]; infinity is std::numeric_limits<double>::infinity().
StrichartzClass strichartz_admissible(double q, double p);
std::string to_string(StrichartzClass c);

}  // namespace engel

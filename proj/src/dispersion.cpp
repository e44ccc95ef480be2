#include "engel/dispersion.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace engel {

namespace {

SolverOptions pinned(const SolverOptions& base, double nu, int n) {
  SolverOptions o = base;
  if (o.L <= 0.0) o.L = auto_grid(Montgomery{nu}, n, o.N).L() * 1.1;
  return o;
}

double curvature_by_differences(double nu, int n, double step, const SolverOptions& opts) {
  auto diff = [&](double h) {
    return (montgomery_derivative(nu + h, n, opts) - montgomery_derivative(nu - h, n, opts)) / (2.0 * h);
  };
  return (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
}

}  // namespace

double montgomery_derivative(double nu, int n, const SolverOptions& opts) {
  return solve_level(Montgomery{nu}, n, opts).dmu;
}

CriticalPointScan critical_points(int n, const DispersionOptions& opts) {
  if (n < 1) throw std::invalid_argument("critical_points requires n >= 1");
  if (opts.samples < 2 || !(opts.nu_max > opts.nu_min)) throw std::invalid_argument("critical_points: bad scan");
  CriticalPointScan out;
  const int S = opts.samples;
  std::vector<double> nu(static_cast<std::size_t>(S)), d(static_cast<std::size_t>(S));
  for (int k = 0; k < S; ++k) {
    const auto i = static_cast<std::size_t>(k);
    nu[i] = opts.nu_min + (opts.nu_max - opts.nu_min) * k / (S - 1);
    d[i] = montgomery_derivative(nu[i], n, opts.solver);
  }
  for (std::size_t k = 0; k + 1 < nu.size(); ++k) {
    if ((d[k] > 0) == (d[k + 1] > 0)) continue;
    ++out.sign_changes;
    double a = nu[k], b = nu[k + 1];
    const bool rising = d[k + 1] > 0;
    while (b - a > opts.tol) {
      const double m = 0.5 * (a + b);
      if ((montgomery_derivative(m, n, opts.solver) > 0) == rising)
        b = m;
      else
        a = m;
    }
    const double c = 0.5 * (a + b);
    if (!out.reports.empty() && std::abs(out.reports.back().nu_c - c) < opts.merge_tol) continue;
    const SolverOptions fixed = pinned(opts.solver, c, n);
    const auto sol = solve_level(Montgomery{c}, n, fixed);
    const double curv = curvature_by_differences(c, n, opts.curvature_step, fixed);
    out.reports.push_back({n, c, sol.mu, sol.dmu, curv, opts.curvature_step, sol.d2mu, {nu[k], nu[k + 1]},
                           0, curv > 0 ? "minimum" : "maximum"});
  }
  for (auto& r : out.reports) r.certificate = out.sign_changes;
  if (out.sign_changes == 0)
    out.advisory = fmt::format("no sign change of the branch derivative on [{}, {}]; widen the scan", opts.nu_min,
                               opts.nu_max);
  return out;
}

nlohmann::json to_json(const DispersionReport& r) {
  return {{"n", r.n},
          {"nu_c", r.nu_c},
          {"mu_at_c", r.mu_at_c},
          {"curvature", r.curvature},
          {"curvature_step", r.curvature_step},
          {"curvature_resolvent", r.curvature_resolvent},
          {"derivative_at_c", r.derivative_at_c},
          {"kind", r.kind},
          {"bracket", {r.bracket[0], r.bracket[1]}},
          {"certificate", r.certificate}};
}

bool ConeSection::contains(double delta, double b, double tol) const {
  return std::abs(b - beta(delta)) <= tol * std::max(1.0, std::abs(b));
}

CurvatureConsistency curvature_consistency(int n, double nu0, const std::vector<double>& deltas,
                                           const DispersionOptions& opts) {
  CurvatureConsistency out;
  out.reference = curvature_by_differences(nu0, n, opts.curvature_step, pinned(opts.solver, nu0, n));
  out.deltas = deltas;
  out.max_deviation = 0.0;
  out.max_first_derivative = 0.0;
  const ConeSection cone{nu0};
  for (double delta : deltas) {
    const double beta = cone.beta(delta);
    SolverOptions o = opts.solver;
    if (o.L <= 0.0) o.L = auto_grid(Generic{delta, beta}, n, o.N).L() * 1.1;
    const double h = opts.curvature_step * std::max(1.0, std::abs(real_cbrt(delta)));
    const double mm = solve_level(Generic{delta, beta - h}, n, o).mu;
    const auto mid = solve_level(Generic{delta, beta}, n, o);
    const double mp = solve_level(Generic{delta, beta + h}, n, o).mu;
    const double second = (mp - 2.0 * mid.mu + mm) / (h * h);
    out.second_differences.push_back(second);
    out.first_derivatives.push_back(mid.dmu);
    out.max_deviation = std::max(out.max_deviation, std::abs(second - out.reference));
    out.max_first_derivative = std::max(out.max_first_derivative, std::abs(mid.dmu));
  }
  return out;
}

StrichartzClass strichartz_admissible(double q, double p) {
  auto in_range = [](double v) { return v >= 2.0 && !std::isnan(v); };
  if (!in_range(q) || !in_range(p)) throw std::invalid_argument("Strichartz exponents must lie in [2, inf]");
  const double lhs = (std::isinf(q) ? 0.0 : 2.0 / q) + (std::isinf(p) ? 0.0 : 7.0 / p);
  if (std::abs(lhs - 3.5) > 1e-12) return StrichartzClass::NotAdmissible;
  if (std::isinf(q) && p == 2.0) return StrichartzClass::Allowed;
  if (q == 2.0 && std::abs(p - 14.0 / 5.0) <= 1e-12) return StrichartzClass::Allowed;
  return StrichartzClass::AdmissibleButObstructed;
}

std::string to_string(StrichartzClass c) {
  switch (c) {
    case StrichartzClass::NotAdmissible: return "not-admissible";
    case StrichartzClass::AdmissibleButObstructed: return "admissible-but-obstructed";
    case StrichartzClass::Allowed: return "allowed";
  }
  return "unknown";
}

}  // namespace engel

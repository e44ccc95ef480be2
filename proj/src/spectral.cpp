#include "engel/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace engel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double symbol_potential(const Symbol& s, double xi) {
  return std::visit(
      [xi](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Generic>) {
          const double w = p.beta + 0.5 * p.delta * xi * xi;
          return w * w;
        } else if constexpr (std::is_same_v<T, Schrodinger>) {
          return p.lambda * p.lambda * xi * xi;
        } else {
          const double w = p.nu + 0.5 * xi * xi;
          return w * w;
        }
      },
      s);
}

void validate_symbol(const Symbol& s) {
  if (const auto* g = std::get_if<Generic>(&s)) validate(RepParam{*g});
  if (const auto* l = std::get_if<Schrodinger>(&s)) validate(RepParam{*l});
}

// Solves the tridiagonal system (sub, diag, sup) x = b with partial pivoting; b is overwritten.
void solve_tridiagonal(Vec dl, Vec d, Vec du, Vec& b) {
  const std::size_t n = d.size();
  Vec du2(n, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
  const double tiny = std::max(scale, 1.0) * DBL_EPSILON * 1e-3;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du2[i];
      }
      du[i] = temp;
      const double bi = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bi - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
}

// Solves (shift - H) x = b.
Vec shifted_solve(const OperatorMatrix& op, double shift, const Vec& b) {
  const std::size_t n = op.diagonal.size();
  Vec d(n), off(n, -op.off_diagonal);
  for (std::size_t i = 0; i < n; ++i) d[i] = shift - op.diagonal[i];
  Vec x = b;
  solve_tridiagonal(off, d, off, x);
  return x;
}

double gershgorin_low(const OperatorMatrix& op) {
  double lo = std::numeric_limits<double>::infinity();
  for (double v : op.diagonal) lo = std::min(lo, v);
  return lo - 2.0 * std::abs(op.off_diagonal);
}

double gershgorin_high(const OperatorMatrix& op) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : op.diagonal) hi = std::max(hi, v);
  return hi + 2.0 * std::abs(op.off_diagonal);
}

// j-th eigenvalue (0-based) by bisection on Sturm counts.
double bisect_eigenvalue(const OperatorMatrix& op, int j) {
  double lo = gershgorin_low(op), hi = gershgorin_high(op);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi))) break;
    if (sturm_count(op, mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec start_vector(std::size_t n, int j) {
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = splitmix(static_cast<std::uint64_t>(i) * 1315423911ULL + static_cast<std::uint64_t>(j));
    v[i] = 0.5 + static_cast<double>(r >> 11) * 0x1.0p-53;
  }
  return v;
}

void scale_in_place(Vec& u, double s) {
  for (double& v : u) v *= s;
}

void axpy(Vec& y, double a, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void apply_sign_convention(Vec& phi) {
  double m = 0.0;
  for (double v : phi) m = std::max(m, std::abs(v));
  for (double v : phi) {
    if (std::abs(v) >= m * (1.0 - 1e-8)) {
      if (v < 0) scale_in_place(phi, -1.0);
      return;
    }
  }
}

double residual_norm(const OperatorMatrix& op, const Vec& phi, double mu) {
  Vec r = op.apply(phi);
  axpy(r, -mu, phi);
  return norm(r, op.grid.h());
}

double neighbour_gap(const OperatorMatrix& op, const std::vector<EigenPair>& pairs, int n) {
  const double mu = pairs[static_cast<std::size_t>(n - 1)].mu;
  double gap = bisect_eigenvalue(op, n) - mu;
  if (n >= 2) gap = std::min(gap, mu - pairs[static_cast<std::size_t>(n - 2)].mu);
  return gap;
}

struct GridLevel {
  double mu, dmu, d2mu;
  OperatorMatrix op;
  std::vector<EigenPair> pairs;
  Vec dphi;
};

bool has_parameter(const Symbol& s) { return !std::holds_alternative<Schrodinger>(s); }

GridLevel solve_on_grid(const Symbol& s, int n, const SpectralGrid& grid, const EigenOptions& eopts) {
  GridLevel g{0, 0, 0, build_hamiltonian(s, grid), {}, {}};
  g.pairs = eigen_lowest(g.op, n, eopts);
  const EigenPair& level = g.pairs.back();
  g.mu = level.mu;
  if (!has_parameter(s)) {
    g.dmu = g.d2mu = kNaN;
    return g;
  }
  const double gap = neighbour_gap(g.op, g.pairs, n);
  if (!(gap > eopts.gap_threshold * std::max(1.0, std::abs(g.mu))))
    throw GapError(fmt::format("spectral gap {:.3g} at level {} below threshold", gap, n));
  const Vec dv = parameter_derivative(s, grid);
  Vec dhphi(level.phi.size());
  for (std::size_t i = 0; i < dhphi.size(); ++i) dhphi[i] = dv[i] * level.phi[i];
  g.dmu = inner(dhphi, level.phi, grid.h());
  g.dphi = reduced_resolvent_solve(g.op, level, dhphi, gap);
  g.d2mu = 2.0 + 2.0 * inner(dhphi, g.dphi, grid.h());
  return g;
}

SpectralGrid choose_grid(const Symbol& s, int n, const SolverOptions& opts) {
  if (opts.L > 0.0) return SpectralGrid(opts.L, opts.N);
  return auto_grid(s, n, opts.N);
}

}  // namespace

SpectralGrid::SpectralGrid(double L, int N) : L_(L), N_(N), h_(0.0) {
  if (N < 3) throw std::invalid_argument("SpectralGrid requires N >= 3");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("SpectralGrid requires L > 0");
  h_ = 2.0 * L / (N - 1);
}

Vec SpectralGrid::nodes() const {
  Vec x(static_cast<std::size_t>(N_));
  for (int k = 0; k < N_; ++k) x[static_cast<std::size_t>(k)] = node(k);
  return x;
}

double inner(const Vec& u, const Vec& v, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s * h;
}

double norm(const Vec& u, double h) { return std::sqrt(inner(u, u, h)); }

double potential_value(const Symbol& s, double xi) { return symbol_potential(s, xi); }

Vec parameter_derivative(const Symbol& s, const SpectralGrid& grid) {
  Vec out(static_cast<std::size_t>(grid.N()));
  for (int k = 0; k < grid.N(); ++k) {
    const double xi = grid.node(k);
    double w = 0.0;
    if (const auto* g = std::get_if<Generic>(&s))
      w = g->beta + 0.5 * g->delta * xi * xi;
    else if (const auto* m = std::get_if<Montgomery>(&s))
      w = m->nu + 0.5 * xi * xi;
    else
      throw std::invalid_argument("parameter_derivative: Schrodinger symbol has no beta parameter");
    out[static_cast<std::size_t>(k)] = 2.0 * w;
  }
  return out;
}

Vec OperatorMatrix::apply(const Vec& u) const {
  const std::size_t n = u.size();
  Vec r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diagonal[i] * u[i];
    if (i > 0) v += off_diagonal * u[i - 1];
    if (i + 1 < n) v += off_diagonal * u[i + 1];
    r[i] = v;
  }
  return r;
}

double OperatorMatrix::quadratic_form(const Vec& u) const {
  const double h = grid.h();
  const std::size_t n = u.size();
  double kin = u[0] * u[0] + u[n - 1] * u[n - 1];
  double pot = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = u[i + 1] - u[i];
    kin += d * d;
  }
  for (std::size_t i = 0; i < n; ++i) pot += potential[i] * u[i] * u[i];
  return kin / h + pot * h;
}

OperatorMatrix build_hamiltonian(const Symbol& s, const SpectralGrid& grid) {
  validate_symbol(s);
  const double h = grid.h();
  OperatorMatrix op{grid, Vec(static_cast<std::size_t>(grid.N())), Vec(static_cast<std::size_t>(grid.N())),
                    -1.0 / (h * h)};
  for (int k = 0; k < grid.N(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    op.potential[i] = symbol_potential(s, grid.node(k));
    op.diagonal[i] = 2.0 / (h * h) + op.potential[i];
  }
  return op;
}

int sturm_count(const OperatorMatrix& op, double x) {
  const double b2 = op.off_diagonal * op.off_diagonal;
  const double pivmin = DBL_MIN * std::max(1.0, b2);
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < op.diagonal.size(); ++i) {
    q = (op.diagonal[i] - x) - (i == 0 ? 0.0 : b2 / q);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

double wkb_action(const OperatorMatrix& op, double mu) {
  const double h = op.grid.h();
  const std::size_t n = op.potential.size();
  double right = 0.0, left = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    if (op.potential[i] <= mu) break;
    right += std::sqrt(op.potential[i] - mu) * h;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (op.potential[i] <= mu) break;
    left += std::sqrt(op.potential[i] - mu) * h;
  }
  return std::min(left, right);
}

std::vector<EigenPair> eigen_lowest(const OperatorMatrix& op, int k, const EigenOptions& opts) {
  const int N = op.grid.N();
  if (k < 1) throw std::invalid_argument("eigen_lowest requires k >= 1");
  if (k > N) throw std::invalid_argument("eigen_lowest: k exceeds grid size");
  const double h = op.grid.h();
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double sigma = bisect_eigenvalue(op, j);
    if (opts.check_confinement && j == k - 1) {
      const double wall = std::min(op.potential.front(), op.potential.back());
      const double action = wkb_action(op, sigma);
      if (!(wall > sigma + opts.confinement_margin) || action < opts.min_wkb_action)
        throw ConfinementError(fmt::format(
            "level {} (mu={:.6g}) not confined on L={:.6g}: V(+-L)={:.6g}, WKB action {:.3g}; enlarge L", k, sigma,
            op.grid.L(), wall, action));
    }
    Vec x = start_vector(static_cast<std::size_t>(N), j);
    double mu = sigma;
    for (int it = 0; it < 8; ++it) {
      x = shifted_solve(op, sigma, x);
      for (const auto& prev : out) axpy(x, -inner(x, prev.phi, h), prev.phi);
      scale_in_place(x, 1.0 / norm(x, h));
      mu = op.quadratic_form(x);
      if (it >= 1 && residual_norm(op, x, mu) <= 1e-10 * std::max(std::abs(mu), 1e-3)) break;
    }
    apply_sign_convention(x);
    out.push_back({mu, std::move(x), false});
  }
  for (std::size_t j = 0; j + 1 < out.size(); ++j) {
    const double gap = out[j + 1].mu - out[j].mu;
    if (gap < opts.gap_threshold * std::max(1.0, std::abs(out[j].mu))) out[j].near_degenerate = out[j + 1].near_degenerate = true;
  }
  return out;
}

SpectralGrid auto_grid(const Symbol& s, int k, int N, double action) {
  validate_symbol(s);
  constexpr int kPilotNodes = 801;
  double L = 0.25;
  for (int it = 0; it < 200; ++it, L *= 1.1) {
    const auto op = build_hamiltonian(s, SpectralGrid(L, kPilotNodes));
    const double mu = bisect_eigenvalue(op, k - 1);
    const double wall = std::min(op.potential.front(), op.potential.back());
    if (wall >= 4.0 * std::max(mu, 0.0) + 1.0 && wkb_action(op, mu) >= action) return SpectralGrid(L, N);
  }
  throw ConfinementError("auto_grid: no confining box found");
}

LevelSolution solve_level(const Symbol& s, int n, const SolverOptions& opts) {
  if (n < 1) throw std::invalid_argument("solve_level requires n >= 1");
  const SpectralGrid base = choose_grid(s, n, opts);
  if (!opts.richardson) {
    auto g = solve_on_grid(s, n, base, opts.eigen);
    EigenPair level = g.pairs.back();
    return {n, s, base, g.mu, g.dmu, g.d2mu, std::move(g.op), std::move(level), std::move(g.pairs), std::move(g.dphi)};
  }
  const auto coarse = solve_on_grid(s, n, base, opts.eigen);
  auto fine = solve_on_grid(s, n, base.halved(), opts.eigen);
  auto extrapolate = [](double f, double c) { return (4.0 * f - c) / 3.0; };
  EigenPair level = fine.pairs.back();
  return {n,
          s,
          base,
          extrapolate(fine.mu, coarse.mu),
          extrapolate(fine.dmu, coarse.dmu),
          extrapolate(fine.d2mu, coarse.d2mu),
          std::move(fine.op),
          std::move(level),
          std::move(fine.pairs),
          std::move(fine.dphi)};
}

double mu_beta_derivative(double delta, double beta, int n, const SolverOptions& opts) {
  return solve_level(Generic{delta, beta}, n, opts).dmu;
}

Vec reduced_resolvent_solve(const OperatorMatrix& op, const EigenPair& level, const Vec& rhs, double gap) {
  const double h = op.grid.h();
  if (rhs.size() != level.phi.size()) throw std::invalid_argument("reduced_resolvent_solve: size mismatch");
  if (!(gap > 0.0) || !std::isfinite(gap)) throw GapError("reduced_resolvent_solve: singular system (gap collapse)");
  Vec r = rhs;
  axpy(r, -inner(r, level.phi, h), level.phi);
  const double rn = norm(r, h);
  Vec u(r.size(), 0.0);
  if (rn == 0.0) return u;
  const double shift = level.mu + 1e-5 * gap;
  Vec res = r;
  double last = rn;
  for (int it = 0; it < 8; ++it) {
    Vec c = shifted_solve(op, shift, res);
    axpy(c, -inner(c, level.phi, h), level.phi);
    axpy(u, 1.0, c);
    Vec hu = op.apply(u);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - (level.mu * u[i] - hu[i]);
    axpy(res, -inner(res, level.phi, h), level.phi);
    const double now = norm(res, h);
    if (now <= 1e-14 * rn || now > 0.5 * last) break;
    last = now;
  }
  return u;
}

Vec reduced_resolvent_solve(double delta, double beta, int n, const Vec& rhs, const SolverOptions& opts) {
  const Symbol s = Generic{delta, beta};
  const SpectralGrid grid = choose_grid(s, n, opts);
  if (static_cast<int>(rhs.size()) != grid.N()) throw std::invalid_argument("reduced_resolvent_solve: rhs size != grid N");
  const auto op = build_hamiltonian(s, grid);
  const auto pairs = eigen_lowest(op, n, opts.eigen);
  return reduced_resolvent_solve(op, pairs.back(), rhs, neighbour_gap(op, pairs, n));
}

Vec ProjectorPair::apply_projector(const Vec& u) const {
  Vec out = phi;
  scale_in_place(out, inner(phi, u, grid.h()));
  return out;
}

Vec ProjectorPair::apply_derivative(const Vec& u) const {
  Vec out = D;
  scale_in_place(out, inner(phi, u, grid.h()));
  axpy(out, inner(D, u, grid.h()), phi);
  return out;
}

double ProjectorPair::idempotency_defect() const {
  const double n2 = inner(phi, phi, grid.h());
  return std::abs(n2 * n2 - n2);
}

double ProjectorPair::diagonal_derivative_norm() const {
  const double n2 = inner(phi, phi, grid.h());
  return std::abs(2.0 * inner(D, phi, grid.h())) * n2;
}

ProjectorPair projector_derivative(double delta, double beta, int n, const SolverOptions& opts, int m_max) {
  const Symbol s = Generic{delta, beta};
  const SpectralGrid grid = choose_grid(s, n, opts);
  const auto op = build_hamiltonian(s, grid);
  // Confinement is required for level n only; higher box modes still span the discrete space.
  eigen_lowest(op, n, opts.eigen);
  EigenOptions loose = opts.eigen;
  loose.check_confinement = false;
  const int m = std::min(std::max(m_max, n + 1), grid.N());
  const auto pairs = eigen_lowest(op, m, loose);
  const auto& level = pairs[static_cast<std::size_t>(n - 1)];
  const double gap = neighbour_gap(op, pairs, n);
  if (!(gap > opts.eigen.gap_threshold * std::max(1.0, std::abs(level.mu))))
    throw GapError(fmt::format("projector_derivative: gap {:.3g} at level {} below threshold", gap, n));
  const double h = grid.h();
  const Vec dv = parameter_derivative(s, grid);
  Vec dhphi(level.phi.size());
  for (std::size_t i = 0; i < dhphi.size(); ++i) dhphi[i] = dv[i] * level.phi[i];
  Vec D(level.phi.size(), 0.0);
  double tail = 0.0;
  for (int j = 0; j < m; ++j) {
    if (j == n - 1) continue;
    const auto& pm = pairs[static_cast<std::size_t>(j)];
    const double coupling = inner(dhphi, pm.phi, h);
    axpy(D, coupling / (level.mu - pm.mu), pm.phi);
    if (j >= m - 8) tail += std::abs(coupling) / std::abs(pm.mu - level.mu);
  }
  Vec exact = reduced_resolvent_solve(op, level, dhphi, gap);
  axpy(exact, -1.0, D);
  return {grid, level.phi, std::move(D), m, norm(exact, h), tail};
}

double rescaled_eigenvalue(double delta, double beta, int n, const SolverOptions& opts) {
  if (delta == 0.0) throw std::invalid_argument("rescaled_eigenvalue requires delta != 0");
  const double c = real_cbrt(delta);
  return c * c * solve_level(Montgomery{beta / c}, n, opts).mu;
}

BranchRow branch_row(const Symbol& s, int n, const SolverOptions& opts) {
  BranchRow row{n, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, opts.N, "ok"};
  if (const auto* g = std::get_if<Generic>(&s)) {
    row.delta = g->delta;
    row.param = g->beta;
  } else if (const auto* m = std::get_if<Montgomery>(&s)) {
    row.delta = 1.0;
    row.param = m->nu;
  }
  try {
    const auto sol = solve_level(s, n, opts);
    row.mu = sol.mu;
    row.dmu = sol.dmu;
    row.d2mu = sol.d2mu;
    row.grid_L = sol.base_grid.L();
    row.grid_N = sol.base_grid.N();
  } catch (const ConfinementError& e) {
    row.status = "confinement_error";
  } catch (const GapError& e) {
    row.status = "gap_error";
  }
  return row;
}

void write_branch_csv(std::ostream& os, const std::vector<BranchRow>& rows, bool montgomery) {
  os << "n,delta," << (montgomery ? "nu" : "beta") << ",mu,dmu_dbeta,d2mu_dbeta2,grid_L,grid_N,status\n";
  for (const auto& r : rows)
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", r.n, r.delta, r.param, r.mu, r.dmu,
                      r.d2mu, r.grid_L, r.grid_N, r.status);
}

double DiagonalPartIdentities::max_identity_deviation() const {
  return std::max({std::abs(x2_dpi - x2_dpi_expected), std::abs(x1_dpi - x1_dpi_expected), x2x3_commutator_defect,
                   x1x3_commutator_defect});
}

DiagonalPartIdentities diagonal_part_identities(double delta, double beta, int n, const SolverOptions& opts) {
  const Generic g{delta, beta};
  const auto sol = solve_level(g, n, opts);
  const auto& op = sol.fine_op;
  const double h = op.grid.h();
  const Vec& phi = sol.level.phi;
  const Vec& D = sol.dphi;
  const std::size_t N = phi.size();
  auto deriv = [&](const Vec& u) {
    Vec d(N, 0.0);
    for (std::size_t k = 1; k + 1 < N; ++k) d[k] = (u[k + 1] - u[k - 1]) / (2.0 * h);
    return d;
  };
  Vec sD(N), xiphi(N), xi2phi(N), sxiphi(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double xi = op.grid.node(static_cast<int>(k));
    const double s = beta + 0.5 * delta * xi * xi;
    sD[k] = s * D[k];
    xiphi[k] = xi * phi[k];
    xi2phi[k] = xi * xi * phi[k];
    sxiphi[k] = s * xi * phi[k];
  }
  SolverOptions fixed = opts;
  fixed.L = sol.base_grid.L();
  fixed.N = sol.base_grid.N();
  const double step = 1e-3;
  const double mm = solve_level(Generic{delta, beta - step}, n, fixed).mu;
  const double mp = solve_level(Generic{delta, beta + step}, n, fixed).mu;
  const double m0 = solve_level(g, n, fixed).mu;
  const double d2 = (mp - 2.0 * m0 + mm) / (step * step);
  const double d1 = (mp - mm) / (2.0 * step);

  DiagonalPartIdentities r{};
  r.fh_derivative = sol.dmu;
  r.fd_derivative = d1;
  const std::complex<double> I{0.0, 1.0};
  r.x2_dpi = I * inner(sD, phi, h);
  r.x2_dpi_expected = 0.5 * I * (0.5 * d2 - 1.0);
  r.x1_dpi = inner(deriv(D), phi, h);
  r.x1_dpi_expected = d1 * (I * delta * inner(xiphi, phi, h)) / (2.0 * I * delta);

  const Vec hphi = op.apply(phi), dphi = deriv(phi);
  const Vec d_hphi = deriv(hphi), h_dphi = op.apply(dphi);
  Vec e(N);
  for (std::size_t k = 0; k < N; ++k) e[k] = -delta * sxiphi[k] + 0.5 * (d_hphi[k] - h_dphi[k]);
  r.x2x3_commutator_defect = norm(e, h);
  const Vec dxiphi = deriv(xiphi), h_xi2phi = op.apply(xi2phi);
  for (std::size_t k = 0; k < N; ++k) {
    const double xi = op.grid.node(static_cast<int>(k));
    e[k] = dxiphi[k] - 0.5 * phi[k] - 0.25 * (xi * xi * hphi[k] - h_xi2phi[k]);
  }
  r.x1x3_commutator_defect = std::abs(delta) * norm(e, h);
  return r;
}

}  // namespace engel

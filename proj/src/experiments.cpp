#include "engel/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "engel/algebra.hpp"
#include "engel/dispersion.hpp"
#include "engel/fourier.hpp"
#include "engel/parallel.hpp"
#include "engel/pbw.hpp"
#include "engel/spectral.hpp"
#include "engel/wavepacket.hpp"

namespace engel {

namespace {

using json = nlohmann::json;

// Frozen ground-branch values (Hermite-Galerkin oracle).
constexpr double kNu1c = -0.346758407366;
constexpr double kMu1c = 0.56982031744189;
constexpr double kCurv1c = 1.5761265;

// Reads typed parameters with defaults, records the effective values and rejects unknown keys.
class Params {
 public:
  Params(const json& j, std::string experiment) : in_(j), experiment_(std::move(experiment)) {
    if (!in_.is_object()) throw std::invalid_argument("params must be a JSON object");
  }

  double number(const std::string& key, double def) {
    const double v = get<double>(key, def, [](const json& x) { return x.is_number(); });
    if (!std::isfinite(v)) throw std::invalid_argument(fmt::format("{}: {} must be finite", experiment_, key));
    return v;
  }
  int integer(const std::string& key, int def) {
    return get<int>(key, def, [](const json& x) { return x.is_number_integer(); });
  }
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    return get<std::vector<double>>(key, def, [](const json& x) {
      return x.is_array() && std::all_of(x.begin(), x.end(), [](const json& e) { return e.is_number(); });
    });
  }
  std::vector<int> integers(const std::string& key, const std::vector<int>& def) {
    return get<std::vector<int>>(key, def, [](const json& x) {
      return x.is_array() && std::all_of(x.begin(), x.end(), [](const json& e) { return e.is_number_integer(); });
    });
  }
  bool has(const std::string& key) const { return in_.contains(key) && !in_.at(key).is_null(); }

  json finish() const {
    for (const auto& [k, v] : in_.items())
      if (!used_.count(k)) throw std::invalid_argument(fmt::format("{}: unknown parameter '{}'", experiment_, k));
    return out_;
  }

 private:
  template <class T, class Pred>
  T get(const std::string& key, const T& def, Pred ok) {
    used_.insert(key);
    T v = def;
    if (has(key)) {
      if (!ok(in_.at(key))) throw std::invalid_argument(fmt::format("{}: parameter '{}' has the wrong type", experiment_, key));
      v = in_.at(key).get<T>();
    }
    out_[key] = v;
    return v;
  }

  const json& in_;
  std::string experiment_;
  std::set<std::string> used_;
  json out_ = json::object();
};

void add_check(RunReport& r, std::string name, bool pass, double value, double threshold, std::string detail = {}) {
  r.checks.push_back({std::move(name), pass, value, threshold, std::move(detail)});
}

void check_le(RunReport& r, std::string name, double value, double threshold, std::string detail = {}) {
  add_check(r, std::move(name), value <= threshold, value, threshold, std::move(detail));
}

SolverOptions solver_options(Params& p) {
  SolverOptions o;
  o.N = p.integer("grid_n", 4096);
  o.L = p.number("grid_l", 0.0);
  if (o.N < 16) throw std::invalid_argument("grid_n must be >= 16");
  if (o.L < 0.0) throw std::invalid_argument("grid_l must be >= 0");
  return o;
}

// ---------------------------------------------------------------- identities

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-40, 40), den(1, 12);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

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

void run_identities(RunReport& r, Params& p) {
  const int trials = p.integer("trials", 50);
  const auto points = p.numbers("delta_beta_n", {1.0, 0.5, 1, 2.0, -0.8, 2, 0.5, 1.0, 3, -1.5, 0.2, 1});
  const SolverOptions so = solver_options(p);
  if (trials < 1) throw std::invalid_argument("identities: trials must be >= 1");
  if (points.empty() || points.size() % 3 != 0)
    throw std::invalid_argument("identities: delta_beta_n must hold (delta, beta, n) triples");
  r.config.params = p.finish();
  std::mt19937_64 rng(r.config.seed);
  using QG = BasicGroupElement<Rational>;
  using QV = BasicLieVector<Rational>;
  auto rq = [&] { return QG{random_rational(rng), random_rational(rng), random_rational(rng), random_rational(rng)}; };
  auto rv = [&] { return QV{random_rational(rng), random_rational(rng), random_rational(rng), random_rational(rng)}; };
  int assoc = 0, inv = 0, bch_rt = 0, jac = 0, conf = 0, uassoc = 0;
  for (int k = 0; k < trials; ++k) {
    const QG x = rq(), y = rq(), z = rq();
    assoc += multiply(multiply(x, y), z) != multiply(x, multiply(y, z));
    inv += multiply(x, inverse(x)) != QG{} || multiply(inverse(x), x) != QG{};
    bch_rt += exp_to_semidirect(semidirect_to_exp(x)) != x;
    const QV a = rv(), b = rv(), c = rv();
    const QV j = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
    jac += j != QV{};
    const auto words = random_words(rng);
    const auto ref = pbw_normal_form(words, RewriteOrder::Leftmost);
    conf += pbw_normal_form(words, RewriteOrder::Rightmost) != ref ||
            pbw_normal_form(words, RewriteOrder::Random, static_cast<std::uint64_t>(k)) != ref;
    const auto u = pbw_normal_form(random_words(rng)), v = pbw_normal_form(random_words(rng));
    const auto uvw = (u * v) * ref, u_vw = u * (v * ref);
    const auto pj = commutator(u, commutator(v, ref)) + commutator(v, commutator(ref, u)) +
                    commutator(ref, commutator(u, v));
    uassoc += uvw != u_vw || !pj.is_zero();
  }
  add_check(r, "exact.group_associativity", assoc == 0, assoc, 0);
  add_check(r, "exact.group_inverse", inv == 0, inv, 0);
  add_check(r, "exact.bch_round_trip", bch_rt == 0, bch_rt, 0);
  add_check(r, "exact.lie_jacobi", jac == 0, jac, 0);
  add_check(r, "exact.pbw_confluence", conf == 0, conf, 0);
  add_check(r, "exact.enveloping_associativity_and_jacobi", uassoc == 0, uassoc, 0);
  const auto X = [](int i) { return PBWPolynomial::generator(i); };
  const auto id1 = X(2) * X(3) - commutator(Rational(-1, 2) * X(1), minus_sublaplacian());
  add_check(r, "exact.x2x3_commutator_identity", id1.is_zero(), static_cast<double>(id1.terms().size()), 0,
            "residual " + id1.to_string());
  const auto id2 = commutator(X(3) * X(3), minus_sublaplacian()) -
                   (Rational(4) * PBWPolynomial::monomial({1, 0, 1, 1}) - Rational(2) * PBWPolynomial::monomial({0, 0, 0, 2}));
  add_check(r, "exact.x3_squared_commutator_identity", id2.is_zero(), static_cast<double>(id2.terms().size()), 0,
            "residual " + id2.to_string());
  r.metrics["trials"] = trials;

  double fh = 0.0, d1 = 0.0, d2 = 0.0;
  json rows = json::array();
  for (std::size_t k = 0; k < points.size(); k += 3) {
    const double delta = points[k], beta = points[k + 1];
    const int n = static_cast<int>(points[k + 2]);
    const auto d = diagonal_part_identities(delta, beta, n, so);
    const double e1 = std::abs(d.x2_dpi - d.x2_dpi_expected);
    const double e2 = std::max({std::abs(d.x1_dpi - d.x1_dpi_expected), d.x2x3_commutator_defect,
                                d.x1x3_commutator_defect});
    fh = std::max(fh, std::abs(d.fh_derivative - d.fd_derivative));
    d1 = std::max(d1, e1);
    d2 = std::max(d2, e2);
    rows.push_back({{"delta", delta},
                    {"beta", beta},
                    {"n", n},
                    {"fh_derivative", d.fh_derivative},
                    {"fd_derivative", d.fd_derivative},
                    {"x2_dpi_imag", d.x2_dpi.imag()},
                    {"x2_dpi_expected_imag", d.x2_dpi_expected.imag()},
                    {"x1_dpi_real", d.x1_dpi.real()},
                    {"x1_dpi_expected_real", d.x1_dpi_expected.real()},
                    {"x2x3_commutator_defect", d.x2x3_commutator_defect},
                    {"x1x3_commutator_defect", d.x1x3_commutator_defect}});
  }
  r.metrics["diagonal_parts"] = rows;
  check_le(r, "numeric.feynman_hellmann", fh, 1e-6);
  check_le(r, "numeric.x2_diagonal_part_identity", d1, 1e-4);
  check_le(r, "numeric.x1_diagonal_part_identity", d2, 1e-4);
}

// ---------------------------------------------------------------- dispersion

void run_dispersion(RunReport& r, Params& p) {
  const auto ns = p.integers("n", {1, 2, 3, 4});
  const double nu_min = p.number("nu_min", -4.0), nu_max = p.number("nu_max", 4.0);
  const double step = p.number("nu_step", 0.05);
  const int sanity = p.integer("sanity_checks", 1);
  const SolverOptions so = solver_options(p);
  if (!(step > 0.0)) throw std::invalid_argument("dispersion: nu_step must be > 0");
  const long count = nu_max >= nu_min ? std::lround(std::floor((nu_max - nu_min) / step + 1e-9)) + 1 : 0;
  if (ns.empty() || count <= 0) throw std::invalid_argument("dispersion: empty parameter grid");
  for (int n : ns)
    if (n < 1) throw std::invalid_argument("dispersion: n must be >= 1");
  r.config.params = p.finish();
  std::vector<int> sorted_n = ns;
  std::sort(sorted_n.begin(), sorted_n.end());
  sorted_n.erase(std::unique(sorted_n.begin(), sorted_n.end()), sorted_n.end());
  const auto cnt = static_cast<std::size_t>(count);
  std::vector<BranchRow> rows(sorted_n.size() * cnt);
  parallel_for(rows.size(), [&](std::size_t i) {
    const int n = sorted_n[i / cnt];
    const double nu = nu_min + step * static_cast<double>(i % cnt);
    rows[i] = branch_row(Montgomery{nu}, n, so);
  });
  std::ostringstream os;
  write_branch_csv(os, rows, true);
  r.files.emplace_back("branches.csv", os.str());
  const auto bad = std::count_if(rows.begin(), rows.end(), [](const BranchRow& b) { return b.status != "ok"; });
  r.metrics["rows"] = rows.size();
  r.metrics["failed_rows"] = bad;
  add_check(r, "sweep.row_count", rows.size() == sorted_n.size() * cnt, static_cast<double>(rows.size()),
            static_cast<double>(sorted_n.size() * cnt));
  add_check(r, "sweep.rows_ok", bad == 0, static_cast<double>(bad), 0);
  if (!sanity) return;

  SolverOptions ho;
  ho.N = 4096;
  ho.L = 10.0;
  double harm = 0.0;
  json hv = json::array();
  for (int k = 1; k <= 4; ++k) {
    const double mu = solve_level(Schrodinger{1.0}, k, ho).mu;
    hv.push_back(mu);
    harm = std::max(harm, std::abs(mu - (2 * k - 1)));
  }
  r.metrics["harmonic_eigenvalues"] = hv;
  check_le(r, "harmonic_oscillator_levels", harm, 1e-5);

  struct Point {
    double delta, beta;
    int n;
  };
  std::vector<Point> pts;
  for (double delta : {0.5, 1.0, 2.0, 8.0})
    for (int b = 0; b <= 10; ++b)
      for (int n = 1; n <= 4; ++n) pts.push_back({delta, -2.0 + 0.4 * b, n});
  std::vector<double> dev(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& q = pts[i];
    const double direct = solve_level(Generic{q.delta, q.beta}, q.n, so).mu;
    const double scaled = rescaled_eigenvalue(q.delta, q.beta, q.n, so);
    dev[i] = std::abs(direct - scaled) / std::abs(scaled);
  });
  const double worst = *std::max_element(dev.begin(), dev.end());
  r.metrics["rescaling_points"] = pts.size();
  check_le(r, "rescaling_law_relative_deviation", worst, 1e-6);
}

// ---------------------------------------------------------------- critical points

void run_critical_points(RunReport& r, Params& p) {
  const int n = p.integer("n", 1);
  DispersionOptions o;
  o.nu_min = p.number("nu_min", -4.0);
  o.nu_max = p.number("nu_max", 4.0);
  o.samples = p.integer("samples", 161);
  o.tol = p.number("tol", 1e-10);
  o.solver = solver_options(p);
  const auto deltas = p.numbers("cone_deltas", {0.5, 1.0, 2.0, 8.0});
  if (n < 1) throw std::invalid_argument("critical-points: n must be >= 1");
  if (o.samples < 2 || !(o.nu_max > o.nu_min)) throw std::invalid_argument("critical-points: empty scan grid");
  if (deltas.empty()) throw std::invalid_argument("critical-points: empty cone_deltas");
  r.config.params = p.finish();
  const auto scan = critical_points(n, o);
  json reps = json::array();
  for (const auto& rep : scan.reports) reps.push_back(to_json(rep));
  r.metrics["reports"] = reps;
  r.metrics["sign_changes"] = scan.sign_changes;
  r.metrics["advisory"] = scan.advisory;
  if (scan.reports.empty()) {
    add_check(r, "critical_point_found", false, 0, 1, scan.advisory);
    return;
  }
  bool nondegenerate = true;
  for (const auto& rep : scan.reports) nondegenerate = nondegenerate && std::abs(rep.curvature) > 1e-6;
  add_check(r, "critical_points_nondegenerate", nondegenerate, static_cast<double>(scan.reports.size()), 1);
  const auto& first = scan.reports.front();
  if (n == 1) {
    add_check(r, "ground_branch_unique_critical_point", scan.reports.size() == 1 && scan.sign_changes == 1,
              static_cast<double>(scan.reports.size()), 1);
    add_check(r, "ground_branch_positive_curvature", first.curvature > 0.0, first.curvature, 0.0);
    check_le(r, "frozen_nu_c", std::abs(first.nu_c - kNu1c), 1e-5);
    check_le(r, "frozen_mu_at_c", std::abs(first.mu_at_c - kMu1c), 1e-5);
    check_le(r, "frozen_curvature", std::abs(first.curvature - kCurv1c), 1e-5);
  }
  DispersionOptions fine = o;
  fine.nu_min = first.bracket[0] - 0.1;
  fine.nu_max = first.bracket[1] + 0.1;
  fine.samples = 11;
  fine.solver.N = 2 * o.solver.N;
  const auto refined = critical_points(n, fine);
  double shift = std::numeric_limits<double>::infinity();
  for (const auto& rep : refined.reports) shift = std::min(shift, std::abs(rep.nu_c - first.nu_c));
  check_le(r, "grid_refinement_shift", shift, 1e-4);

  const auto cc = curvature_consistency(n, first.nu_c, deltas, o);
  r.metrics["cone"] = {{"nu0", first.nu_c},
                       {"reference", cc.reference},
                       {"deltas", cc.deltas},
                       {"second_differences", cc.second_differences},
                       {"first_derivatives", cc.first_derivatives}};
  check_le(r, "cone_curvature_consistency", cc.max_deviation, 1e-3);
  check_le(r, "cone_first_derivative", cc.max_first_derivative, 1e-5);
}

// ---------------------------------------------------------------- plancherel

void run_plancherel(RunReport& r, Params& p) {
  const int doubling = p.integer("box_doubling", 1);
  const int diffops = p.integer("difference_operators", 1);
  const std::vector<GaussianKernelSpec> kernels{
      {{0, 0, 0, 0}, {1, 1, 2, 1}, {0, 0, 0, 0}, 1.0},
      {{0.5, -0.3, 0.2, 0.1}, {0.8, 1.2, 1.5, 0.9}, {0, 0, 0, 0}, 1.0},
      {{-0.4, 0.6, -0.5, 0.3}, {1.2, 0.9, 2.5, 1.2}, {0, 0, 0, 0}, 1.0},
  };
  PlancherelBox box;
  box.delta_min = p.number("delta_min", box.delta_min);
  box.delta_max = p.number("delta_max", box.delta_max);
  box.beta_max = p.number("beta_max", box.beta_max);
  box.n_delta = p.integer("n_delta", box.n_delta);
  box.beta_step = p.number("beta_step", box.beta_step);
  if (box.n_delta < 3 || !(box.delta_max > box.delta_min) || !(box.beta_step > 0.0))
    throw std::invalid_argument("plancherel: empty box");
  r.config.params = p.finish();
  const auto rep = plancherel_calibrate(kernels, box);
  r.metrics["calibration"] = rep.to_json();
  r.metrics["inverse_cube_two_pi"] = std::pow(2.0 * M_PI, -3.0);
  check_le(r, "kernel_relative_spread", rep.relative_spread, 0.01);
  if (doubling) {
    PlancherelBox big = box;
    big.delta_max *= 2.0;
    big.beta_max *= 2.0;
    big.n_delta = 2 * box.n_delta - 1;
    const auto rb = plancherel_calibrate(kernels, big);
    const double change = std::abs(rb.mean - rep.mean) / rep.mean;
    r.metrics["doubled_box_mean"] = rb.mean;
    check_le(r, "box_doubling_relative_change", change, 2e-3);
  }
  if (diffops) {
    const SpectralGrid grid(8.0, 641);
    const KernelFunction k{kernels[1]};
    double e1 = 0.0, e2 = 0.0;
    for (const auto& [delta, beta] : {std::pair{1.0, 0.3}, {-0.8, -1.0}, {2.0, 0.0}}) {
      e1 = std::max(e1, difference_op_check(k, 1, delta, beta, grid));
      e2 = std::max(e2, difference_op_check(k, 2, delta, beta, grid));
    }
    check_le(r, "difference_operator_1", e1, 1e-5);
    check_le(r, "difference_operator_2", e2, 1e-4);
  }
}

// ---------------------------------------------------------------- wave packets

WavePacketSpec packet_spec(Params& p, double default_beta) {
  WavePacketSpec s;
  s.delta0 = p.number("delta0", 1.0);
  s.beta0 = p.number("beta0", default_beta);
  s.n = p.integer("n", 1);
  s.grid_N = p.integer("grid_n", 4096);
  s.grid_L = p.number("grid_l", 0.0);
  const auto x0 = p.numbers("x0", {0.0, 0.0, 0.0, 0.0});
  if (x0.size() != 4) throw std::invalid_argument("x0 must have four coordinates");
  s.x0 = {x0[0], x0[1], x0[2], x0[3]};
  const auto prof = p.numbers("profile", {0.0, 1.0, 0.0, 1.0});
  if (prof.size() != 4) throw std::invalid_argument("profile must be [c2, w2, c4, w4]");
  s.profile = std::make_shared<GaussianProfile>(prof[0], prof[1], prof[2], prof[3]);
  const auto phi2 = p.numbers("phi2", {0.3, 1.0});
  if (phi2.size() != 2 || !(phi2[1] > 0.0)) throw std::invalid_argument("phi2 must be [center, width > 0]");
  s.phi2 = {phi2[0], phi2[1]};
  return s;
}

void run_residual_scaling(RunReport& r, Params& p) {
  const WavePacketSpec spec = packet_spec(p, 0.5);
  const auto ladder = p.numbers("hbar_ladder", {0.1, 0.05, 0.025, 0.0125});
  const double t = p.number("t", 0.5);
  ResidualOptions o;
  o.samples = p.integer("samples", 10000);
  o.fd_eps = p.number("fd_eps", 1e-4);
  o.dt_factor = p.number("dt_factor", 1e-4);
  o.seed = r.config.seed;
  if (ladder.size() < 4) throw std::invalid_argument("residual-scaling: need four or more hbar values");
  r.config.params = p.finish();
  const auto rep = residual_scaling_experiment(spec, ladder, t, o);
  r.metrics["scaling"] = rep.to_json();
  const char* names[3] = {"residual_leading.csv", "residual_with_sigma1.csv", "residual_full.csv"};
  for (std::size_t k = 0; k < 3; ++k) {
    std::ostringstream os;
    write_scaling_csv(os, rep, static_cast<AnsatzOrder>(k));
    r.files.emplace_back(names[k], os.str());
  }
  const double full = rep.slopes[2], lead = rep.slopes[0];
  add_check(r, "full_order_slope_in_[1.35,1.65]", full >= 1.35 && full <= 1.65, full, 1.5);
  add_check(r, "leading_order_slope_in_[0.85,1.15]", lead >= 0.85 && lead <= 1.15, lead, 1.0);
  r.metrics["with_sigma1_slope"] = rep.slopes[1];
}

double critical_beta(int n, double delta) {
  const auto scan = critical_points(n);
  if (scan.reports.empty()) throw std::invalid_argument(fmt::format("no critical point for mode {}", n));
  return scan.reports.front().nu_c * real_cbrt(delta);
}

void run_transport(RunReport& r, Params& p) {
  WavePacketSpec generic = packet_spec(p, 0.5);
  const auto ladder = p.numbers("hbar_ladder", {0.05, 0.025, 0.0125});
  const double t = p.number("t", 0.5);
  const int samples = p.integer("samples", 20000);
  const int time_points = p.integer("time_points", 3);
  const int critical = p.integer("critical", 1);
  if (ladder.empty()) throw std::invalid_argument("transport: empty hbar ladder");
  r.config.params = p.finish();
  const auto g = transport_demo(generic, t, ladder, samples, r.config.seed, time_points);
  r.metrics["generic"] = g.to_json();
  std::ostringstream os;
  write_transport_csv(os, g);
  r.files.emplace_back("transport_generic.csv", os.str());
  check_le(r, "generic_drift_relative_error", g.drift_relative_error, 0.03);
  if (!critical) return;
  WavePacketSpec crit = generic;
  crit.beta0 = critical_beta(generic.n, generic.delta0);
  const auto c = transport_demo(crit, t, ladder, samples, r.config.seed, time_points);
  r.metrics["critical"] = c.to_json();
  r.metrics["critical_beta0"] = crit.beta0;
  std::ostringstream oc;
  write_transport_csv(oc, c);
  r.files.emplace_back("transport_critical.csv", oc.str());
  check_le(r, "critical_centroid_over_width", c.stationary_error, 0.02);
}

void run_smicro(RunReport& r, Params& p) {
  const int n = p.integer("n", 1);
  const double t = p.number("t", 1.0);
  const int time_points = p.integer("time_points", 5);
  const double c = p.number("gaussian_center", 0.0), w = p.number("gaussian_width", 1.0);
  const double y_max = p.number("box", 30.0);
  const int points = p.integer("points", 1024);
  const auto deltas = p.numbers("deltas", {0.5, 1.0, 2.0});
  const bool given = p.has("nu0");
  const double nu_in = p.number("nu0", 0.0);
  if (!(w > 0.0) || points < 16 || !(y_max > 0.0)) throw std::invalid_argument("smicro-profile: bad profile grid");
  r.config.params = p.finish();
  double nu0 = nu_in;
  if (!given) {
    const auto scan = critical_points(n);
    if (scan.reports.empty()) throw std::invalid_argument(fmt::format("smicro-profile: mode {} has no critical point", n));
    nu0 = scan.reports.front().nu_c;
  }
  r.metrics["nu0"] = nu0;
  const auto phi = sample_profile([&](double y) { return gaussian_dispersion(y, 0.0, c, w, 1.0); }, -y_max, y_max, points);
  const auto d = second_microlocal_profile_demo(n, nu0, phi, t, time_points, deltas, c, w);
  r.metrics["demo"] = d.to_json();
  std::ostringstream os;
  write_density_csv(os, d);
  r.files.emplace_back("density.csv", os.str());
  check_le(r, "mass_drift", d.max_mass_drift, 1e-10);
  check_le(r, "gaussian_dispersion_deviation", d.max_gaussian_deviation, 1e-6);
  check_le(r, "coefficient_vs_cone_curvature", d.max_coefficient_deviation, 1e-3);
}

void run_strichartz(RunReport& r, Params& p) {
  const double inf = std::numeric_limits<double>::infinity();
  auto parse = [&](const char* key) {
    if (!p.has(key)) return std::numeric_limits<double>::quiet_NaN();
    return p.number(key, 0.0);
  };
  const double q_in = parse("q"), p_in = parse("p");
  const int q_inf = p.integer("q_infinite", 0);
  r.config.params = p.finish();
  if (!std::isnan(q_in) || q_inf || !std::isnan(p_in)) {
    const double q = q_inf ? inf : q_in;
    if (std::isnan(q) || std::isnan(p_in)) throw std::invalid_argument("strichartz: give both q and p");
    r.metrics["q"] = q_inf ? json("inf") : json(q);
    r.metrics["p"] = p_in;
    r.metrics["classification"] = to_string(strichartz_admissible(q, p_in));
  }
  int wrong = 0;
  json table = json::array();
  for (double q : {2.0, 7.0 / 3.0, 2.5, 3.0, 4.0, 8.0, 100.0, inf}) {
    const double pl = 7.0 / (3.5 - (std::isinf(q) ? 0.0 : 2.0 / q));
    const auto on = strichartz_admissible(q, pl);
    const bool endpoint = std::isinf(q) || q == 2.0;
    wrong += (on == StrichartzClass::Allowed) != endpoint || on == StrichartzClass::NotAdmissible;
    wrong += strichartz_admissible(q, pl + 0.1) != StrichartzClass::NotAdmissible;
    table.push_back({{"q", std::isinf(q) ? json("inf") : json(q)}, {"p", pl}, {"class", to_string(on)}});
  }
  r.metrics["admissible_line"] = table;
  add_check(r, "classifier_table", wrong == 0, wrong, 0);
}

const std::map<std::string, std::function<void(RunReport&, Params&)>>& registry() {
  static const std::map<std::string, std::function<void(RunReport&, Params&)>> m{
      {"identities", run_identities},
      {"dispersion", run_dispersion},
      {"critical-points", run_critical_points},
      {"plancherel", run_plancherel},
      {"residual-scaling", run_residual_scaling},
      {"transport", run_transport},
      {"smicro-profile", run_smicro},
      {"strichartz", run_strichartz},
  };
  return m;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  RunConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "experiment") {
      if (!v.is_string()) throw std::invalid_argument("config: experiment must be a string");
      c.experiment = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw std::invalid_argument("config: seed must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "params") {
      if (!v.is_object()) throw std::invalid_argument("config: params must be an object");
      c.params = v;
    } else {
      throw std::invalid_argument(fmt::format("config: unknown key '{}'", k));
    }
  }
  return c;
}

nlohmann::json RunConfig::to_json() const { return {{"experiment", experiment}, {"seed", seed}, {"params", params}}; }

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* RunReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json RunReport::to_json() const {
  json j;
  j["config"] = config.to_json();
  json cj = json::array();
  for (const auto& c : checks)
    cj.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  j["checks"] = cj;
  j["metrics"] = metrics;
  j["passed"] = passed();
  json files = json::array();
  for (const auto& f : this->files) files.push_back(f.first);
  j["files"] = files;
  return j;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kv : registry()) v.push_back(kv.first);
    return v;
  }();
  return names;
}

RunReport run_experiment(const RunConfig& config) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end()) throw std::invalid_argument(fmt::format("unknown experiment '{}'", config.experiment));
  RunReport r;
  r.config = config;
  Params p(config.params, config.experiment);
  it->second(r, p);
  return r;
}

}  // namespace engel

#include "engel/wavepacket.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>

#include "engel/dispersion.hpp"
#include "engel/parallel.hpp"

namespace engel {

namespace {

constexpr cplx I{0.0, 1.0};

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Forward (sign -1) or backward (sign +1) unnormalized DFT.
CVec dft(const CVec& in, int sign) {
  const int n = static_cast<int>(in.size());
  CVec out(in.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> wavenumbers(std::size_t n, double dy) {
  std::vector<double> k(n);
  const double base = 2.0 * M_PI / (static_cast<double>(n) * dy);
  for (std::size_t j = 0; j < n; ++j) {
    const auto s = static_cast<long>(j);
    const long m = s < static_cast<long>(n + 1) / 2 ? s : s - static_cast<long>(n);
    k[j] = base * static_cast<double>(m);
  }
  return k;
}

double edge_fraction(const ProfileState& a) {
  const std::size_t n = a.values.size();
  const std::size_t band = std::max<std::size_t>(1, n / 20);
  double edge = 0.0, total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::norm(a.values[k]);
    total += m;
    if (k < band || k >= n - band) edge += m;
  }
  return total > 0.0 ? edge / total : 0.0;
}

// Fourth-order central difference, zero outside the grid.
Vec derivative4(const Vec& u, double h) {
  const long n = static_cast<long>(u.size());
  auto at = [&](long k) { return (k < 0 || k >= n) ? 0.0 : u[static_cast<std::size_t>(k)]; };
  Vec d(u.size());
  for (long k = 0; k < n; ++k)
    d[static_cast<std::size_t>(k)] = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
  return d;
}

}  // namespace

double ProfileState::mass() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * dy;
}

ProfileState sample_profile(const std::function<cplx(double)>& f, double y_min, double y_max, int points) {
  if (points < 4 || !(y_max > y_min)) throw std::invalid_argument("sample_profile: bad grid");
  ProfileState s;
  s.y0 = y_min;
  s.dy = (y_max - y_min) / points;
  s.values.resize(static_cast<std::size_t>(points));
  for (std::size_t k = 0; k < s.values.size(); ++k) s.values[k] = f(s.y(k));
  return s;
}

ProfileState profile_evolve(const ProfileState& a0, double t, double coeff, double wrap_tol) {
  if (a0.values.size() < 4) throw std::invalid_argument("profile_evolve: grid too small");
  if (edge_fraction(a0) > wrap_tol)
    throw WrapAroundError(fmt::format("profile_evolve: initial mass near the box edge {:.3g}", edge_fraction(a0)));
  ProfileState out = a0;
  out.t = a0.t + t;
  if (coeff == 0.0 || t == 0.0) return out;
  CVec hat = dft(a0.values, FFTW_FORWARD);
  const auto k = wavenumbers(hat.size(), a0.dy);
  for (std::size_t j = 0; j < hat.size(); ++j) hat[j] *= std::polar(1.0, -coeff * k[j] * k[j] * t);
  out.values = dft(hat, FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(hat.size());
  for (auto& v : out.values) v *= inv;
  if (edge_fraction(out) > wrap_tol)
    throw WrapAroundError(fmt::format("profile_evolve: evolved mass near the box edge {:.3g}; enlarge the box",
                                      edge_fraction(out)));
  return out;
}

cplx gaussian_dispersion(double y, double t, double center, double width, double coeff) {
  const cplx s2 = width * width + 2.0 * I * coeff * t;
  const double d = y - center;
  return std::sqrt(width * width / s2) * std::exp(-d * d / (2.0 * s2));
}

double gaussian_dispersion_width(double t, double width, double coeff) {
  const double r = 2.0 * coeff * t / width;
  return std::sqrt(width * width + r * r);
}

GaussianProfile::GaussianProfile(double c2, double w2, double c4, double w4) : c2_(c2), w2_(w2), c4_(c4), w4_(w4) {
  if (!(w2 > 0.0 && w4 > 0.0)) throw std::invalid_argument("GaussianProfile widths must be > 0");
}

ProfileJet GaussianProfile::jet(double t, double y2, double y4, double kappa) const {
  const cplx s2 = w2_ * w2_ + 2.0 * I * kappa * t;
  const double d2 = y2 - c2_;
  const cplx g = std::sqrt(w2_ * w2_ / s2) * std::exp(-d2 * d2 / (2.0 * s2));
  const cplx g1 = -d2 / s2 * g;
  const cplx g2 = (d2 * d2 / (s2 * s2) - 1.0 / s2) * g;
  const double d4 = y4 - c4_;
  const double v4 = w4_ * w4_;
  const double h = std::exp(-d4 * d4 / (2.0 * v4));
  const double h1 = -d4 / v4 * h;
  const double h2 = (d4 * d4 / (v4 * v4) - 1.0 / v4) * h;
  return {g * h, g1 * h, g2 * h, g * h1, g1 * h1, g * h2, I * kappa * g2 * h};
}

double GaussianProfile::norm_squared() const { return M_PI * w2_ * w4_; }

ProfileShape GaussianProfile::shape(double t, double kappa) const {
  return {c2_, gaussian_dispersion_width(t, w2_, kappa) / std::sqrt(2.0), c4_, w4_ / std::sqrt(2.0)};
}

SpectralProfile::SpectralProfile(const ProfileState& a0, double c4, double w4) : a0_(a0), c4_(c4), w4_(w4) {
  if (!(w4 > 0.0)) throw std::invalid_argument("SpectralProfile: w4 must be > 0");
  if (a0.values.size() < 4) throw std::invalid_argument("SpectralProfile: grid too small");
  coeff_ = dft(a0.values, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(coeff_.size());
  for (auto& c : coeff_) c *= inv;
  k_ = wavenumbers(coeff_.size(), a0.dy);
}

ProfileJet SpectralProfile::jet(double t, double y2, double y4, double kappa) const {
  cplx g = 0.0, g1 = 0.0, g2 = 0.0;
  const double s = y2 - a0_.y0;
  for (std::size_t j = 0; j < k_.size(); ++j) {
    const double k = k_[j];
    const cplx e = coeff_[j] * std::polar(1.0, k * s - kappa * k * k * t);
    g += e;
    g1 += I * k * e;
    g2 -= k * k * e;
  }
  const double d4 = y4 - c4_;
  const double v4 = w4_ * w4_;
  const double h = std::exp(-d4 * d4 / (2.0 * v4));
  const double h1 = -d4 / v4 * h;
  const double h2 = (d4 * d4 / (v4 * v4) - 1.0 / v4) * h;
  return {g * h, g1 * h, g2 * h, g * h1, g1 * h1, g * h2, I * kappa * g2 * h};
}

double SpectralProfile::norm_squared() const { return a0_.mass() * std::sqrt(M_PI) * w4_; }

ProfileShape SpectralProfile::shape(double t, double kappa) const {
  const ProfileState a = profile_evolve(a0_, t, kappa, 1.0);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double d = std::norm(a.values[k]);
    m0 += d;
    m1 += d * a.y(k);
    m2 += d * a.y(k) * a.y(k);
  }
  const double c = m1 / m0;
  return {c, std::sqrt(std::max(m2 / m0 - c * c, 1e-12)), c4_, w4_ / std::sqrt(2.0)};
}

std::string to_string(AnsatzOrder o) {
  switch (o) {
    case AnsatzOrder::Leading: return "leading";
    case AnsatzOrder::WithSigma1: return "with_sigma1";
    case AnsatzOrder::WithSigma1And2: return "with_sigma1_and_2";
  }
  return "unknown";
}

struct WavePacket::Modes {
  SpectralGrid grid{1.0, 3};
  double mu = 0, speed = 0, kappa = 0, gap = 0, eigen_residual = 0;
  Vec phi, D;
  // phi, xi phi, D, then (mu - H)^{-1} P_perp r_k for k = 1..6
  std::array<Vec, 9> basis;
  // <r_k, phi> for k = 1..7
  std::array<double, 7> diag{};
  int lo = 0, hi = 0;
  double phi_mean = 0, phi_var = 0;
};

WavePacket::WavePacket(WavePacketSpec spec) : spec_(std::move(spec)) {
  validate(RepParam{Generic{spec_.delta0, spec_.beta0}});
  if (!(spec_.hbar > 0.0)) throw std::invalid_argument("WavePacket: hbar must be > 0");
  if (!spec_.profile) throw std::invalid_argument("WavePacket: missing profile");
  auto m = std::make_shared<Modes>();
  const Generic g{spec_.delta0, spec_.beta0};
  SolverOptions o;
  o.N = spec_.grid_N;
  o.L = spec_.grid_L;
  o.richardson = false;
  const auto sol = solve_level(g, spec_.n, o);
  const auto& op = sol.fine_op;
  m->grid = op.grid;
  m->phi = sol.level.phi;
  m->mu = sol.level.mu;
  m->speed = sol.dmu;
  m->kappa = 0.5 * sol.d2mu;
  m->D = sol.dphi;
  EigenOptions eo;
  eo.check_confinement = false;
  const auto pairs = eigen_lowest(op, spec_.n + 1, eo);
  m->gap = pairs[static_cast<std::size_t>(spec_.n)].mu - m->mu;
  if (spec_.n > 1) m->gap = std::min(m->gap, m->mu - pairs[static_cast<std::size_t>(spec_.n - 2)].mu);
  const double h = m->grid.h();
  Vec hphi = op.apply(m->phi);
  for (std::size_t k = 0; k < hphi.size(); ++k) hphi[k] -= m->mu * m->phi[k];
  m->eigen_residual = norm(hphi, h);

  const std::size_t N = m->phi.size();
  Vec xiphi(N), sv(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double xi = m->grid.node(static_cast<int>(k));
    xiphi[k] = xi * m->phi[k];
    sv[k] = g.beta + 0.5 * g.delta * xi * xi;
  }
  std::array<Vec, 7> r;
  r[0] = derivative4(xiphi, h);
  r[1] = derivative4(m->D, h);
  r[2] = Vec(N);
  r[3] = Vec(N);
  for (std::size_t k = 0; k < N; ++k) {
    r[2][k] = sv[k] * xiphi[k];
    r[3][k] = sv[k] * m->D[k];
  }
  r[4] = xiphi;
  r[5] = m->D;
  r[6] = m->phi;
  for (std::size_t k = 0; k < 7; ++k) m->diag[k] = inner(r[k], m->phi, h);
  m->basis[0] = m->phi;
  m->basis[1] = xiphi;
  m->basis[2] = m->D;
  for (std::size_t k = 0; k < 6; ++k) m->basis[3 + k] = reduced_resolvent_solve(op, sol.level, r[k], m->gap);

  double peak = 0.0;
  for (const auto& b : m->basis)
    for (double v : b) peak = std::max(peak, std::abs(v));
  m->lo = static_cast<int>(N);
  m->hi = -1;
  for (std::size_t k = 0; k < N; ++k) {
    double v = 0.0;
    for (const auto& b : m->basis) v = std::max(v, std::abs(b[k]));
    if (v > 1e-17 * peak) {
      m->lo = std::min(m->lo, static_cast<int>(k));
      m->hi = static_cast<int>(k);
    }
  }
  for (std::size_t k = 0; k < N; ++k) m->phi_mean += m->grid.node(static_cast<int>(k)) * m->phi[k] * m->phi[k] * h;
  for (std::size_t k = 0; k < N; ++k)
    m->phi_var += std::pow(m->grid.node(static_cast<int>(k)) - m->phi_mean, 2) * m->phi[k] * m->phi[k] * h;
  modes_ = std::move(m);
}

WavePacket::WavePacket(WavePacketSpec spec, std::shared_ptr<const Modes> modes)
    : spec_(std::move(spec)), modes_(std::move(modes)) {}

WavePacket WavePacket::with_hbar(double hbar) const {
  if (!(hbar > 0.0)) throw std::invalid_argument("WavePacket: hbar must be > 0");
  WavePacketSpec s = spec_;
  s.hbar = hbar;
  return WavePacket(std::move(s), modes_);
}

WavePacket WavePacket::with_x0(const GroupElement& x0) const {
  WavePacketSpec s = spec_;
  s.x0 = x0;
  return WavePacket(std::move(s), modes_);
}

const SpectralGrid& WavePacket::grid() const { return modes_->grid; }
const Vec& WavePacket::phi1() const { return modes_->phi; }
const Vec& WavePacket::dphi() const { return modes_->D; }
double WavePacket::mu() const { return modes_->mu; }
double WavePacket::speed() const { return modes_->speed; }
double WavePacket::kappa() const { return modes_->kappa; }
double WavePacket::gap() const { return modes_->gap; }
double WavePacket::eigen_residual() const { return modes_->eigen_residual; }

PhaseAndCenter WavePacket::phase_center(double t) const {
  return {-modes_->mu * t, multiply(spec_.x0, exp_generator(2, modes_->speed * t))};
}

GroupElement WavePacket::scaled_coordinates(double t, const GroupElement& x) const {
  const GroupElement z = multiply(inverse(phase_center(t).center), x);
  return dilate(1.0 / std::sqrt(spec_.hbar), z);
}

ProfileJet WavePacket::profile_jet(double t, const GroupElement& y) const {
  return spec_.profile->jet(t, y.x2, y.x4, modes_->kappa);
}

CVec WavePacket::sigma1(const ProfileJet& a, const GroupElement& y) const {
  const double p = -0.5 * (y.x3 + y.x1 * y.x2);
  const auto& m = *modes_;
  CVec out(m.phi.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -p * a.A4 * m.basis[1][k] - I * a.A2 * m.D[k];
  return out;
}

namespace {

std::array<cplx, 7> sigma2_coefficients(const ProfileJet& a, const GroupElement& y, double c) {
  const double p = -0.5 * (y.x3 + y.x1 * y.x2);
  return {2.0 * p * p * a.A44,
          2.0 * I * p * a.A24,
          2.0 * I * (p * a.A24 - 0.5 * y.x1 * a.A4),
          -2.0 * a.A22,
          -I * c * p * a.A24,
          c * a.A22,
          -(p * p * a.A44 + a.A22 + I * a.At)};
}

}  // namespace

Sigma2 WavePacket::sigma2(const ProfileJet& a, const GroupElement& y) const {
  const auto& m = *modes_;
  const auto q = sigma2_coefficients(a, y, m.speed);
  Sigma2 out{CVec(m.phi.size(), cplx{}), 0.0};
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t k = 0; k < out.vector.size(); ++k) out.vector[k] += q[j] * m.basis[3 + j][k];
  cplx d = 0.0;
  for (std::size_t j = 0; j < 7; ++j) d += q[j] * m.diag[j];
  out.diagonal = std::abs(d);
  return out;
}

std::array<cplx, 3> WavePacket::values(double t, const GroupElement& x) const {
  const auto& m = *modes_;
  const double hb = spec_.hbar;
  const GroupElement xp = multiply(inverse(spec_.x0), x);
  const GroupElement w = dilate(1.0 / hb, xp);
  const GroupElement y = dilate(1.0 / std::sqrt(hb), multiply(exp_generator(2, -m.speed * t), xp));
  const ProfileJet a = profile_jet(t, y);
  const double p = -0.5 * (y.x3 + y.x1 * y.x2);
  const auto q = sigma2_coefficients(a, y, m.speed);

  const double delta = spec_.delta0, beta = spec_.beta0;
  const double c2 = spec_.phi2.center, s2 = spec_.phi2.width;
  const double h = m.grid.h();
  const double lo_eta = std::max(m.grid.node(m.lo), w.x1 + c2 - 9.0 * s2);
  const double hi_eta = std::min(m.grid.node(m.hi), w.x1 + c2 + 9.0 * s2);
  std::array<cplx, 9> T{};
  if (hi_eta >= lo_eta) {
    const int k0 = std::max(m.lo, static_cast<int>(std::ceil((lo_eta + m.grid.L()) / h)));
    const int k1 = std::min(m.hi, static_cast<int>(std::floor((hi_eta + m.grid.L()) / h)));
    for (int k = k0; k <= k1; ++k) {
      const double eta = m.grid.node(k);
      const double theta = delta * eta * w.x3 + (beta + 0.5 * delta * eta * eta) * w.x2;
      const cplx e = std::polar(spec_.phi2(eta - w.x1), theta);
      const auto u = static_cast<std::size_t>(k);
      for (std::size_t j = 0; j < 9; ++j) T[j] += e * m.basis[j][u];
    }
  }
  const cplx lead = a.A * T[0];
  const cplx s1 = -p * a.A4 * T[1] - I * a.A2 * T[2];
  cplx s2sum = 0.0;
  for (std::size_t j = 0; j < 6; ++j) s2sum += q[j] * T[3 + j];
  const cplx pref = std::pow(hb, -1.75) * h * std::polar(1.0, delta * (w.x4 - 0.5 * w.x1 * w.x3) - m.mu * t / hb);
  const cplx v0 = pref * lead;
  const cplx v1 = v0 + pref * std::sqrt(hb) * s1;
  const cplx v2 = v1 + pref * hb * s2sum;
  return {v0, v1, v2};
}

cplx WavePacket::value(AnsatzOrder order, double t, const GroupElement& x) const {
  return values(t, x)[static_cast<std::size_t>(order)];
}

cplx build_wavepacket(const WavePacket& wp, const GroupElement& x) {
  const auto& s = wp.spec();
  const GroupElement xp = multiply(inverse(s.x0), x);
  const GroupElement y = dilate(1.0 / std::sqrt(s.hbar), xp);
  const cplx a = s.profile->jet(0.0, y.x2, y.x4, wp.kappa()).A;
  const GaussianVector phi2 = s.phi2;
  const cplx coef = matrix_coefficient_shifted(Generic{s.delta0, s.beta0}, dilate(1.0 / s.hbar, xp), wp.grid(),
                                               to_complex(wp.phi1()), [&](double e) { return cplx(phi2(e)); });
  return std::pow(s.hbar, -1.75) * a * coef;
}

cplx ansatz_value(const WavePacket& wp, AnsatzOrder order, double t, const GroupElement& x) {
  return wp.value(order, t, x);
}

CVec corrector_sigma1(const WavePacket& wp, double t, const GroupElement& x) {
  const GroupElement y = wp.scaled_coordinates(t, x);
  return wp.sigma1(wp.profile_jet(t, y), y);
}

Sigma2 corrector_sigma2(const WavePacket& wp, double t, const GroupElement& x, double threshold) {
  const GroupElement y = wp.scaled_coordinates(t, x);
  Sigma2 s = wp.sigma2(wp.profile_jet(t, y), y);
  if (s.diagonal > threshold)
    throw ProfileConsistencyError(
        fmt::format("sigma2: diagonal part {:.3g} exceeds {:.3g}; the profile does not solve the effective equation",
                    s.diagonal, threshold));
  return s;
}

double leading_norm_squared(const WavePacket& wp) {
  const auto& s = wp.spec();
  const double phi = std::pow(norm(wp.phi1(), wp.grid().h()), 2);
  return std::pow(s.hbar, 1.5) * (2.0 * M_PI / std::abs(s.delta0)) * s.profile->norm_squared() * phi;
}


namespace {

struct Sample {
  GroupElement x;
  double inv_q;  // 1 / proposal density at x
};

using Draw = std::array<double, 4>;

double std_normal(std::mt19937_64& rng, std::normal_distribution<double>& z) {
  for (;;) {
    const double v = z(rng);
    if (std::abs(v) <= 8.0) return v;
  }
}

std::vector<Draw> draw_normals(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<Draw> d(static_cast<std::size_t>(n));
  for (auto& s : d)
    for (double& v : s) v = std_normal(rng, z);
  return d;
}

// Proposal in x' = x0^{-1} x: w1 = x1'/hbar, x2', w3 = x3'/hbar^2 given (w1, w2), y4 = x4'/hbar^{3/2}.
// w3 is centred on the stationary point of the chirp in the eta integral.
struct Sampler {
  double hbar, delta;
  double m_a, v_a, v_b, c_b;
  double x2_center, x2_std;
  double c4, s4;

  Sample operator()(const GroupElement& x0, const Draw& z) const {
    const double tau1 = 1.5 * std::sqrt(v_a + v_b);
    const double w1 = m_a - c_b + tau1 * z[0];
    const double x2 = x2_center + x2_std * z[1];
    const double w2 = x2 / hbar;
    const double eta = (m_a * v_b + (w1 + c_b) * v_a) / (v_a + v_b);
    const double sf2 = v_a * v_b / (v_a + v_b);
    const double tau3 = 1.5 * std::sqrt(w2 * w2 * sf2 + 1.0 / (delta * delta * sf2));
    const double w3 = -w2 * eta + tau3 * z[2];
    const double y4 = c4 + s4 * z[3];
    const GroupElement xp{hbar * w1, x2, hbar * hbar * w3, std::pow(hbar, 1.5) * y4};
    const double zz = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3];
    const double inv_q =
        std::pow(hbar, 4.5) * tau1 * x2_std * tau3 * s4 * 4.0 * M_PI * M_PI * std::exp(0.5 * zz);
    return {multiply(x0, xp), inv_q};
  }
};

Sampler make_sampler(const WavePacket& wp, double t, double x2_center, double x2_std) {
  const auto& s = wp.spec();
  const auto& phi = wp.phi1();
  const auto& g = wp.grid();
  double m = 0.0, v = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) m += g.node(static_cast<int>(k)) * phi[k] * phi[k] * g.h();
  for (std::size_t k = 0; k < phi.size(); ++k)
    v += std::pow(g.node(static_cast<int>(k)) - m, 2) * phi[k] * phi[k] * g.h();
  const auto sh = s.profile->shape(t, wp.kappa());
  return {s.hbar,  s.delta0, m, v, 0.5 * s.phi2.width * s.phi2.width, s.phi2.center, x2_center, x2_std,
          sh.c4,   1.4 * sh.s4};
}

Sampler default_sampler(const WavePacket& wp, double t) {
  const auto sh = wp.spec().profile->shape(t, wp.kappa());
  const double rh = std::sqrt(wp.spec().hbar);
  return make_sampler(wp, t, wp.speed() * t + rh * sh.c2, 1.4 * rh * sh.s2);
}

// Ratio sum(a)/sum(b) and its delta-method standard error.
std::pair<double, double> ratio_estimate(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  const double r = ma / mb;
  double var = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) var += std::pow(a[i] - r * b[i], 2);
  var /= (n - 1.0);
  return {r, std::sqrt(var / n) / mb};
}

std::pair<double, double> mean_estimate(const std::vector<double>& b) {
  const double n = static_cast<double>(b.size());
  double m = 0.0, v = 0.0;
  for (double x : b) m += x;
  m /= n;
  for (double x : b) v += (x - m) * (x - m);
  return {m, std::sqrt(v / (n - 1.0) / n)};
}

}  // namespace

std::array<ResidualEstimate, 3> residual_all_orders(const WavePacket& wp, double t, const ResidualOptions& opts) {
  if (opts.samples < 2) throw std::invalid_argument("residual: need at least 2 samples");
  const double hb = wp.spec().hbar;
  const double h = opts.fd_eps * std::sqrt(hb);
  if (!(h > 0.0) || h > std::pow(hb, 1.5) / 10.0)
    throw std::invalid_argument(
        fmt::format("residual: finite-difference step {:.3g} exceeds hbar^(3/2)/10 = {:.3g}", h, std::pow(hb, 1.5) / 10));
  const double dt = opts.dt_factor * hb;
  const Sampler sampler = default_sampler(wp, t);
  const auto draws = draw_normals(opts.samples, opts.seed);
  const auto n = static_cast<std::size_t>(opts.samples);
  std::array<std::vector<double>, 3> a, b;
  for (std::size_t o = 0; o < 3; ++o) {
    a[o].resize(n);
    b[o].resize(n);
  }
  const GroupElement e1p = exp_generator(1, h), e1m = exp_generator(1, -h);
  const GroupElement e2p = exp_generator(2, h), e2m = exp_generator(2, -h);
  const GroupElement x0 = wp.spec().x0;
  parallel_for(n, [&](std::size_t i) {
    const Sample s = sampler(x0, draws[i]);
    const auto v = wp.values(t, s.x);
    const auto vp = wp.values(t + dt, s.x), vm = wp.values(t - dt, s.x);
    const auto v1p = wp.values(t, multiply(s.x, e1p)), v1m = wp.values(t, multiply(s.x, e1m));
    const auto v2p = wp.values(t, multiply(s.x, e2p)), v2m = wp.values(t, multiply(s.x, e2m));
    for (std::size_t o = 0; o < 3; ++o) {
      const cplx r = I * hb * (vp[o] - vm[o]) / (2.0 * dt) +
                     hb * hb * ((v1p[o] - 2.0 * v[o] + v1m[o]) + (v2p[o] - 2.0 * v[o] + v2m[o])) / (h * h);
      a[o][i] = std::norm(r) * s.inv_q;
      b[o][i] = std::norm(v[o]) * s.inv_q;
    }
  });
  std::array<ResidualEstimate, 3> out;
  for (std::size_t o = 0; o < 3; ++o) {
    const auto [r2, r2_err] = ratio_estimate(a[o], b[o]);
    const auto [nb, nb_err] = mean_estimate(b[o]);
    const double r = std::sqrt(std::max(r2, 0.0));
    out[o] = {static_cast<AnsatzOrder>(o), hb, r, r > 0.0 ? r2_err / (2.0 * r) : 0.0, nb, nb_err, opts.samples};
  }
  return out;
}

ResidualEstimate residual(const WavePacket& wp, AnsatzOrder order, double t, const ResidualOptions& opts) {
  return residual_all_orders(wp, t, opts)[static_cast<std::size_t>(order)];
}

std::pair<double, double> norm_squared_estimate(const WavePacket& wp, AnsatzOrder order, double t, int samples,
                                                std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("norm_squared_estimate: need at least 2 samples");
  const Sampler sampler = default_sampler(wp, t);
  const auto draws = draw_normals(samples, seed);
  std::vector<double> b(static_cast<std::size_t>(samples));
  parallel_for(b.size(), [&](std::size_t i) {
    const Sample s = sampler(wp.spec().x0, draws[i]);
    b[i] = std::norm(wp.value(order, t, s.x)) * s.inv_q;
  });
  return mean_estimate(b);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["hbars"] = hbars;
  for (std::size_t o = 0; o < 3; ++o) {
    nlohmann::json rj;
    rj["slope"] = slopes[o];
    for (const auto& e : rows[o])
      rj["rows"].push_back({{"hbar", e.hbar},
                            {"residual", e.residual},
                            {"sampling_error", e.sampling_error},
                            {"psi_norm_squared", e.psi_norm_squared},
                            {"psi_norm_error", e.psi_norm_error},
                            {"samples", e.samples}});
    j["orders"][to_string(static_cast<AnsatzOrder>(o))] = rj;
  }
  return j;
}

ScalingReport residual_scaling_experiment(const WavePacketSpec& spec, const std::vector<double>& hbars, double t,
                                          const ResidualOptions& opts) {
  if (hbars.size() < 4) throw std::invalid_argument("residual_scaling_experiment: need four or more hbar values");
  const WavePacket base(spec);
  ScalingReport r;
  r.t = t;
  r.hbars = hbars;
  for (double hb : hbars) {
    const auto est = residual_all_orders(base.with_hbar(hb), t, opts);
    for (std::size_t o = 0; o < 3; ++o) r.rows[o].push_back(est[o]);
  }
  for (std::size_t o = 0; o < 3; ++o) {
    std::vector<double> y;
    for (const auto& e : r.rows[o]) y.push_back(e.residual);
    r.slopes[o] = loglog_slope(hbars, y);
  }
  return r;
}

void write_scaling_csv(std::ostream& os, const ScalingReport& r, AnsatzOrder order) {
  os << "hbar,residual,sampling_error\n";
  for (const auto& e : r.rows[static_cast<std::size_t>(order)])
    os << fmt::format("{:.17g},{:.17g},{:.17g}\n", e.hbar, e.residual, e.sampling_error);
}

nlohmann::json TransportReport::to_json() const {
  nlohmann::json j;
  j["speed"] = speed;
  j["drift_relative_error"] = drift_relative_error;
  j["stationary_error"] = stationary_error;
  for (const auto& r : rows)
    j["rows"].push_back({{"hbar", r.hbar},
                         {"t", r.t},
                         {"centroid_x2", r.centroid},
                         {"predicted_x2", r.predicted},
                         {"sampling_error", r.sampling_error},
                         {"width", r.width}});
  return j;
}

TransportReport transport_demo(const WavePacketSpec& spec, double t, const std::vector<double>& hbars, int samples,
                               std::uint64_t seed, int time_points) {
  if (hbars.empty()) throw std::invalid_argument("transport_demo: empty hbar list");
  if (samples < 4 || time_points < 1) throw std::invalid_argument("transport_demo: bad sample or time counts");
  const WavePacket base(spec);
  TransportReport rep;
  rep.speed = base.speed();
  const auto pairs = static_cast<std::size_t>(samples / 2);
  const auto draws = draw_normals(static_cast<int>(pairs), seed);
  const double x02 = spec.x0.x2;
  for (double hb : hbars) {
    const WavePacket wp = base.with_hbar(hb);
    for (int j = 0; j < time_points; ++j) {
      const double tj = time_points == 1 ? t : t * j / (time_points - 1);
      const auto sh = spec.profile->shape(tj, wp.kappa());
      const double rh = std::sqrt(hb);
      const double ct = wp.speed() * tj;
      const Sampler sampler = make_sampler(wp, tj, 0.5 * ct + rh * sh.c2, 0.5 * std::abs(ct) + 2.0 * rh * sh.s2);
      std::vector<double> bw(pairs), bx(pairs), bxx(pairs);
      parallel_for(pairs, [&](std::size_t i) {
        Draw z = draws[i];
        double w = 0.0, wx = 0.0, wxx = 0.0;
        for (int sign : {1, -1}) {
          z[1] = sign * draws[i][1];
          const Sample s = sampler(spec.x0, z);
          const double b = std::norm(wp.value(AnsatzOrder::WithSigma1And2, tj, s.x)) * s.inv_q;
          const double x = s.x.x2 - x02;
          w += 0.5 * b;
          wx += 0.5 * b * x;
          wxx += 0.5 * b * x * x;
        }
        bw[i] = w;
        bx[i] = wx;
        bxx[i] = wxx;
      });
      const auto [c, c_err] = ratio_estimate(bx, bw);
      const auto [m2, m2_err] = ratio_estimate(bxx, bw);
      (void)m2_err;
      rep.rows.push_back({hb, tj, x02 + c, x02 + ct, c_err, std::sqrt(std::max(m2 - c * c, 0.0))});
    }
  }
  const double hmin = *std::min_element(hbars.begin(), hbars.end());
  const TransportRow* last = nullptr;
  for (const auto& r : rep.rows)
    if (r.hbar == hmin) last = &r;
  const double ct = rep.speed * last->t;
  const double drift = last->centroid - x02;
  rep.drift_relative_error =
      std::abs(ct) > 1e-12 ? std::abs(drift - ct) / std::abs(ct) : std::numeric_limits<double>::quiet_NaN();
  rep.stationary_error = std::abs(drift) / last->width;
  return rep;
}

void write_transport_csv(std::ostream& os, const TransportReport& r) {
  os << "t,centroid_x2,predicted_x2,hbar,sampling_error\n";
  for (const auto& row : r.rows)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", row.t, row.centroid, row.predicted, row.hbar,
                      row.sampling_error);
}

nlohmann::json SecondMicrolocalDemo::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["nu0"] = nu0;
  j["curvature"] = curvature;
  j["coeff"] = coeff;
  j["deltas"] = deltas;
  j["cone_second_derivatives"] = cone_second_derivatives;
  j["max_coefficient_deviation"] = max_coefficient_deviation;
  j["times"] = times;
  j["max_mass_drift"] = max_mass_drift;
  if (std::isnan(max_gaussian_deviation))
    j["max_gaussian_deviation"] = nullptr;
  else
    j["max_gaussian_deviation"] = max_gaussian_deviation;
  return j;
}

SecondMicrolocalDemo second_microlocal_profile_demo(int n, double nu0, const ProfileState& phi, double t,
                                                    int time_points, const std::vector<double>& deltas,
                                                    double gaussian_center, double gaussian_width) {
  if (time_points < 1) throw std::invalid_argument("second_microlocal_profile_demo: time_points must be >= 1");
  if (phi.values.empty()) throw std::invalid_argument("second_microlocal_profile_demo: empty profile grid");
  const double slope = montgomery_derivative(nu0, n);
  if (std::abs(slope) > 1e-6)
    throw std::invalid_argument(
        fmt::format("second_microlocal_profile_demo: nu0 = {} is not a critical point of mode {} (mu' = {:.3g})", nu0, n,
                    slope));
  SecondMicrolocalDemo d;
  d.n = n;
  d.nu0 = nu0;
  const auto cc = curvature_consistency(n, nu0, deltas);
  d.curvature = cc.reference;
  d.coeff = 0.5 * cc.reference;
  d.deltas = cc.deltas;
  d.cone_second_derivatives = cc.second_differences;
  d.max_coefficient_deviation = 0.0;
  for (double s : cc.second_differences)
    d.max_coefficient_deviation = std::max(d.max_coefficient_deviation, std::abs(0.5 * s - d.coeff));
  d.grid = phi;
  d.grid.values.clear();
  const double m0 = phi.mass();
  d.max_mass_drift = 0.0;
  d.max_gaussian_deviation = gaussian_width > 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < time_points; ++j) {
    const double tj = time_points == 1 ? t : t * j / (time_points - 1);
    const ProfileState a = profile_evolve(phi, tj, d.coeff);
    d.times.push_back(tj);
    Vec dens(a.values.size());
    for (std::size_t k = 0; k < dens.size(); ++k) dens[k] = std::norm(a.values[k]);
    d.densities.push_back(std::move(dens));
    d.max_mass_drift = std::max(d.max_mass_drift, std::abs(a.mass() - m0) / m0);
    if (gaussian_width > 0.0)
      for (std::size_t k = 0; k < a.values.size(); ++k)
        d.max_gaussian_deviation =
            std::max(d.max_gaussian_deviation,
                     std::abs(a.values[k] - gaussian_dispersion(a.y(k), tj, gaussian_center, gaussian_width, d.coeff)));
  }
  return d;
}

void write_density_csv(std::ostream& os, const SecondMicrolocalDemo& d) {
  os << "x2";
  for (std::size_t j = 0; j < d.times.size(); ++j) os << fmt::format(",density_t{:.17g}", d.times[j]);
  os << '\n';
  if (d.densities.empty()) return;
  for (std::size_t k = 0; k < d.densities[0].size(); ++k) {
    os << fmt::format("{:.17g}", d.grid.y(k));
    for (const auto& dens : d.densities) os << fmt::format(",{:.17g}", dens[k]);
    os << '\n';
  }
}

}  // namespace engel

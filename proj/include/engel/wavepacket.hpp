#pragma once

// Wave-packet ansatz with first and second correctors, the effective profile flow, the Schrodinger
// residual and its hbar-scaling, transport of the centre along X2 and the 1-D second-microlocal demo.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "engel/algebra.hpp"
#include "engel/fourier.hpp"
#include "engel/spectral.hpp"
#include "json.hpp"

namespace engel {

class WrapAroundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProfileConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complex function on a uniform periodic grid y_k = y0 + k dy, k < values.size().
struct ProfileState {
  double y0 = 0.0;
  double dy = 1.0;
  CVec values;
  double t = 0.0;

  double y(std::size_t k) const { return y0 + dy * static_cast<double>(k); }
  double mass() const;  // sum |a|^2 dy
};

ProfileState sample_profile(const std::function<cplx(double)>& f, double y_min, double y_max, int points);

// Exact solution of i a_t + coeff a_yy = 0 on the periodic grid (discrete Fourier multiplier).
// Throws WrapAroundError if the outer 5% of the box holds more than wrap_tol of the mass.
ProfileState profile_evolve(const ProfileState& a0, double t, double coeff, double wrap_tol = 1e-8);

// Closed-form evolution of exp(-(y - c)^2 / (2 w^2)) under the same equation, and its width
// sqrt(w^2 + (2 coeff t / w)^2).
cplx gaussian_dispersion(double y, double t, double center, double width, double coeff);
double gaussian_dispersion_width(double t, double width, double coeff);

// Profile a(t, y2, y4) and the derivatives entering the correctors; subscripts are y-derivatives.
struct ProfileJet {
  cplx A, A2, A22, A4, A24, A44, At;
};

// Centres and standard deviations of the y2 and y4 marginals of |a(t)|^2.
struct ProfileShape {
  double c2, s2, c4, s4;
};

class Profile {
 public:
  virtual ~Profile() = default;
  // a solves i a_t + kappa a_{y2 y2} = 0.
  virtual ProfileJet jet(double t, double y2, double y4, double kappa) const = 0;
  virtual double norm_squared() const = 0;
  virtual ProfileShape shape(double t, double kappa) const = 0;
};

// exp(-(y2 - c2)^2 / (2 w2^2)) exp(-(y4 - c4)^2 / (2 w4^2)) at t = 0.
class GaussianProfile : public Profile {
 public:
  GaussianProfile(double c2 = 0.0, double w2 = 1.0, double c4 = 0.0, double w4 = 1.0);
  ProfileJet jet(double t, double y2, double y4, double kappa) const override;
  double norm_squared() const override;
  ProfileShape shape(double t, double kappa) const override;

 private:
  double c2_, w2_, c4_, w4_;
};

// Periodic grid profile in y2 (evaluated by trigonometric interpolation) times a Gaussian in y4.
class SpectralProfile : public Profile {
 public:
  SpectralProfile(const ProfileState& a0, double c4 = 0.0, double w4 = 1.0);
  ProfileJet jet(double t, double y2, double y4, double kappa) const override;
  double norm_squared() const override;
  ProfileShape shape(double t, double kappa) const override;

 private:
  ProfileState a0_;
  std::vector<double> k_;
  CVec coeff_;
  double c4_, w4_;
};

enum class AnsatzOrder { Leading, WithSigma1, WithSigma1And2 };
std::string to_string(AnsatzOrder o);

struct WavePacketSpec {
  GroupElement x0{};
  double delta0 = 1.0;
  double beta0 = 0.5;
  int n = 1;
  std::shared_ptr<const Profile> profile = std::make_shared<GaussianProfile>();
  GaussianVector phi2{0.3, 1.0};
  double hbar = 0.1;
  int grid_N = 4096;
  double grid_L = 0.0;  // 0 selects auto_grid
};

// S(t) = -mu t and x(t) = x0 Exp(dmu t X2).
struct PhaseAndCenter {
  double S;
  GroupElement center;
};

struct Sigma2 {
  CVec vector;
  double diagonal;  // |<R Phi1, Phi1>|, zero when the profile equation holds
};

class WavePacket {
 public:
  explicit WavePacket(WavePacketSpec spec);

  const WavePacketSpec& spec() const { return spec_; }
  WavePacket with_hbar(double hbar) const;
  WavePacket with_x0(const GroupElement& x0) const;

  // Discrete eigen data on the packet grid.
  const SpectralGrid& grid() const;
  const Vec& phi1() const;
  const Vec& dphi() const;
  double mu() const;
  double speed() const;  // d mu / d beta
  double kappa() const;  // (1/2) d^2 mu / d beta^2
  double gap() const;
  double eigen_residual() const;  // || H phi1 - mu phi1 ||

  PhaseAndCenter phase_center(double t) const;
  // y = hbar^{-1/2} . (x(t)^{-1} x)
  GroupElement scaled_coordinates(double t, const GroupElement& x) const;
  ProfileJet profile_jet(double t, const GroupElement& y) const;

  CVec sigma1(const ProfileJet& a, const GroupElement& y) const;
  Sigma2 sigma2(const ProfileJet& a, const GroupElement& y) const;

  // Ansatz values for the three truncation orders.
  std::array<cplx, 3> values(double t, const GroupElement& x) const;
  cplx value(AnsatzOrder order, double t, const GroupElement& x) const;

  struct Modes;

 private:
  WavePacket(WavePacketSpec spec, std::shared_ptr<const Modes> modes);
  WavePacketSpec spec_;
  std::shared_ptr<const Modes> modes_;
};

// hbar^{-7/4} a0(hbar^{-1/2} . (x0^{-1} x)) <pi(hbar^{-1} . (x0^{-1} x)) Phi1, Phi2>.
cplx build_wavepacket(const WavePacket& wp, const GroupElement& x);
cplx ansatz_value(const WavePacket& wp, AnsatzOrder order, double t, const GroupElement& x);
CVec corrector_sigma1(const WavePacket& wp, double t, const GroupElement& x);
Sigma2 corrector_sigma2(const WavePacket& wp, double t, const GroupElement& x, double threshold = 1e-6);

// Exact ||psi_leading(t)||^2 = hbar^{3/2} (2 pi / |delta|) ||a||^2 ||Phi1||^2 ||Phi2||^2.
double leading_norm_squared(const WavePacket& wp);

struct ResidualOptions {
  int samples = 10000;
  double fd_eps = 1e-4;     // X_i step eps * hbar^{1/2}
  double dt_factor = 1e-4;  // time step dt_factor * hbar
  std::uint64_t seed = 1;
};

struct ResidualEstimate {
  AnsatzOrder order;
  double hbar;
  double residual;        // ||i hbar psi_t + hbar^2 Delta psi|| / ||psi||
  double sampling_error;  // one standard error
  double psi_norm_squared;
  double psi_norm_error;
  int samples;
};

// One Monte Carlo pass shared by the three orders.
std::array<ResidualEstimate, 3> residual_all_orders(const WavePacket& wp, double t, const ResidualOptions& opts = {});
ResidualEstimate residual(const WavePacket& wp, AnsatzOrder order, double t, const ResidualOptions& opts = {});

// Monte Carlo estimate of ||psi(t)||^2 for the given order.
std::pair<double, double> norm_squared_estimate(const WavePacket& wp, AnsatzOrder order, double t, int samples,
                                                std::uint64_t seed);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingReport {
  double t;
  std::vector<double> hbars;
  std::array<std::vector<ResidualEstimate>, 3> rows;
  std::array<double, 3> slopes;
  nlohmann::json to_json() const;
};

ScalingReport residual_scaling_experiment(const WavePacketSpec& spec, const std::vector<double>& hbars, double t,
                                          const ResidualOptions& opts = {});
void write_scaling_csv(std::ostream& os, const ScalingReport& r, AnsatzOrder order);

struct TransportRow {
  double hbar;
  double t;
  double centroid;
  double predicted;
  double sampling_error;
  double width;  // x2 standard deviation of |psi|^2
};

struct TransportReport {
  double speed;
  std::vector<TransportRow> rows;
  // At the final time: |centroid drift - speed t| / |speed t| for the smallest hbar (generic case),
  // and |centroid - x0_2| / width (critical case).
  double drift_relative_error;
  double stationary_error;
  nlohmann::json to_json() const;
};

TransportReport transport_demo(const WavePacketSpec& spec, double t, const std::vector<double>& hbars,
                               int samples = 20000, std::uint64_t seed = 1, int time_points = 5);
void write_transport_csv(std::ostream& os, const TransportReport& r);

struct SecondMicrolocalDemo {
  int n;
  double nu0;
  double curvature;  // mu~_n''(nu0)
  double coeff;      // curvature / 2
  std::vector<double> deltas;
  std::vector<double> cone_second_derivatives;
  double max_coefficient_deviation;  // max |d_beta^2 mu_n / 2 - coeff| on the cone
  std::vector<double> times;
  ProfileState grid;  // y grid of the densities
  std::vector<Vec> densities;
  double max_mass_drift;
  double max_gaussian_deviation;  // vs the closed form; NaN when phi is not the default Gaussian
  nlohmann::json to_json() const;
};

// Evolves phi with coefficient mu~_n''(nu0)/2 and checks the coefficient on the cone beta = nu0 delta^{1/3}.
// With gaussian_width > 0, phi is taken to be exp(-(y - gaussian_center)^2 / (2 w^2)) and compared.
SecondMicrolocalDemo second_microlocal_profile_demo(int n, double nu0, const ProfileState& phi, double t,
                                                    int time_points = 5,
                                                    const std::vector<double>& deltas = {0.5, 1.0, 2.0},
                                                    double gaussian_center = 0.0, double gaussian_width = 0.0);
void write_density_csv(std::ostream& os, const SecondMicrolocalDemo& d);

}  // namespace engel

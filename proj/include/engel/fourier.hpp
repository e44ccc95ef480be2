#pragma once

// Unitary dual on grid vectors: representations, matrix coefficients, group Fourier transform of
// product-Gaussian kernels, Plancherel calibration and the difference-operator identities.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "engel/algebra.hpp"
#include "engel/rep_param.hpp"
#include "engel/spectral.hpp"
#include "json.hpp"

namespace engel {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

class GridMarginError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TailMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CVec to_complex(const Vec& v);
// <u, v> = sum u conj(v) h
cplx inner(const CVec& u, const CVec& v, double h);
double norm(const CVec& u, double h);

// Value of phi at xi by cubic Lagrange interpolation (zero outside the grid).
cplx interpolate_cubic(const SpectralGrid& grid, const CVec& phi, double xi);

CVec rep_apply(const RepParam& p, const GroupElement& x, const SpectralGrid& grid, const CVec& phi);

// pi(X_i) on the grid: optional central-difference derivative plus a diagonal multiplier.
struct GridOperator {
  double h;
  bool derivative = false;
  CVec diagonal;  // empty means zero
  CVec apply(const CVec& u) const;
};

GridOperator infinitesimal(const RepParam& p, int i, const SpectralGrid& grid);

cplx matrix_coefficient(const RepParam& p, const GroupElement& x, const SpectralGrid& grid, const CVec& phi1,
                        const CVec& phi2);

// <pi(x) u, phi2> with the shift moved onto an analytic phi2: no interpolation of u.
cplx matrix_coefficient_shifted(const Generic& p, const GroupElement& x, const SpectralGrid& grid, const CVec& u,
                                const std::function<cplx(double)>& phi2);

// L2-normalized Gaussian test vector pi^{-1/4} s^{-1/2} exp(-(xi - c)^2 / (2 s^2)).
struct GaussianVector {
  double center = 0.0;
  double width = 1.0;
  double operator()(double xi) const;
  CVec sample(const SpectralGrid& grid) const;
};

// One term w * prod_i (-x_i)^{m_i} exp(-(x_i - c_i)^2 / (2 w_i^2)).
struct GaussianKernelSpec {
  std::array<double, 4> center{0, 0, 0, 0};
  std::array<double, 4> width{1, 1, 1, 1};
  std::array<int, 4> moment{0, 0, 0, 0};
  double weight = 1.0;
};

using KernelFunction = std::vector<GaussianKernelSpec>;

void validate(const GaussianKernelSpec& k);
double kernel_value(const KernelFunction& k, const GroupElement& x);
double l1_norm(const KernelFunction& k);          // triangle bound for sums; exact for one positive term
double l2_norm_squared(const KernelFunction& k);  // closed form
// r-dilate x -> r^{-7} kappa(r^{-1} . x); its squared L2 norm is r^{-7} times the original.
GaussianKernelSpec dilate_kernel(const GaussianKernelSpec& k, double r);
// Multiply every term by (-x_i).
KernelFunction times_minus_coordinate(const KernelFunction& k, int i);

// 1-D factor int (-s)^m exp(-(s - c)^2 / (2 w^2)) e^{-i k s} ds, m <= 2.
cplx gaussian_fourier_factor(double c, double w, int m, double k);

// Fourier transform as an integral kernel K(xi, eta), (F kappa(pi) phi)(xi) = int K(xi, eta) phi(eta) d eta,
// with x_1 = xi - eta.
struct OperatorKernel {
  SpectralGrid grid;
  Eigen::MatrixXcd K;

  CVec apply(const CVec& u) const;
  double hs_norm() const;
  double operator_norm() const;
  // Discrete operator matrix (quadrature weight included).
  Eigen::MatrixXcd matrix() const { return K * grid.h(); }
};

// Throws GridMarginError when the kernel has mass on the boundary rows or columns, unless check_margin is false.
OperatorKernel fourier_gaussian(const KernelFunction& k, const Generic& p, const SpectralGrid& grid,
                                bool check_margin = true);

// ||F kappa(pi)||_HS^2 for a single term, from the factorized kernel.
double hs_norm_squared(const GaussianKernelSpec& k, const Generic& p, const SpectralGrid& grid);

struct PlancherelBox {
  double delta_min = 0.2;
  double delta_max = 4.0;
  double beta_max = 30.0;
  int n_delta = 121;
  double beta_step = 0.2;
};

struct PlancherelReport {
  std::vector<GaussianKernelSpec> kernels;
  std::vector<double> c_estimates;
  std::vector<double> excluded_center_fraction;
  double mean = 0.0;
  double relative_spread = 0.0;
  PlancherelBox box;
  double tail_estimate = 0.0;
  nlohmann::json to_json() const;
};

PlancherelReport plancherel_calibrate(const std::vector<GaussianKernelSpec>& kernels, const PlancherelBox& box = {});

// Relative HS deviation between F((-x_i) kappa) and the commutator (index 1) or beta-derivative (index 2) form.
double difference_op_check(const KernelFunction& k, int index, double delta, double beta, const SpectralGrid& grid,
                           double beta_step = 1e-3);

struct ConvolutionCheck {
  cplx monte_carlo;
  double standard_error;
  cplx composed;  // <F g F f phi, psi>
  cplx reversed;  // <F f F g phi, psi>
};

// Monte Carlo estimate of <F(f * g)(pi) phi, psi> for single positive Gaussian terms f, g.
ConvolutionCheck convolution_check(const GaussianKernelSpec& f, const GaussianKernelSpec& g, const Generic& p,
                                   const SpectralGrid& grid, const CVec& phi, const CVec& psi, int samples,
                                   std::uint64_t seed);

}  // namespace engel

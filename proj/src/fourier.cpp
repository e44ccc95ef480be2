#include "engel/fourier.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace engel {

namespace {

constexpr cplx I{0.0, 1.0};
const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

double gaussian(double s, double c, double w) {
  const double z = (s - c) / w;
  return std::exp(-0.5 * z * z);
}

// int s^m exp(-(s - c)^2 / (2 w^2)) ds
double gaussian_moment(double c, double w, int m) {
  const double base = kSqrt2Pi * w;
  switch (m) {
    case 0: return base;
    case 1: return c * base;
    case 2: return (w * w + c * c) * base;
    case 3: return (c * c * c + 3 * c * w * w) * base;
    case 4: return (c * c * c * c + 6 * c * c * w * w + 3 * w * w * w * w) * base;
  }
  throw std::invalid_argument("gaussian_moment: order > 4");
}

// int (-s)^{m1} g1(s) (-s)^{m2} g2(s) ds for Gaussians (c1, w1), (c2, w2).
double overlap_1d(double c1, double w1, int m1, double c2, double w2, int m2) {
  const double a1 = 1.0 / (w1 * w1), a2 = 1.0 / (w2 * w2);
  const double a = a1 + a2;
  const double c = (a1 * c1 + a2 * c2) / a;
  const double pref = std::exp(-0.5 * (a1 * c1 * c1 + a2 * c2 * c2 - a * c * c));
  const int m = m1 + m2;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * pref * gaussian_moment(c, 1.0 / std::sqrt(a), m);
}

// int |s|^m exp(-(s - c)^2 / (2 w^2)) ds
double abs_moment(double c, double w, int m) {
  if (m != 1) return gaussian_moment(c, w, m);
  const double z = c / w;
  return kSqrt2Pi * w * (w * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * z * z) + c * std::erf(z / std::sqrt(2.0)));
}

double hs_from_kernel(const Eigen::MatrixXcd& K, double h) { return std::sqrt(K.cwiseAbs2().sum()) * h; }

void check_margin(const Eigen::MatrixXcd& K) {
  const auto n = K.rows();
  const double total = K.cwiseAbs2().sum();
  if (total == 0.0) return;
  const double edge = K.row(0).cwiseAbs2().sum() + K.row(n - 1).cwiseAbs2().sum() + K.col(0).cwiseAbs2().sum() +
                      K.col(n - 1).cwiseAbs2().sum();
  if (edge > 1e-12 * total)
    throw GridMarginError(fmt::format("kernel mass at the grid boundary {:.3g} of total; enlarge L", edge / total));
}

}  // namespace

CVec to_complex(const Vec& v) { return CVec(v.begin(), v.end()); }

cplx inner(const CVec& u, const CVec& v, double h) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * std::conj(v[i]);
  return s * h;
}

double norm(const CVec& u, double h) { return std::sqrt(inner(u, u, h).real()); }

cplx interpolate_cubic(const SpectralGrid& grid, const CVec& phi, double xi) {
  const double s = (xi + grid.L()) / grid.h();
  const double fl = std::floor(s);
  const long k = static_cast<long>(fl);
  const double t = s - fl;
  const long N = grid.N();
  auto at = [&](long j) -> cplx { return (j < 0 || j >= N) ? cplx{} : phi[static_cast<std::size_t>(j)]; };
  const double w0 = -t * (t - 1) * (t - 2) / 6.0;
  const double w1 = (t + 1) * (t - 1) * (t - 2) / 2.0;
  const double w2 = -(t + 1) * t * (t - 2) / 2.0;
  const double w3 = (t + 1) * t * (t - 1) / 6.0;
  return w0 * at(k - 1) + w1 * at(k) + w2 * at(k + 1) + w3 * at(k + 2);
}

CVec rep_apply(const RepParam& p, const GroupElement& x, const SpectralGrid& grid, const CVec& phi) {
  validate(p);
  if (static_cast<int>(phi.size()) != grid.N()) throw std::invalid_argument("rep_apply: vector size != grid N");
  if (const auto* c = std::get_if<Character>(&p)) {
    const cplx phase = std::exp(I * (c->alpha1 * x.x1 + c->alpha2 * x.x2));
    CVec out(phi);
    for (auto& v : out) v *= phase;
    return out;
  }
  double lost = 0.0, total = 0.0;
  for (int k = 0; k < grid.N(); ++k) {
    const double m = std::norm(phi[static_cast<std::size_t>(k)]);
    total += m;
    const double src = grid.node(k) - x.x1;
    if (src < -grid.L() || src > grid.L()) lost += m;
  }
  if (lost > 1e-10 * total)
    throw GridMarginError(fmt::format("rep_apply: shift x1={:.6g} moves {:.3g} of the mass off the grid", x.x1,
                                      lost / total));
  CVec out(phi.size());
  for (int k = 0; k < grid.N(); ++k) {
    const double xi = grid.node(k);
    double theta = 0.0;
    if (const auto* g = std::get_if<Generic>(&p)) {
      const double s = xi + x.x1;
      theta = g->delta * (x.x4 + xi * x.x3 + 0.5 * x.x1 * x.x3) + (g->beta + 0.5 * g->delta * s * s) * x.x2;
    } else {
      const auto& l = std::get<Schrodinger>(p);
      theta = l.lambda * (x.x3 + (xi + x.x1) * x.x2);
    }
    out[static_cast<std::size_t>(k)] = std::polar(1.0, theta) * interpolate_cubic(grid, phi, xi + x.x1);
  }
  return out;
}

CVec GridOperator::apply(const CVec& u) const {
  const std::size_t n = u.size();
  CVec out(n, cplx{});
  if (derivative) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx up = k + 1 < n ? u[k + 1] : cplx{};
      const cplx dn = k > 0 ? u[k - 1] : cplx{};
      out[k] = (up - dn) / (2.0 * h);
    }
  }
  if (!diagonal.empty())
    for (std::size_t k = 0; k < n; ++k) out[k] += diagonal[k] * u[k];
  return out;
}

GridOperator infinitesimal(const RepParam& p, int i, const SpectralGrid& grid) {
  validate(p);
  if (i < 1 || i > 4) throw std::invalid_argument("infinitesimal: generator index must be 1..4");
  GridOperator op{grid.h(), false, {}};
  const auto n = static_cast<std::size_t>(grid.N());
  auto fill = [&](auto f) {
    op.diagonal.resize(n);
    for (int k = 0; k < grid.N(); ++k) op.diagonal[static_cast<std::size_t>(k)] = f(grid.node(k));
  };
  if (const auto* c = std::get_if<Character>(&p)) {
    if (i == 1) fill([&](double) { return I * c->alpha1; });
    if (i == 2) fill([&](double) { return I * c->alpha2; });
    return op;
  }
  if (i == 1) {
    op.derivative = true;
    return op;
  }
  if (const auto* g = std::get_if<Generic>(&p)) {
    if (i == 2) fill([&](double xi) { return I * (g->beta + 0.5 * g->delta * xi * xi); });
    if (i == 3) fill([&](double xi) { return I * g->delta * xi; });
    if (i == 4) fill([&](double) { return I * g->delta; });
  } else {
    const auto& l = std::get<Schrodinger>(p);
    if (i == 2) fill([&](double xi) { return I * l.lambda * xi; });
    if (i == 3) fill([&](double) { return I * l.lambda; });
  }
  return op;
}

cplx matrix_coefficient(const RepParam& p, const GroupElement& x, const SpectralGrid& grid, const CVec& phi1,
                        const CVec& phi2) {
  return inner(rep_apply(p, x, grid, phi1), phi2, grid.h());
}

cplx matrix_coefficient_shifted(const Generic& p, const GroupElement& x, const SpectralGrid& grid, const CVec& u,
                                const std::function<cplx(double)>& phi2) {
  cplx s = 0.0;
  for (int k = 0; k < grid.N(); ++k) {
    const double eta = grid.node(k);
    const double theta = p.delta * eta * x.x3 + (p.beta + 0.5 * p.delta * eta * eta) * x.x2;
    s += std::polar(1.0, theta) * u[static_cast<std::size_t>(k)] * std::conj(phi2(eta - x.x1));
  }
  return std::polar(1.0, p.delta * (x.x4 - 0.5 * x.x1 * x.x3)) * s * grid.h();
}

double GaussianVector::operator()(double xi) const {
  return std::pow(M_PI, -0.25) / std::sqrt(width) * gaussian(xi, center, width);
}

CVec GaussianVector::sample(const SpectralGrid& grid) const {
  CVec v(static_cast<std::size_t>(grid.N()));
  for (int k = 0; k < grid.N(); ++k) v[static_cast<std::size_t>(k)] = (*this)(grid.node(k));
  return v;
}

void validate(const GaussianKernelSpec& k) {
  for (int i = 0; i < 4; ++i) {
    if (!(k.width[static_cast<std::size_t>(i)] > 0.0)) throw std::invalid_argument("Gaussian kernel widths must be > 0");
    const int m = k.moment[static_cast<std::size_t>(i)];
    if (m < 0 || m > 2) throw std::invalid_argument("Gaussian kernel moments must be 0..2");
  }
}

double kernel_value(const KernelFunction& k, const GroupElement& x) {
  double s = 0.0;
  for (const auto& t : k) {
    double v = t.weight;
    for (int i = 0; i < 4; ++i) {
      const auto u = static_cast<std::size_t>(i);
      v *= std::pow(-x[i], t.moment[u]) * gaussian(x[i], t.center[u], t.width[u]);
    }
    s += v;
  }
  return s;
}

double l1_norm(const KernelFunction& k) {
  double s = 0.0;
  for (const auto& t : k) {
    double v = std::abs(t.weight);
    for (std::size_t i = 0; i < 4; ++i) v *= abs_moment(t.center[i], t.width[i], t.moment[i]);
    s += v;
  }
  return s;
}

double l2_norm_squared(const KernelFunction& k) {
  double s = 0.0;
  for (const auto& a : k)
    for (const auto& b : k) {
      double v = a.weight * b.weight;
      for (std::size_t i = 0; i < 4; ++i)
        v *= overlap_1d(a.center[i], a.width[i], a.moment[i], b.center[i], b.width[i], b.moment[i]);
      s += v;
    }
  return s;
}

GaussianKernelSpec dilate_kernel(const GaussianKernelSpec& k, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("dilate_kernel requires r > 0");
  GaussianKernelSpec out = k;
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = std::pow(r, kWeights[i]);
    out.center[i] *= s;
    out.width[i] *= s;
    out.weight /= std::pow(s, k.moment[i]);
  }
  out.weight *= std::pow(r, -kHomogeneousDimension);
  return out;
}

KernelFunction times_minus_coordinate(const KernelFunction& k, int i) {
  if (i < 1 || i > 4) throw std::invalid_argument("times_minus_coordinate: index must be 1..4");
  KernelFunction out = k;
  for (auto& t : out) ++t.moment[static_cast<std::size_t>(i - 1)];
  return out;
}

cplx gaussian_fourier_factor(double c, double w, int m, double k) {
  const cplx g0 = kSqrt2Pi * w * std::exp(-0.5 * k * k * w * w) * std::polar(1.0, -k * c);
  const cplx a = I * c + k * w * w;
  switch (m) {
    case 0: return g0;
    case 1: return I * a * g0;
    case 2: return (w * w - a * a) * g0;
  }
  throw std::invalid_argument("gaussian_fourier_factor: moment must be 0..2");
}

CVec OperatorKernel::apply(const CVec& u) const {
  Eigen::Map<const Eigen::VectorXcd> v(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXcd r = K * v * grid.h();
  return CVec(r.data(), r.data() + r.size());
}

double OperatorKernel::hs_norm() const { return hs_from_kernel(K, grid.h()); }

double OperatorKernel::operator_norm() const {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(matrix());
  return svd.singularValues()(0);
}

OperatorKernel fourier_gaussian(const KernelFunction& k, const Generic& p, const SpectralGrid& grid,
                                bool margin) {
  validate(RepParam{p});
  const int N = grid.N();
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& t : k) {
    validate(t);
    const cplx g4 = gaussian_fourier_factor(t.center[3], t.width[3], t.moment[3], p.delta);
    std::vector<cplx> g2(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      const double xi = grid.node(j);
      g2[static_cast<std::size_t>(j)] =
          gaussian_fourier_factor(t.center[1], t.width[1], t.moment[1], p.beta + 0.5 * p.delta * xi * xi);
    }
    for (int j = 0; j < N; ++j) {
      const double xi = grid.node(j);
      for (int l = 0; l < N; ++l) {
        const double eta = grid.node(l);
        const double s = xi - eta;
        const double g1 = std::pow(-s, t.moment[0]) * gaussian(s, t.center[0], t.width[0]);
        if (g1 == 0.0) continue;
        K(j, l) += t.weight * g1 * g2[static_cast<std::size_t>(j)] *
                   gaussian_fourier_factor(t.center[2], t.width[2], t.moment[2], 0.5 * p.delta * (xi + eta)) * g4;
      }
    }
  }
  if (margin) check_margin(K);
  return {grid, std::move(K)};
}

double hs_norm_squared(const GaussianKernelSpec& k, const Generic& p, const SpectralGrid& grid) {
  validate(k);
  const int N = grid.N();
  const double h = grid.h();
  const double g4 = std::norm(gaussian_fourier_factor(k.center[3], k.width[3], k.moment[3], p.delta));
  double total = 0.0;
  for (int j = 0; j < N; ++j) {
    const double xi = grid.node(j);
    double row = 0.0;
    for (int l = 0; l < N; ++l) {
      const double eta = grid.node(l);
      const double s = xi - eta;
      const double g1 = std::pow(-s, k.moment[0]) * gaussian(s, k.center[0], k.width[0]);
      row += g1 * g1 * std::norm(gaussian_fourier_factor(k.center[2], k.width[2], k.moment[2], 0.5 * p.delta * (xi + eta)));
    }
    total += row * std::norm(gaussian_fourier_factor(k.center[1], k.width[1], k.moment[1], p.beta + 0.5 * p.delta * xi * xi));
  }
  return k.weight * k.weight * g4 * total * h * h;
}

namespace {

struct DeltaSlice {
  double integral = 0.0;  // int HS^2 d beta
  double outer_beta = 0.0;
};

DeltaSlice delta_slice(const GaussianKernelSpec& k, double delta, const PlancherelBox& box) {
  const double c1 = k.center[0], w1 = k.width[0], w2 = k.width[1], w3 = k.width[2];
  const double L = 6.0 / (std::abs(delta) * w3) + 0.5 * (std::abs(c1) + 6.0 * w1);
  const double h = std::min(0.25 * w1, 0.5 / (std::abs(delta) * L * w2 + 1.0));
  const int N = 2 * static_cast<int>(std::ceil(L / h)) + 1;
  const double hx = 2.0 * L / (N - 1);
  const int band = static_cast<int>(std::ceil(7.0 * w1 / hx)) + 1;
  std::vector<double> xi(static_cast<std::size_t>(N)), S(static_cast<std::size_t>(N), 0.0);
  for (int j = 0; j < N; ++j) xi[static_cast<std::size_t>(j)] = -L + j * hx;
  double smax = 0.0;
  for (int j = 0; j < N; ++j) {
    const double x = xi[static_cast<std::size_t>(j)];
    const int centre = static_cast<int>(std::lround((x - c1 + L) / hx));
    double row = 0.0;
    for (int l = std::max(0, centre - band); l <= std::min(N - 1, centre + band); ++l) {
      const double eta = xi[static_cast<std::size_t>(l)];
      const double s = x - eta;
      if (std::abs(s - c1) > 7.0 * w1) continue;
      const double g1 = std::pow(-s, k.moment[0]) * gaussian(s, c1, w1);
      row += g1 * g1 * std::norm(gaussian_fourier_factor(k.center[2], w3, k.moment[2], 0.5 * delta * (x + eta)));
    }
    S[static_cast<std::size_t>(j)] = row * hx;
    smax = std::max(smax, row * hx);
  }
  const double g4 = std::norm(gaussian_fourier_factor(k.center[3], k.width[3], k.moment[3], delta));
  const int nb = 2 * static_cast<int>(std::lround(box.beta_max / box.beta_step)) + 1;
  DeltaSlice out;
  for (int b = 0; b < nb; ++b) {
    const double beta = -box.beta_max + b * box.beta_step;
    double hs = 0.0;
    for (int j = 0; j < N; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (S[u] < 1e-300 || S[u] < 1e-18 * smax) continue;
      hs += S[u] * std::norm(gaussian_fourier_factor(k.center[1], w2, k.moment[1], beta + 0.5 * delta * xi[u] * xi[u]));
    }
    hs *= g4 * hx * k.weight * k.weight;
    const double wt = (b == 0 || b == nb - 1) ? 0.5 : 1.0;
    out.integral += wt * hs * box.beta_step;
    if (std::abs(beta) > 0.9 * box.beta_max) out.outer_beta += wt * hs * box.beta_step;
  }
  return out;
}

// Composite Simpson (trapezoid when the node count is even).
double integrate(const std::vector<double>& f, double step) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n % 2 == 0) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i];
    return s * step;
  }
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * step / 3.0;
}

}  // namespace

PlancherelReport plancherel_calibrate(const std::vector<GaussianKernelSpec>& kernels, const PlancherelBox& box) {
  if (kernels.empty()) throw std::invalid_argument("plancherel_calibrate: no kernels");
  if (!(box.delta_min > 0.0 && box.delta_max > box.delta_min && box.beta_max > 0.0 && box.beta_step > 0.0 &&
        box.n_delta >= 3))
    throw std::invalid_argument("plancherel_calibrate: bad box");
  PlancherelReport rep;
  rep.kernels = kernels;
  rep.box = box;
  const double dstep = (box.delta_max - box.delta_min) / (box.n_delta - 1);
  for (const auto& k : kernels) {
    validate(k);
    double total = 0.0, outer = 0.0, central = 0.0;
    for (double sign : {1.0, -1.0}) {
      std::vector<double> f(static_cast<std::size_t>(box.n_delta)), fo(f.size());
      for (int i = 0; i < box.n_delta; ++i) {
        const double d = box.delta_min + i * dstep;
        const auto sl = delta_slice(k, sign * d, box);
        const auto u = static_cast<std::size_t>(i);
        f[u] = d * sl.integral;
        fo[u] = d * sl.outer_beta + (d > 0.9 * box.delta_max ? d * (sl.integral - sl.outer_beta) : 0.0);
      }
      total += integrate(f, dstep);
      outer += integrate(fo, dstep);
      // f = a + b delta^2 + c delta^4 through the first three nodes, integrated over (0, delta_min).
      Eigen::Matrix3d A;
      Eigen::Vector3d rhs;
      for (int i = 0; i < 3; ++i) {
        const double d2 = std::pow(box.delta_min + i * dstep, 2);
        A.row(i) << 1.0, d2, d2 * d2;
        rhs(i) = f[static_cast<std::size_t>(i)];
      }
      const Eigen::Vector3d abc = A.partialPivLu().solve(rhs);
      const double d0 = box.delta_min;
      central += abc(0) * d0 + abc(1) * std::pow(d0, 3) / 3.0 + abc(2) * std::pow(d0, 5) / 5.0;
    }
    const double all = total + central;
    const double tail = outer / all;
    rep.tail_estimate = std::max(rep.tail_estimate, tail);
    if (tail >= 1e-3)
      throw TailMassError(fmt::format("Plancherel box misses {:.3g} of the mass; enlarge delta_max or beta_max", tail));
    rep.c_estimates.push_back(l2_norm_squared({k}) / all);
    rep.excluded_center_fraction.push_back(central / all);
  }
  const auto [lo, hi] = std::minmax_element(rep.c_estimates.begin(), rep.c_estimates.end());
  rep.mean = std::accumulate(rep.c_estimates.begin(), rep.c_estimates.end(), 0.0) / rep.c_estimates.size();
  rep.relative_spread = (*hi - *lo) / rep.mean;
  return rep;
}

nlohmann::json PlancherelReport::to_json() const {
  nlohmann::json ks = nlohmann::json::array();
  for (const auto& k : kernels)
    ks.push_back({{"center", k.center}, {"width", k.width}, {"moment", k.moment}, {"weight", k.weight}});
  return {{"kernels", ks},
          {"c_estimates", c_estimates},
          {"excluded_center_fraction", excluded_center_fraction},
          {"mean", mean},
          {"relative_spread", relative_spread},
          {"tail_estimate", tail_estimate},
          {"box",
           {{"delta_min", box.delta_min},
            {"delta_max", box.delta_max},
            {"beta_max", box.beta_max},
            {"n_delta", box.n_delta},
            {"beta_step", box.beta_step}}}};
}

double difference_op_check(const KernelFunction& k, int index, double delta, double beta, const SpectralGrid& grid,
                           double beta_step) {
  if (index != 1 && index != 2) throw std::invalid_argument("difference_op_check: index must be 1 or 2");
  const Generic p{delta, beta};
  const Eigen::MatrixXcd lhs = fourier_gaussian(times_minus_coordinate(k, index), p, grid).K;
  Eigen::MatrixXcd rhs;
  if (index == 1) {
    const auto x3 = infinitesimal(RepParam{p}, 3, grid).diagonal;
    const Eigen::VectorXcd d = Eigen::Map<const Eigen::VectorXcd>(x3.data(), static_cast<Eigen::Index>(x3.size()));
    const Eigen::MatrixXcd K = fourier_gaussian(k, p, grid).K;
    rhs = (I / delta) * (d.asDiagonal() * K - K * d.asDiagonal());
  } else {
    const Eigen::MatrixXcd up = fourier_gaussian(k, Generic{delta, beta + beta_step}, grid).K;
    const Eigen::MatrixXcd dn = fourier_gaussian(k, Generic{delta, beta - beta_step}, grid).K;
    rhs = (up - dn) / (2.0 * beta_step * I);
  }
  return (lhs - rhs).norm() / lhs.norm();
}

ConvolutionCheck convolution_check(const GaussianKernelSpec& f, const GaussianKernelSpec& g, const Generic& p,
                                   const SpectralGrid& grid, const CVec& phi, const CVec& psi, int samples,
                                   std::uint64_t seed) {
  for (const auto* k : {&f, &g}) {
    validate(*k);
    if (k->moment != std::array<int, 4>{0, 0, 0, 0} || !(k->weight > 0.0))
      throw std::invalid_argument("convolution_check needs positive Gaussian terms without moments");
  }
  if (samples < 2) throw std::invalid_argument("convolution_check: samples < 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  auto draw = [&](const GaussianKernelSpec& k) {
    GroupElement x;
    for (int i = 0; i < 4; ++i) x[i] = k.center[static_cast<std::size_t>(i)] + k.width[static_cast<std::size_t>(i)] * z(rng);
    return x;
  };
  const double scale = l1_norm({f}) * l1_norm({g});
  cplx sum = 0.0;
  double sum2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const GroupElement y = draw(f), w = draw(g);
    const cplx v = std::conj(matrix_coefficient(RepParam{p}, multiply(y, w), grid, psi, phi)) * scale;
    sum += v;
    sum2 += std::norm(v);
  }
  ConvolutionCheck out;
  out.monte_carlo = sum / static_cast<double>(samples);
  const double var = (sum2 / samples - std::norm(out.monte_carlo)) * samples / (samples - 1.0);
  out.standard_error = std::sqrt(var / samples);
  const auto Ff = fourier_gaussian({f}, p, grid);
  const auto Fg = fourier_gaussian({g}, p, grid);
  out.composed = inner(Fg.apply(Ff.apply(phi)), psi, grid.h());
  out.reversed = inner(Ff.apply(Fg.apply(phi)), psi, grid.h());
  return out;
}

}  // namespace engel

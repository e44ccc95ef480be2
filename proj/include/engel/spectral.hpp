#pragma once

// Finite-difference spectral solver for H(pi^{delta,beta}) = -d^2 + (beta + delta xi^2/2)^2,
// H(pi^lambda) = -d^2 + lambda^2 xi^2 and the Montgomery family -d^2 + (nu + xi^2/2)^2.

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "engel/rep_param.hpp"

namespace engel {

struct Montgomery {
  double nu;
};

using Symbol = std::variant<Generic, Schrodinger, Montgomery>;
using Vec = std::vector<double>;

class SpectralGrid {
 public:
  SpectralGrid(double L, int N);
  double L() const { return L_; }
  int N() const { return N_; }
  double h() const { return h_; }
  double node(int k) const { return -L_ + h_ * k; }
  Vec nodes() const;
  // Same box, spacing halved (2N-1 nodes).
  SpectralGrid halved() const { return SpectralGrid(L_, 2 * N_ - 1); }

 private:
  double L_;
  int N_;
  double h_;
};

double inner(const Vec& u, const Vec& v, double h);
double norm(const Vec& u, double h);

class ConfinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double potential_value(const Symbol& s, double xi);

// Multiplication operator d H / d(beta) (Generic) or d H / d(nu) (Montgomery) on the grid.
Vec parameter_derivative(const Symbol& s, const SpectralGrid& grid);

struct OperatorMatrix {
  SpectralGrid grid;
  Vec potential;
  Vec diagonal;
  double off_diagonal;

  Vec apply(const Vec& u) const;
  // <u, H u> as a sum of non-negative terms.
  double quadratic_form(const Vec& u) const;
};

OperatorMatrix build_hamiltonian(const Symbol& s, const SpectralGrid& grid);

struct EigenPair {
  double mu;
  Vec phi;
  bool near_degenerate = false;
};

struct EigenOptions {
  bool check_confinement = true;
  double confinement_margin = 1.0;
  double min_wkb_action = 12.0;
  double gap_threshold = 1e-9;
};

// WKB decay action from the outermost turning points of V - mu to the walls (minimum of both sides).
double wkb_action(const OperatorMatrix& op, double mu);

std::vector<EigenPair> eigen_lowest(const OperatorMatrix& op, int k, const EigenOptions& opts = {});

// Count of eigenvalues strictly below x (Sturm sequence).
int sturm_count(const OperatorMatrix& op, double x);

// Box half-width with V(+-L) >= 4 mu_k and WKB action >= `action`, N nodes.
SpectralGrid auto_grid(const Symbol& s, int k, int N = 4096, double action = 20.0);

struct SolverOptions {
  int N = 4096;
  double L = 0.0;  // 0 selects auto_grid
  bool richardson = true;
  EigenOptions eigen;
};

struct LevelSolution {
  int n;
  Symbol symbol;
  SpectralGrid base_grid;
  // Richardson-combined (or fine-grid) eigenvalue and parameter derivatives.
  double mu;
  double dmu;
  double d2mu;
  // Fine-grid discrete data used by projectors and resolvents.
  OperatorMatrix fine_op;
  EigenPair level;
  std::vector<EigenPair> lower;  // eigenpairs 1..n on the fine grid
  Vec dphi;                      // d Pi_n phi_n = (mu_n - H)^{-1} P_perp (dH) phi_n
};

LevelSolution solve_level(const Symbol& s, int n, const SolverOptions& opts = {});

double mu_beta_derivative(double delta, double beta, int n, const SolverOptions& opts = {});

// Solves (mu_n - H) u = P_perp rhs with <u, phi_n> = 0.
Vec reduced_resolvent_solve(const OperatorMatrix& op, const EigenPair& level, const Vec& rhs,
                            double gap);
Vec reduced_resolvent_solve(double delta, double beta, int n, const Vec& rhs, const SolverOptions& opts = {});

// Rank-two representation: dPi = |D><phi| + |phi><D| with D = sum_{m != n} c_m phi_m.
struct ProjectorPair {
  SpectralGrid grid;
  Vec phi;
  Vec D;
  int m_used;
  double tail_estimate;  // || D_truncated - D_resolvent ||
  double tail_coupling;  // sum over the last eight retained m of |c_m|

  Vec apply_projector(const Vec& u) const;
  Vec apply_derivative(const Vec& u) const;
  double idempotency_defect() const;       // || Pi^2 - Pi ||
  double diagonal_derivative_norm() const;  // || Pi dPi Pi ||
};

ProjectorPair projector_derivative(double delta, double beta, int n, const SolverOptions& opts = {},
                                   int m_max = 64);

// delta^{2/3} mu~_n(beta delta^{-1/3}) with the real cube root.
double rescaled_eigenvalue(double delta, double beta, int n, const SolverOptions& opts = {});

struct BranchRow {
  int n;
  double delta;
  double param;  // beta, or nu for the Montgomery family
  double mu;
  double dmu;
  double d2mu;
  double grid_L;
  int grid_N;
  std::string status;
};

BranchRow branch_row(const Symbol& s, int n, const SolverOptions& opts = {});
void write_branch_csv(std::ostream& os, const std::vector<BranchRow>& rows, bool montgomery);

// Diagonal parts of the first-corrector terms at (delta, beta) for level n. The expected values use
// eigenvalue differences with the given step on the same box, independent of the resolvent.
struct DiagonalPartIdentities {
  double fh_derivative;  // <dH phi, phi>
  double fd_derivative;  // central difference of mu in beta
  std::complex<double> x2_dpi, x2_dpi_expected;  // <pi(X2) dPi phi, phi>, (i/2)(d2mu/2 - 1)
  std::complex<double> x1_dpi, x1_dpi_expected;  // <pi(X1) dPi phi, phi>, dmu <pi(X3) phi, phi> / (2 i delta)
  double x2x3_commutator_defect;                 // || pi(X2 X3) phi - [-pi(X1)/2, H] phi ||
  double x1x3_commutator_defect;                 // || pi(X1 X3) phi - (i delta/2) phi - [pi(X3^2)/(4 i delta), H] phi ||
  double max_identity_deviation() const;
};

DiagonalPartIdentities diagonal_part_identities(double delta, double beta, int n, const SolverOptions& opts = {});

}  // namespace engel

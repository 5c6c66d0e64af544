#pragma once

#include <functional>

#include "torusnf/normal_form.hpp"

namespace torusnf {

/// ||psi||_sigma = (sum <xi>^{2 sigma} |psi_hat_xi|^2)^{1/2}.
double sobolev_norm(const VecC& psi, double sigma, const ModeSet& modes);

VecC plane_wave(const ModeSet& modes, const VecI& xi0);
/// Seeded random coefficients with |psi_hat_xi| ~ <xi>^{-decay}, normalized
/// to unit L2 norm.
VecC random_state(const ModeSet& modes, std::uint64_t seed, double decay);

struct NormTrace {
  double start = 0.0;
  std::vector<double> sigmas;
  std::vector<double> times;               // absolute t
  std::vector<std::vector<double>> norms;  // norms[si][ti]

  int sigma_index(double sigma) const;
};

/// Time dependent Hamiltonian assembled per partition group.
struct BlockHamiltonian {
  PartitionPtr part;
  std::function<void(int grp, double t, MatC& out)> build;
  bool periodic = false;
  double period = 0.0;
};

/// -Delta_g + Op^W(v)(t), built from the symbol exactly at any t.
BlockHamiltonian hamiltonian_from_symbol(const SymbolSpec& v, const PartitionPtr& part);

/// -Delta_g + Z(t) [+ R(t)], with the families interpolated off-grid.
BlockHamiltonian hamiltonian_from_families(const BlockMatrix& lap, const BlockFamily* z,
                                           const BlockFamily* r);

struct EvolveOptions {
  int record_stride = 1;
  std::vector<double> snapshot_times;  // propagator snapshots, rounded to steps
  double herm_tol = 1e-8;
};

struct EvolveResult {
  NormTrace trace;
  VecC final_state;
  double l2_drift = 0.0;
  std::vector<std::pair<double, BlockMatrix>> snapshots;
};

/// Exponential midpoint integrator psi <- exp(-i h H(t + h/2)) psi with exact
/// Hermitian exponentials per group (unitary to rounding). When the
/// Hamiltonian is periodic and the period is an integer number of steps, the
/// midpoint factors are computed once per group and reused cyclically.
EvolveResult evolve_blocks(const BlockHamiltonian& h, const VecC& psi0, double s,
                           double t_end, double step, const std::vector<double>& sigmas,
                           const EvolveOptions& opts = {});

/// Dense variant of the same integrator.
EvolveResult evolve(const std::function<OperatorMatrix(double)>& h_builder, const VecC& psi0,
                    double s, double t_end, double step, const std::vector<double>& sigmas,
                    const ModeSetPtr& modes, const EvolveOptions& opts = {});

struct GrowthFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
};

/// Least-squares slope of log ||psi(t)||_sigma against log <t-s> on the window.
GrowthFit fit_growth(const NormTrace& trace, double sigma, double window_lo,
                     double window_hi);

struct DuhamelReport {
  double k_hat_half = 0.0;  // envelope constant on [s, s+T]
  double k_hat_full = 0.0;  // envelope constant on [s, s+2T]
  double sigma_n = 0.0;
  bool pass = false;
};

/// Fits the smallest K' with ||psi(t)||_sigma_n <= K' <t-s> ||psi0||_sigma_n
/// under the H~ + R flow; passes iff K' is stable (within 20%) when the
/// horizon doubles.
DuhamelReport duhamel_bound_check(const NFResult& nf, const VecC& psi0, double s,
                                  double horizon, double step, double sigma_n);

struct InterpolationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// ||U||_{sigma,sigma} <= ||U||_{N,N}^theta ||U||_{0,0}^{1-theta}, theta = sigma/N.
InterpolationReport interpolation_check(const OperatorMatrix& u, double sigma, int n);
InterpolationReport interpolation_check(const BlockMatrix& u, double sigma, int n);

}  // namespace torusnf

#include "torusnf/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace torusnf {

double sobolev_norm(const VecC& psi, double sigma, const ModeSet& modes) {
  if (psi.size() != modes.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < psi.size(); ++i)
    s += std::pow(modes.jap(i), 2.0 * sigma) * std::norm(psi[i]);
  return std::sqrt(s);
}

VecC plane_wave(const ModeSet& modes, const VecI& xi0) {
  const auto i = modes.index_of(xi0);
  if (!i) throw std::invalid_argument("plane-wave mode outside the mode set");
  VecC psi = VecC::Zero(modes.size());
  psi[*i] = 1.0;
  return psi;
}

VecC random_state(const ModeSet& modes, std::uint64_t seed, double decay) {
  CounterRng rng(seed);
  VecC psi(modes.size());
  for (int i = 0; i < modes.size(); ++i)
    psi[i] = rng.cnormal() * std::pow(modes.jap(i), -decay);
  psi /= psi.norm();
  return psi;
}

int NormTrace::sigma_index(double sigma) const {
  for (std::size_t i = 0; i < sigmas.size(); ++i)
    if (sigmas[i] == sigma) return static_cast<int>(i);
  throw std::invalid_argument("sigma not recorded in trace");
}

BlockHamiltonian hamiltonian_from_symbol(const SymbolSpec& v, const PartitionPtr& part) {
  BlockHamiltonian h;
  h.part = part;
  // Precompute the time independent skeleton: for each group the diagonal and
  // the per-term fiber entries with their radial weights; only the scalar
  // profile values change with t.
  struct FiberEntry {
    int r, c;
    Complex base;
    int term;
  };
  auto entries = std::make_shared<std::vector<std::vector<FiberEntry>>>(part->count());
  auto diag = std::make_shared<std::vector<Vec>>(part->count());
  auto profiles = std::make_shared<std::vector<TimeProfile>>();
  for (const auto& term : v.terms) profiles->push_back(term.profile);

  const ModeSet& ms = *part->modes;
  for (int g = 0; g < part->count(); ++g) {
    const auto& idx = part->groups[g];
    (*diag)[g] = Vec(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) (*diag)[g][a] = ms.norm_sq(idx[a]);
  }
  for (std::size_t ti = 0; ti < v.terms.size(); ++ti) {
    const auto& term = v.terms[ti];
    for (const auto& [k, c] : term.coeffs) {
      if (c == 0.0) continue;
      for (int j = 0; j < ms.size(); ++j) {
        const auto i = ms.index_of(VecI(ms.mode(j) + k));
        if (!i) continue;
        if (part->group_of[*i] != part->group_of[j])
          throw std::invalid_argument("symbol fiber crosses partition groups");
        const Covector eta = Covector::midpoint(ms.mode(j), k);
        (*entries)[part->group_of[j]].push_back(
            {part->local_of[*i], part->local_of[j],
             c * std::pow(jap_bracket(eta, ms.metric()), term.order),
             static_cast<int>(ti)});
      }
    }
  }

  h.build = [entries, diag, profiles](int grp, double t, MatC& out) {
    const Vec& d = (*diag)[grp];
    out = MatC::Zero(d.size(), d.size());
    out.diagonal() = d.cast<Complex>();
    std::vector<double> pv(profiles->size());
    for (std::size_t i = 0; i < profiles->size(); ++i) pv[i] = (*profiles)[i].value(t);
    for (const auto& e : (*entries)[grp]) out(e.r, e.c) += pv[e.term] * e.base;
  };

  // Periodic iff every non-constant profile frequency is a multiple of some
  // base frequency; report the common period when it exists.
  double base = 0.0;
  bool periodic = true;
  for (const auto& term : v.terms) {
    if (term.profile.kind == ProfileKind::constant || term.profile.amp == 0.0) continue;
    const double w = std::abs(term.profile.omega);
    if (w == 0.0) continue;
    base = base == 0.0 ? w : std::min(base, w);
  }
  if (base > 0.0) {
    for (const auto& term : v.terms) {
      if (term.profile.kind == ProfileKind::constant || term.profile.amp == 0.0) continue;
      const double ratio = std::abs(term.profile.omega) / base;
      if (std::abs(ratio - std::round(ratio)) > 1e-12) periodic = false;
    }
    h.periodic = periodic;
    h.period = 2.0 * M_PI / base;
  } else {
    h.periodic = true;  // time independent
    h.period = 0.0;
  }
  return h;
}

BlockHamiltonian hamiltonian_from_families(const BlockMatrix& lap, const BlockFamily* z,
                                           const BlockFamily* r) {
  BlockHamiltonian h;
  h.part = lap.part;
  auto lap_copy = std::make_shared<BlockMatrix>(lap);
  h.build = [lap_copy, z, r](int grp, double t, MatC& out) {
    out = lap_copy->blk[grp];
    if (z && !z->empty()) out += z->eval_group(grp, t);
    if (r && !r->empty()) out += r->eval_group(grp, t);
  };
  const BlockFamily* any = z && !z->empty() ? z : r;
  if (any) {
    h.periodic = any->grid.periodic;
    h.period = any->grid.period();
  }
  return h;
}

EvolveResult evolve_blocks(const BlockHamiltonian& h, const VecC& psi0, double s,
                           double t_end, double step, const std::vector<double>& sigmas,
                           const EvolveOptions& opts) {
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  const SupportPartition& part = *h.part;
  const ModeSet& ms = *part.modes;
  if (psi0.size() != ms.size()) throw std::invalid_argument("dimension mismatch");

  const long n_steps = std::max<long>(0, std::llround((t_end - s) / step));
  // Record sigma = 0 internally for the drift check even if not requested.
  std::vector<double> sig = sigmas;
  if (std::find(sig.begin(), sig.end(), 0.0) == sig.end()) sig.push_back(0.0);

  std::vector<long> record_steps;
  for (long n = 0; n <= n_steps; ++n)
    if (n % opts.record_stride == 0 || n == n_steps) record_steps.push_back(n);

  std::vector<long> snapshot_steps;
  for (double ts : opts.snapshot_times)
    snapshot_steps.push_back(std::llround((ts - s) / step));
  const bool want_snapshots = !snapshot_steps.empty();

  // Midpoint-factor reuse across periods.
  long cycle = 0;
  if (h.periodic) {
    if (h.period == 0.0) {
      cycle = 1;  // autonomous
    } else {
      const double q = h.period / step;
      if (std::abs(q - std::llround(q)) < 1e-9 && std::llround(q) > 0 &&
          std::llround(q) <= n_steps)
        cycle = std::llround(q);
    }
  }

  EvolveResult out;
  out.trace.start = s;
  out.trace.sigmas = sig;
  out.trace.times.reserve(record_steps.size());
  for (long n : record_steps) out.trace.times.push_back(s + n * step);
  out.trace.norms.assign(sig.size(), std::vector<double>(record_steps.size(), 0.0));
  out.final_state = VecC::Zero(ms.size());
  if (want_snapshots)
    for (long n : snapshot_steps)
      out.snapshots.emplace_back(s + n * step, BlockMatrix(h.part));

  // Per-group independent evolution; contributions merged in group order.
  std::vector<std::vector<std::vector<double>>> contrib(
      part.count(), std::vector<std::vector<double>>(sig.size(),
                                                     std::vector<double>(record_steps.size(), 0.0)));

  for (int g = 0; g < part.count(); ++g) {
    const auto& idx = part.groups[g];
    const int len = static_cast<int>(idx.size());
    VecC psi(len);
    for (int a = 0; a < len; ++a) psi[a] = psi0[idx[a]];

    Mat weights(sig.size(), len);
    for (std::size_t si = 0; si < sig.size(); ++si)
      for (int a = 0; a < len; ++a)
        weights(si, a) = std::pow(ms.jap(idx[a]), 2.0 * sig[si]);

    std::vector<MatC> factors;
    if (cycle > 0) factors.assign(cycle, MatC());

    MatC u_run;
    if (want_snapshots) u_run = MatC::Identity(len, len);

    MatC hbuf(len, len);
    auto factor_at = [&](long n) -> MatC {
      const double tm = s + n * step + 0.5 * step;
      auto make = [&]() {
        h.build(g, tm, hbuf);
        const double scale = hbuf.size() ? hbuf.cwiseAbs().maxCoeff() : 0.0;
        if ((hbuf - hbuf.adjoint()).cwiseAbs().maxCoeff() > opts.herm_tol * std::max(1.0, scale))
          throw NumericalError("non-hermitian hamiltonian sample");
        Eigen::SelfAdjointEigenSolver<MatC> es(hbuf);
        VecC phase(len);
        for (int a = 0; a < len; ++a) phase[a] = std::polar(1.0, -step * es.eigenvalues()[a]);
        return MatC(es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint());
      };
      if (cycle == 0) return make();
      MatC& slot = factors[n % cycle];
      if (slot.size() == 0) slot = make();
      return slot;
    };

    std::size_t rec = 0, snap = 0;
    for (long n = 0; n <= n_steps; ++n) {
      if (rec < record_steps.size() && record_steps[rec] == n) {
        for (std::size_t si = 0; si < sig.size(); ++si) {
          double acc = 0.0;
          for (int a = 0; a < len; ++a) acc += weights(si, a) * std::norm(psi[a]);
          contrib[g][si][rec] = acc;
        }
        ++rec;
      }
      if (want_snapshots)
        while (snap < snapshot_steps.size() && snapshot_steps[snap] == n) {
          out.snapshots[snap].second.blk[g] = u_run;
          ++snap;
        }
      if (n == n_steps) break;
      const MatC f = factor_at(n);
      psi = f * psi;
      if (want_snapshots) u_run = f * u_run;
    }
    for (int a = 0; a < len; ++a) out.final_state[idx[a]] = psi[a];
  }

  for (int g = 0; g < part.count(); ++g)
    for (std::size_t si = 0; si < sig.size(); ++si)
      for (std::size_t r = 0; r < record_steps.size(); ++r)
        out.trace.norms[si][r] += contrib[g][si][r];
  for (auto& row : out.trace.norms)
    for (double& v : row) v = std::sqrt(v);

  const int zero_idx = out.trace.sigma_index(0.0);
  const double n0 = out.trace.norms[zero_idx][0];
  for (double v : out.trace.norms[zero_idx])
    out.l2_drift = std::max(out.l2_drift, std::abs(v - n0));
  return out;
}

EvolveResult evolve(const std::function<OperatorMatrix(double)>& h_builder, const VecC& psi0,
                    double s, double t_end, double step, const std::vector<double>& sigmas,
                    const ModeSetPtr& modes, const EvolveOptions& opts) {
  BlockHamiltonian h;
  h.part = SupportPartition::single_group(modes);
  h.build = [&h_builder](int, double t, MatC& out) { out = h_builder(t).entries(); };
  h.periodic = false;
  return evolve_blocks(h, psi0, s, t_end, step, sigmas, opts);
}

GrowthFit fit_growth(const NormTrace& trace, double sigma, double window_lo,
                     double window_hi) {
  const int si = trace.sigma_index(sigma);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double u = trace.times[i] - trace.start;
    if (u < window_lo || u > window_hi) continue;
    const double norm = trace.norms[si][i];
    if (!(norm > 0)) throw std::invalid_argument("nonpositive norm in fit window");
    pts.emplace_back(std::log(std::sqrt(1.0 + u * u)), std::log(norm));
  }
  if (pts.size() < 2) throw std::invalid_argument("degenerate window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) throw std::invalid_argument("degenerate window");
  GrowthFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.constant = std::exp(intercept);
  double rss = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (intercept + fit.exponent * x);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  return fit;
}

DuhamelReport duhamel_bound_check(const NFResult& nf, const VecC& psi0, double s,
                                  double horizon, double step, double sigma_n) {
  const BlockHamiltonian h = hamiltonian_from_families(nf.laplacian, &nf.Z(), &nf.R());
  const EvolveResult run =
      evolve_blocks(h, psi0, s, s + 2.0 * horizon, step, {sigma_n});
  const int si = run.trace.sigma_index(sigma_n);
  const double base = run.trace.norms[si][0];
  DuhamelReport rep;
  rep.sigma_n = sigma_n;
  for (std::size_t i = 0; i < run.trace.times.size(); ++i) {
    const double u = run.trace.times[i] - s;
    const double ratio = run.trace.norms[si][i] / (std::sqrt(1.0 + u * u) * base);
    if (u <= horizon) rep.k_hat_half = std::max(rep.k_hat_half, ratio);
    rep.k_hat_full = std::max(rep.k_hat_full, ratio);
  }
  rep.pass = std::isfinite(rep.k_hat_full) &&
             std::abs(rep.k_hat_full - rep.k_hat_half) <= 0.2 * rep.k_hat_half;
  return rep;
}

InterpolationReport interpolation_check(const OperatorMatrix& u, double sigma, int n) {
  if (!(sigma > 0.0 && sigma < n)) throw std::invalid_argument("need 0 < sigma < N");
  const double theta = sigma / n;
  InterpolationReport rep;
  rep.lhs = sobolev_opnorm(u, sigma, sigma);
  rep.rhs = std::pow(sobolev_opnorm(u, n, n), theta) *
            std::pow(sobolev_opnorm(u, 0.0, 0.0), 1.0 - theta);
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  return rep;
}

InterpolationReport interpolation_check(const BlockMatrix& u, double sigma, int n) {
  if (!(sigma > 0.0 && sigma < n)) throw std::invalid_argument("need 0 < sigma < N");
  const double theta = sigma / n;
  InterpolationReport rep;
  rep.lhs = sobolev_opnorm(u, sigma, sigma);
  rep.rhs = std::pow(sobolev_opnorm(u, static_cast<double>(n), static_cast<double>(n)), theta) *
            std::pow(sobolev_opnorm(u, 0.0, 0.0), 1.0 - theta);
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  return rep;
}

}  // namespace torusnf

#include "torusnf/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace torusnf {

OrderFit order_report(const std::vector<BlockMatrix>& samples, double lambda_inner) {
  OrderFit fit;
  if (samples.empty()) return fit;
  const SupportPartition& part = *samples.front().part;
  const ModeSet& ms = *part.modes;

  // (log<eta>, log max-over-samples |entry|) per inner-annulus entry.
  std::vector<std::pair<double, double>> pts;
  for (int g = 0; g < part.count(); ++g) {
    const auto& idx = part.groups[g];
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const Covector eta = Covector::from_doubled(ms.mode(idx[r]) + ms.mode(idx[q]));
        const double jb = jap_bracket(eta, ms.metric());
        if (jb > lambda_inner) continue;
        double amp = 0.0;
        for (const auto& s : samples) amp = std::max(amp, std::abs(s.blk[g](r, q)));
        if (amp > 0.0) pts.emplace_back(jb, amp);
      }
  }
  if (pts.size() < 2) return fit;

  std::sort(pts.begin(), pts.end());
  const int nbins = 10;
  std::vector<std::pair<double, double>> bin_pts;  // (log jb at bin max, log max amp)
  for (int b = 0; b < nbins; ++b) {
    const std::size_t lo = pts.size() * b / nbins;
    const std::size_t hi = pts.size() * (b + 1) / nbins;
    if (lo >= hi) continue;
    double amp = 0.0, jb = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      if (pts[i].second > amp) { amp = pts[i].second; jb = pts[i].first; }
    bin_pts.emplace_back(std::log(jb), std::log(amp));
  }
  if (bin_pts.size() < 2) return fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : bin_pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(bin_pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) return fit;
  fit.order = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.order * sx) / n;
  double rss = 0.0;
  for (const auto& [x, y] : bin_pts) {
    const double e = y - (intercept + fit.order * x);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.bins_used = static_cast<int>(bin_pts.size());
  return fit;
}

namespace {

struct StepOutput {
  BlockFamily z, r, g;
};

StepOutput nf_step(const BlockFamily& z, const BlockFamily& r, const BlockMatrix& lap,
                   const NFParams& p, const Quadrature& quad, const Mat& deriv,
                   const BlockFamily* dr_exact, double herm_tol) {
  const int m = r.grid.samples;
  StepOutput out{BlockFamily(r.part, r.grid), BlockFamily(r.part, r.grid),
                 BlockFamily(r.part, r.grid)};

  for (int j = 0; j < m; ++j) {
    BlockDecomposition dec = decompose(r.at[j], p);
    out.g.at[j] = solve_homological(dec.nr);
    out.z.at[j] = z.at[j] + dec.avg + dec.res;
    out.r.at[j] = r.at[j] - dec.avg - dec.res;  // nr + smooth, exactly
  }

  // dG: exact within the symbol family at step 0 (masks and divisors are
  // time independent, so d/dt commutes with decompose + solve), grid
  // differentiation afterwards.
  BlockFamily dg(r.part, r.grid);
  if (dr_exact) {
    for (int j = 0; j < m; ++j)
      dg.at[j] = solve_homological(decompose(dr_exact->at[j], p).nr);
  } else {
    dg = out.g.derivative(deriv);
  }

  for (int j = 0; j < m; ++j) {
    const BlockMatrix h = lap + z.at[j] + r.at[j];
    // R+ = H+ - lap - Z+ rearranged as (R - avg - res) + delta, so the
    // laplacian diagonal never enters the remainder bookkeeping.
    out.r.at[j] += lie_transform_delta(h, out.g.at[j], dg.at[j], quad);
    const double scale = std::max(1.0, out.r.at[j].max_abs());
    if (out.r.at[j].hermiticity_defect() > herm_tol * scale)
      throw NumericalError("hermiticity lost in normal-form step");
  }
  return out;
}

}  // namespace

NFResult run_normal_form(const SymbolSpec& v, const NFParams& p, const ModeSetPtr& modes,
                         const TimeGrid& grid, int n_steps, const NFOptions& opts) {
  {
    const auto errs = validate_params(p);
    if (!errs.empty()) {
      std::string msg = "invalid normal-form parameters:";
      for (const auto& e : errs) msg += " [" + e + "]";
      throw std::invalid_argument(msg);
    }
  }
  if (!is_real_valued(v))
    throw std::invalid_argument("potential symbol is not real valued");
  grid.validate();

  NFResult res;
  res.part = SupportPartition::from_fibers(modes, v.fourier_support());
  res.grid = grid;
  res.params = p;
  res.options = opts;
  res.laplacian = laplacian_blocks(res.part);

  const double lambda_inner = modes->lambda_inner(opts.buffer);
  const Quadrature quad = Quadrature::gauss_legendre01(opts.quad_nodes);
  const Mat deriv = grid.derivative_matrix(opts.deriv);

  BlockFamily z(res.part, grid), r(res.part, grid), dr0(res.part, grid);
  const SymbolSpec dv = time_derivative(v);
  for (int j = 0; j < grid.samples; ++j) {
    r.at[j] = quantize_blocks(v, grid.time(j), res.part);
    dr0.at[j] = quantize_blocks(dv, grid.time(j), res.part);
  }

  // Running conjugator per sample, extended by e^{iG_s} each step.
  std::vector<BlockMatrix> u;
  u.assign(grid.samples, BlockMatrix(res.part));
  for (int j = 0; j < grid.samples; ++j)
    for (int g = 0; g < res.part->count(); ++g)
      u[j].blk[g] = MatC::Identity(res.part->dim_of(g), res.part->dim_of(g));

  auto record_state = [&](int step, const BlockFamily& zf, const BlockFamily& rf) {
    NFStepRecord rec;
    rec.step = step;
    rec.remainder_order = order_report(rf.at, lambda_inner);
    double herm = 0.0, unit = 0.0;
    for (int j = 0; j < grid.samples; ++j) {
      herm = std::max(herm, rf.at[j].hermiticity_defect());
      unit = std::max(unit, unitarity_defect(u[j]));
    }
    rec.max_hermiticity_defect = herm;
    rec.max_unitarity_defect = unit;
    rec.Z = zf;
    rec.R = rf;
    res.records.push_back(std::move(rec));
  };

  record_state(0, z, r);

  for (int s = 0; s < n_steps; ++s) {
    double inner_max = 0.0;
    for (int j = 0; j < grid.samples; ++j)
      inner_max = std::max(inner_max, r.at[j].max_abs_inner(lambda_inner));
    if (inner_max < opts.stop_floor) break;

    StepOutput next = nf_step(z, r, res.laplacian, p, quad, deriv,
                              s == 0 ? &dr0 : nullptr, opts.herm_tol);
    for (int j = 0; j < grid.samples; ++j) {
      if (!is_normal_form(next.z.at[j], p))
        throw NumericalError("normal form predicate violated");
      u[j] = multiply(exponential(next.g.at[j], 1.0), u[j]);
    }

    res.records[s].G = next.g;
    z = std::move(next.z);
    r = std::move(next.r);
    record_state(s + 1, z, r);
    res.steps_done = s + 1;
  }

  if (!opts.keep_families) {
    for (std::size_t s = 0; s + 1 < res.records.size(); ++s) {
      res.records[s].Z = BlockFamily();
      res.records[s].R = BlockFamily();
    }
  }
  return res;
}

BlockMatrix NFResult::conjugator(double t, int depth) const {
  if (depth < 0) depth = steps_done;
  BlockMatrix out(part);
  for (int g = 0; g < part->count(); ++g)
    out.blk[g] = MatC::Identity(part->dim_of(g), part->dim_of(g));
  for (int s = 0; s < depth; ++s) {
    const BlockMatrix gs = records[s].G.eval(t);
    out = multiply(exponential(gs, 1.0), out);
  }
  return out;
}

}  // namespace torusnf

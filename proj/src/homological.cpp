#include "torusnf/homological.hpp"

namespace torusnf {

namespace {

// Divisor 2 <eta|k> computed from the laplacian diagonal difference.
double divisor(const ModeSet& ms, int gi, int gj) {
  return ms.norm_sq(gi) - ms.norm_sq(gj);
}

template <typename Get, typename Put>
void solve_entries(const ModeSet& ms, const std::vector<int>& rows,
                   const std::vector<int>& cols, Get&& get, Put&& put) {
  const Complex inv_i(0.0, -1.0);  // 1/i
  for (std::size_t q = 0; q < cols.size(); ++q)
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Complex v = get(static_cast<int>(r), static_cast<int>(q));
      if (v == 0.0) continue;
      const int gi = rows[r], gj = cols[q];
      const double div = divisor(ms, gi, gj);
      if (std::abs(div) < 1e-12)
        throw NumericalError("resonant entry leaked into nr");
      put(static_cast<int>(r), static_cast<int>(q), inv_i * v / div);
    }
}

template <typename GetG, typename GetNr>
double residual_entries(const ModeSet& ms, const std::vector<int>& rows,
                        const std::vector<int>& cols, GetG&& get_g, GetNr&& get_nr) {
  const Complex mi(0.0, -1.0);
  double s = 0.0;
  for (std::size_t q = 0; q < cols.size(); ++q)
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Complex g = get_g(static_cast<int>(r), static_cast<int>(q));
      const Complex nr = get_nr(static_cast<int>(r), static_cast<int>(q));
      if (g == 0.0 && nr == 0.0) continue;
      const Complex e = mi * divisor(ms, rows[r], cols[q]) * g + nr;
      s += std::norm(e);
    }
  return std::sqrt(s);
}

}  // namespace

HomologicalSolution solve_homological(const OperatorMatrix& nr) {
  const ModeSet& ms = nr.modes();
  std::vector<int> all(nr.size());
  for (int i = 0; i < nr.size(); ++i) all[i] = i;
  OperatorMatrix g(nr.modes_ptr());
  solve_entries(
      ms, all, all, [&](int r, int q) { return nr(r, q); },
      [&](int r, int q, Complex v) { g.entries()(r, q) = v; });
  const double res = residual(g, nr);
  return HomologicalSolution{std::move(g), res};
}

BlockMatrix solve_homological(const BlockMatrix& nr) {
  BlockMatrix g(nr.part);
  const ModeSet& ms = *nr.part->modes;
  for (int grp = 0; grp < nr.count(); ++grp) {
    const auto& idx = nr.part->groups[grp];
    solve_entries(
        ms, idx, idx, [&](int r, int q) { return nr.blk[grp](r, q); },
        [&](int r, int q, Complex v) { g.blk[grp](r, q) = v; });
  }
  return g;
}

double residual(const OperatorMatrix& g, const OperatorMatrix& nr) {
  const ModeSet& ms = g.modes();
  std::vector<int> all(g.size());
  for (int i = 0; i < g.size(); ++i) all[i] = i;
  return residual_entries(
      ms, all, all, [&](int r, int q) { return g(r, q); },
      [&](int r, int q) { return nr(r, q); });
}

double residual(const BlockMatrix& g, const BlockMatrix& nr) {
  const ModeSet& ms = *g.part->modes;
  double s = 0.0;
  for (int grp = 0; grp < g.count(); ++grp) {
    const auto& idx = g.part->groups[grp];
    const double part = residual_entries(
        ms, idx, idx, [&](int r, int q) { return g.blk[grp](r, q); },
        [&](int r, int q) { return nr.blk[grp](r, q); });
    s += part * part;
  }
  return std::sqrt(s);
}

}  // namespace torusnf

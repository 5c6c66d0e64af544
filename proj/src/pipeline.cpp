#include "torusnf/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace torusnf {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_sigma(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", s);
  return buf;
}

struct Pipeline {
  ExperimentConfig cfg;
  std::filesystem::path out_dir;
  ojson report;
  ojson timings;

  MetricTensor metric;
  ModeSetPtr modes;
  std::optional<ClusterPartition> partition;
  std::optional<PartitionVerification> verification;
  std::optional<NFResult> nf;
  std::optional<EvolveResult> evolution;

  std::string current_stage = "setup";

  void prepare() {
    metric = metric_from_basis(cfg.basis);
    modes = ModeSet::build(cfg.lambda, metric);
    std::filesystem::create_directories(out_dir);
  }

  template <typename F>
  void timed(const std::string& stage, F&& f) {
    current_stage = stage;
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    timings[stage + "_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  }

  void stage_validate() {
    const auto errs = validate_params(cfg.params);
    if (!errs.empty()) {
      std::string msg = "parameter validation failed:";
      for (const auto& e : errs) msg += " [" + e + "]";
      throw ValidationError(msg);
    }
    std::cout << "parameters ok; delta* = " << cfg.params.delta_star() << "\n";
    report["parameters"] = {{"delta", cfg.params.delta}, {"epsilon", cfg.params.epsilon},
                            {"tau", cfg.params.tau},     {"m", cfg.params.m},
                            {"d", cfg.params.d},         {"delta_star", cfg.params.delta_star()}};
  }

  void stage_partition() {
    const std::uint64_t key = partition_cache_key(*modes, cfg.params);
    char keybuf[32];
    std::snprintf(keybuf, sizeof(keybuf), "%016llx",
                  static_cast<unsigned long long>(key));
    const auto cache = out_dir / ("partition_" + std::string(keybuf) + ".bin");
    bool from_cache = false;
    if (auto loaded = load_partition(cache, key, modes->size(), modes->dim())) {
      partition = std::move(*loaded);
      from_cache = true;
    } else {
      partition = build_partition(*modes, cfg.params);
      save_partition(cache, *partition, key);
    }
    verification = verify_partition(*partition, *modes, cfg.params, cfg.partition_sigmas);

    ojson dump;
    dump["schema_version"] = 1;
    ojson blocks = ojson::array();
    for (const auto& blk : partition->blocks) {
      ojson b;
      ojson basis = ojson::array();
      for (const auto& row : blk.module.basis) {
        ojson r = ojson::array();
        for (int i = 0; i < row.size(); ++i) r.push_back(row[i]);
        basis.push_back(r);
      }
      b["module_basis"] = basis;
      ojson members = ojson::array();
      for (int i : blk.members) {
        ojson xi = ojson::array();
        for (int a = 0; a < modes->dim(); ++a) xi.push_back(modes->mode(i)[a]);
        members.push_back(xi);
      }
      b["members"] = members;
      b["ell"] = blk.ell;
      b["size"] = blk.members.size();
      blocks.push_back(std::move(b));
    }
    dump["blocks"] = std::move(blocks);
    ojson stats;
    stats["mode_count"] = modes->size();
    stats["block_count"] = partition->blocks.size();
    stats["singletons"] = partition->stats.singletons;
    stats["max_block_size"] = partition->stats.max_block_size;
    stats["n_star"] = partition->stats.n_star;
    stats["full_rank_components"] = partition->stats.full_rank_components;
    ojson hist;
    for (const auto& [size, count] : verification->size_histogram)
      hist[std::to_string(size)] = count;
    stats["size_histogram"] = hist;
    dump["stats"] = stats;
    ojson ver;
    ver["p3_spread"] = verification->p3_spread;
    ver["K_hat"] = verification->k_hat;
    ver["C_hat"] = verification->c_hat;
    ojson ks;
    for (const auto& [s, v] : verification->k_sigma) ks[fmt_sigma(s)] = v;
    ver["K_sigma"] = ks;
    dump["verification"] = ver;

    std::ofstream os(out_dir / "partition.json");
    os << dump.dump(2) << "\n";
    report["partition"] = {{"stats", stats}, {"verification", ver}};
    timings["partition_cache_hit"] = from_cache;
  }

  void stage_normal_form() {
    if (!cfg.has_normal_form)
      throw ValidationError("config has no normal_form block");
    NFOptions opts;
    opts.quad_nodes = cfg.quad_nodes;
    opts.deriv = cfg.deriv;
    opts.buffer = cfg.buffer;
    nf = run_normal_form(cfg.symbol, cfg.params, modes, cfg.grid, cfg.nf_steps, opts);

    ojson steps = ojson::array();
    for (const auto& rec : nf->records) {
      ojson r;
      r["step"] = rec.step;
      r["fitted_order"] = rec.remainder_order.all_zero()
                              ? ojson("-inf")
                              : ojson(rec.remainder_order.order);
      r["fit_residual"] = rec.remainder_order.residual;
      r["hermiticity_defect"] = rec.max_hermiticity_defect;
      r["unitarity_defect"] = rec.max_unitarity_defect;
      steps.push_back(std::move(r));
    }
    ojson nfj;
    nfj["schema_version"] = 1;
    nfj["steps_done"] = nf->steps_done;
    nfj["interaction_groups"] = nf->part->count();
    nfj["steps"] = std::move(steps);
    std::ofstream os(out_dir / "nf_report.json");
    os << nfj.dump(2) << "\n";
    report["normal_form"] = nfj;
  }

  VecC initial_state() const {
    if (cfg.psi0.kind == Psi0Spec::Kind::plane_wave) {
      if (!modes->contains(cfg.psi0.xi))
        throw ValidationError("psi0 plane-wave mode lies outside the mode set");
      return plane_wave(*modes, cfg.psi0.xi);
    }
    return random_state(*modes, cfg.psi0.seed, cfg.psi0.decay);
  }

  void stage_evolve() {
    if (!cfg.has_evolution) throw ValidationError("config has no evolution block");
    BlockHamiltonian h;
    if (cfg.ev_system == "full") {
      auto part = SupportPartition::from_fibers(modes, cfg.symbol.fourier_support());
      h = hamiltonian_from_symbol(cfg.symbol, part);
    } else {
      if (!nf) stage_normal_form();
      h = hamiltonian_from_families(
          nf->laplacian, &nf->Z(),
          cfg.ev_system == "normal_form_plus_remainder" ? &nf->R() : nullptr);
    }
    EvolveOptions opts;
    opts.record_stride = cfg.record_stride;
    evolution = evolve_blocks(h, initial_state(), cfg.ev_s, cfg.ev_t_end, cfg.ev_h,
                              cfg.ev_sigmas, opts);

    std::ofstream os(out_dir / "trace.csv");
    os << "t";
    for (double s : cfg.ev_sigmas) os << ",norm_sigma_" << fmt_sigma(s);
    os << "\n";
    const NormTrace& tr = evolution->trace;
    std::vector<int> cols;
    for (double s : cfg.ev_sigmas) cols.push_back(tr.sigma_index(s));
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      os << fmt17(tr.times[i]);
      for (int c : cols) os << "," << fmt17(tr.norms[c][i]);
      os << "\n";
    }
    report["evolution"] = {{"system", cfg.ev_system},
                           {"l2_drift", evolution->l2_drift},
                           {"steps", tr.times.size() - 1},
                           {"trace_file", "trace.csv"}};
  }

  void stage_fit() {
    if (!evolution) stage_evolve();
    const double sigma = cfg.has_fit ? cfg.fit_sigma : cfg.ev_sigmas.front();
    const double lo = cfg.has_fit ? cfg.fit_lo : 1.0;
    const double hi = cfg.has_fit && cfg.fit_hi > 0 ? cfg.fit_hi : cfg.ev_t_end - cfg.ev_s;
    const GrowthFit fit = fit_growth(evolution->trace, sigma, lo, hi);
    ojson fj;
    fj["sigma"] = sigma;
    fj["exponent"] = fit.exponent;
    fj["constant"] = fit.constant;
    fj["window"] = {fit.window_lo, fit.window_hi};
    fj["residual"] = fit.residual;
    std::ofstream os(out_dir / "fit.json");
    os << fj.dump(2) << "\n";
    report["fit"] = fj;
  }

  void write_report() {
    report["schema_version"] = 1;
    report["seed"] = cfg.seed;
    std::ofstream os(out_dir / "report.json");
    os << report.dump(2) << "\n";
    // Timings are wall-clock and intentionally kept out of report.json so the
    // report stays bit-identical across runs.
    std::ofstream ts(out_dir / "timings.json");
    ts << timings.dump(2) << "\n";
  }
};

}  // namespace

int run_experiment(const std::filesystem::path& config_path, const std::string& subcommand,
                   const RunOptions& opts) {
  Pipeline p;
  try {
    p.cfg = parse_config(config_path);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (opts.out_dir) p.cfg.out_dir = *opts.out_dir;
  if (opts.seed) {
    p.cfg.seed = *opts.seed;
    if (!p.cfg.psi0.seed_given) p.cfg.psi0.seed = *opts.seed;
  }
#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
  p.out_dir = p.cfg.out_dir;

  try {
    p.prepare();
    if (subcommand == "validate") {
      p.timed("validate", [&] { p.stage_validate(); });
    } else if (subcommand == "partition") {
      p.timed("validate", [&] { p.stage_validate(); });
      p.timed("partition", [&] { p.stage_partition(); });
    } else if (subcommand == "normal-form") {
      p.timed("validate", [&] { p.stage_validate(); });
      p.timed("normal_form", [&] { p.stage_normal_form(); });
    } else if (subcommand == "evolve") {
      p.timed("validate", [&] { p.stage_validate(); });
      p.timed("evolve", [&] { p.stage_evolve(); });
    } else if (subcommand == "fit") {
      p.timed("validate", [&] { p.stage_validate(); });
      p.timed("fit", [&] { p.stage_fit(); });
    } else if (subcommand == "all") {
      p.timed("validate", [&] { p.stage_validate(); });
      p.timed("partition", [&] { p.stage_partition(); });
      p.timed("normal_form", [&] { p.stage_normal_form(); });
      p.timed("evolve", [&] { p.stage_evolve(); });
      p.timed("fit", [&] { p.stage_fit(); });
    } else {
      std::cerr << "unknown subcommand: " << subcommand << "\n";
      return 1;
    }
    p.write_report();
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort in stage " << p.current_stage << ": " << e.what() << "\n";
    ojson diag;
    diag["stage"] = p.current_stage;
    diag["error"] = e.what();
    std::error_code ec;
    std::filesystem::create_directories(p.out_dir, ec);
    std::ofstream os(p.out_dir / "diagnostics.json");
    os << diag.dump(2) << "\n";
    return 3;
  }
}

}  // namespace torusnf

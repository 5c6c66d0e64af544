#include "torusnf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace torusnf {

using nlohmann::json;

namespace {

class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  const json* opt(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& req(const std::string& key) {
    const json* v = opt(key);
    if (!v) throw ConfigError("missing key: " + key + " (in " + where_ + ")");
    return *v;
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("unknown key: " + it.key() + " (in " + where_ + ")");
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double num(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
  return v;
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
  return j.get<int>();
}

VecI int_vector(const json& j, const std::string& what, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw ConfigError(what + " must be an array of " + std::to_string(d) + " integers");
  VecI v(d);
  for (int i = 0; i < d; ++i) v[i] = integer(j[i], what);
  return v;
}

std::vector<double> num_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a nonempty array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num(x, what));
  return v;
}

TimeProfile parse_profile(const json& j) {
  Obj o(j, "profile");
  const std::string kind = o.req("kind").get<std::string>();
  TimeProfile p;
  if (kind == "constant") {
    p.kind = ProfileKind::constant;
  } else if (kind == "cosine") {
    p.kind = ProfileKind::cosine;
  } else if (kind == "sine") {
    p.kind = ProfileKind::sine;
  } else {
    throw ConfigError("profile kind must be constant, cosine or sine");
  }
  p.amp = num(o.req("amp"), "profile amp");
  if (const json* w = o.opt("omega"))
    p.omega = num(*w, "profile omega");
  else if (p.kind != ProfileKind::constant)
    throw ConfigError("missing key: omega (in profile)");
  o.done();
  return p;
}

SymbolSpec parse_symbol(const json& j, int d) {
  Obj o(j, "symbol");
  const json& terms = o.req("terms");
  if (!terms.is_array()) throw ConfigError("symbol terms must be an array");
  SymbolSpec spec;
  for (const auto& tj : terms) {
    Obj to(tj, "symbol term");
    SymbolTerm term;
    term.profile = parse_profile(to.req("profile"));
    term.order = num(to.req("order"), "term order");
    const json& coeffs = to.req("coeffs");
    if (!coeffs.is_array()) throw ConfigError("term coeffs must be an array");
    for (const auto& cj : coeffs) {
      Obj co(cj, "coefficient");
      const VecI k = int_vector(co.req("k"), "coefficient k", d);
      double re = 0.0, im = 0.0;
      if (const json* r = co.opt("re")) re = num(*r, "coefficient re");
      if (const json* i = co.opt("im")) im = num(*i, "coefficient im");
      co.done();
      term.coeffs.emplace_back(k, Complex(re, im));
    }
    to.done();
    spec.terms.push_back(std::move(term));
  }
  o.done();
  return spec;
}

Psi0Spec parse_psi0(const json& j, int d) {
  Obj o(j, "psi0");
  Psi0Spec p;
  const std::string kind = o.req("kind").get<std::string>();
  if (kind == "plane_wave") {
    p.kind = Psi0Spec::Kind::plane_wave;
    p.xi = int_vector(o.req("xi"), "psi0 xi", d);
  } else if (kind == "random") {
    p.kind = Psi0Spec::Kind::random;
    if (const json* s = o.opt("seed")) {
      p.seed = static_cast<std::uint64_t>(integer(*s, "psi0 seed"));
      p.seed_given = true;
    }
    p.decay = num(o.req("decay"), "psi0 decay");
  } else {
    throw ConfigError("psi0 kind must be plane_wave or random");
  }
  o.done();
  return p;
}

// The grid is periodic iff it spans an integer number of periods of every
// non-constant profile (then trig interpolation and spectral derivatives
// apply); an explicit flag overrides the detection.
bool detect_periodic(const SymbolSpec& spec, double span) {
  for (const auto& term : spec.terms) {
    if (term.profile.kind == ProfileKind::constant || term.profile.amp == 0.0) continue;
    const double cycles = std::abs(term.profile.omega) * span / (2.0 * M_PI);
    if (std::abs(cycles - std::round(cycles)) > 1e-9) return false;
  }
  return true;
}

}  // namespace

ExperimentConfig parse_config_json(const json& doc) {
  Obj root(doc, "config");
  ExperimentConfig cfg;

  {
    Obj lat(root.req("lattice"), "lattice");
    const json& basis = lat.req("basis");
    if (!basis.is_array() || basis.empty()) throw ConfigError("lattice basis must be an array");
    const int d = static_cast<int>(basis.size());
    cfg.basis.vectors = Mat(d, d);
    for (int a = 0; a < d; ++a) {
      if (!basis[a].is_array() || static_cast<int>(basis[a].size()) != d)
        throw ConfigError("lattice basis rows must have matching dimension");
      for (int i = 0; i < d; ++i)
        cfg.basis.vectors(i, a) = num(basis[a][i], "basis entry");
    }
    lat.done();
  }
  const int d = cfg.basis.dim();

  {
    Obj par(root.req("params"), "params");
    cfg.params.delta = num(par.req("delta"), "delta");
    cfg.params.epsilon = num(par.req("epsilon"), "epsilon");
    cfg.params.tau = num(par.req("tau"), "tau");
    cfg.params.m = num(par.req("m"), "m");
    cfg.params.d = integer(par.req("d"), "d");
    par.done();
    if (cfg.params.d != d)
      throw ValidationError("params d does not match the lattice dimension");
  }

  {
    Obj tr(root.req("truncation"), "truncation");
    cfg.lambda = num(tr.req("lambda"), "lambda");
    if (const json* b = tr.opt("buffer")) cfg.buffer = num(*b, "buffer");
    tr.done();
    if (!(cfg.buffer >= 0.0 && cfg.buffer < 1.0))
      throw ValidationError("buffer must lie in [0, 1)");
  }

  cfg.symbol = parse_symbol(root.req("symbol"), d);

  if (const json* nf = root.opt("normal_form")) {
    cfg.has_normal_form = true;
    Obj o(*nf, "normal_form");
    cfg.nf_steps = integer(o.req("steps"), "steps");
    if (cfg.nf_steps < 0) throw ConfigError("steps must be nonnegative");
    {
      Obj tg(o.req("time_grid"), "time_grid");
      cfg.grid.t0 = num(tg.req("t0"), "t0");
      cfg.grid.t1 = num(tg.req("t1"), "t1");
      cfg.grid.samples = integer(tg.req("samples"), "samples");
      if (const json* p = tg.opt("periodic"))
        cfg.grid.periodic = p->get<bool>();
      else
        cfg.grid.periodic = detect_periodic(cfg.symbol, cfg.grid.t1 - cfg.grid.t0);
      tg.done();
      if (cfg.grid.samples < 5) throw ValidationError("time grid needs at least 5 samples");
      if (!(cfg.grid.t1 > cfg.grid.t0)) throw ValidationError("time grid needs t1 > t0");
    }
    if (const json* q = o.opt("quadrature_nodes")) cfg.quad_nodes = integer(*q, "quadrature_nodes");
    if (cfg.quad_nodes < 1) throw ConfigError("quadrature_nodes must be positive");
    if (const json* s = o.opt("time_derivative")) {
      const std::string v = s->get<std::string>();
      if (v == "auto") cfg.deriv = DerivScheme::automatic;
      else if (v == "fd4") cfg.deriv = DerivScheme::fd4;
      else if (v == "spectral") cfg.deriv = DerivScheme::spectral;
      else throw ConfigError("time_derivative must be auto, fd4 or spectral");
    }
    o.done();
  }

  if (const json* ev = root.opt("evolution")) {
    cfg.has_evolution = true;
    Obj o(*ev, "evolution");
    cfg.ev_s = num(o.req("s"), "s");
    cfg.ev_t_end = num(o.req("t_end"), "t_end");
    if (const json* h = o.opt("h")) cfg.ev_h = num(*h, "h");
    if (!(cfg.ev_h > 0)) throw ValidationError("h must be positive");
    if (!(cfg.ev_t_end > cfg.ev_s)) throw ValidationError("t_end must exceed s");
    cfg.ev_sigmas = num_vector(o.req("sigmas"), "sigmas");
    cfg.psi0 = parse_psi0(o.req("psi0"), d);
    if (const json* sys = o.opt("system")) {
      cfg.ev_system = sys->get<std::string>();
      if (cfg.ev_system != "full" && cfg.ev_system != "normal_form" &&
          cfg.ev_system != "normal_form_plus_remainder")
        throw ConfigError("system must be full, normal_form or normal_form_plus_remainder");
    }
    if (const json* r = o.opt("record_stride")) cfg.record_stride = integer(*r, "record_stride");
    if (cfg.record_stride < 1) throw ConfigError("record_stride must be positive");
    o.done();
  }

  if (const json* f = root.opt("fit")) {
    cfg.has_fit = true;
    Obj o(*f, "fit");
    cfg.fit_sigma = num(o.req("sigma"), "fit sigma");
    const json& w = o.req("window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("fit window must be [lo, hi]");
    cfg.fit_lo = num(w[0], "fit window");
    cfg.fit_hi = num(w[1], "fit window");
    o.done();
  }

  if (const json* p = root.opt("partition")) {
    Obj o(*p, "partition");
    cfg.partition_sigmas = num_vector(o.req("sigmas"), "partition sigmas");
    o.done();
  }

  if (const json* out = root.opt("output")) {
    Obj o(*out, "output");
    cfg.out_dir = o.req("dir").get<std::string>();
    o.done();
  }

  if (const json* s = root.opt("seed"))
    cfg.seed = static_cast<std::uint64_t>(integer(*s, "seed"));

  root.done();

  if (cfg.lambda_inner() < 4.0)
    throw ValidationError("inner annulus too small: lambda (1 - buffer) must be >= 4");
  if (!cfg.psi0.seed_given) cfg.psi0.seed = cfg.seed;
  {
    const auto errs = validate_params(cfg.params);
    if (!errs.empty()) {
      std::string msg = "parameter validation failed:";
      for (const auto& e : errs) msg += " [" + e + "]";
      throw ValidationError(msg);
    }
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

}  // namespace torusnf

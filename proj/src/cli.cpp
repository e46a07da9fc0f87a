#include "shadowkit/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "shadowkit/analytic.hpp"
#include "shadowkit/continuation.hpp"
#include "shadowkit/error.hpp"
#include "shadowkit/io.hpp"
#include "shadowkit/layer.hpp"
#include "shadowkit/spectrum.hpp"

namespace shadowkit::cli {

namespace fs = std::filesystem;
using io::fmt;

namespace {

// Minimal pretty-printing JSON emitter with fixed number formatting.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  JsonWriter& key(const std::string& k) {
    separator();
    os_ << quote(k) << ": ";
    pending_key_ = true;
    return *this;
  }
  void value(double x) {
    prefix();
    os_ << (std::isfinite(x) ? fmt(x) : "null");
  }
  void value(int x) {
    prefix();
    os_ << x;
  }
  void value(bool x) {
    prefix();
    os_ << (x ? "true" : "false");
  }
  void value(const std::string& s) {
    prefix();
    os_ << quote(s);
  }
  void value(const char* s) { value(std::string(s)); }

  void finish() { os_ << '\n'; }

 private:
  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += ch;
      }
    }
    return out + "\"";
  }
  void indent() { os_ << '\n' << std::string(2 * first_.size(), ' '); }
  void separator() {
    if (!first_.empty()) {
      if (!first_.back()) os_ << ',';
      first_.back() = false;
      indent();
    }
  }
  void prefix() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    separator();
  }
  void open(char c) {
    prefix();
    os_ << c;
    first_.push_back(true);
  }
  void close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) indent();
    os_ << c;
  }

  std::ostream& os_;
  std::vector<bool> first_;
  bool pending_key_ = false;
};

std::map<std::string, std::string> config_map(const RunConfig& c) {
  const model::Params& p = c.params;
  return {{"command", c.command},
          {"a1", fmt(p.a1)},
          {"b1", fmt(p.b1)},
          {"c1", fmt(p.c1)},
          {"a2", fmt(p.a2)},
          {"b2", fmt(p.b2)},
          {"c2", fmt(p.c2)},
          {"L", fmt(p.L)},
          {"eps", fmt(c.eps)},
          {"k", std::to_string(c.k)},
          {"x0", fmt(c.x0)},
          {"n", std::to_string(c.n)},
          {"s_max", fmt(c.s_max)},
          {"step", fmt(c.step)},
          {"eps_min", fmt(c.eps_min)},
          {"tol", fmt(c.tol)},
          {"eps_lo", fmt(c.eps_lo)},
          {"eps_hi", fmt(c.eps_hi)},
          {"k_max", std::to_string(c.k_max)},
          {"count", std::to_string(c.count)},
          {"lambda_points", std::to_string(c.lambda_points)},
          {"profiles", c.profiles ? "true" : "false"},
          {"out_dir", c.out_dir}};
}

void write_config_json(JsonWriter& j, const RunConfig& c) {
  j.key("config").begin_object();
  for (const auto& [k, v] : config_map(c)) j.key(k).value(v);
  j.end_object();
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + p.string());
  return f;
}

void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

void validate(const RunConfig& c) {
  static const std::vector<std::string> cmds{"analyze", "detect", "branch", "layer", "stability", "maxwell"};
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) config_error("unknown command '" + c.command + "'");
  if (!(c.eps > 0.0)) config_error("key eps: must be > 0");
  if (c.k < 1) config_error("key k: must be >= 1");
  if (c.n != 0 && c.n < 2) config_error("key n: must be >= 2 (or 0 for the default)");
  if (!(c.s_max > 0.0)) config_error("key s_max: must be > 0");
  if (!(c.step > 0.0)) config_error("key step: must be > 0");
  if (!(c.tol > 0.0)) config_error("key tol: must be > 0");
  if (!(c.eps_lo > 0.0 && c.eps_hi > c.eps_lo)) config_error("keys eps_lo/eps_hi: need 0 < eps_lo < eps_hi");
  if (c.k_max < 1) config_error("key k_max: must be >= 1");
  if (c.count < 1) config_error("key count: must be >= 1");
  if (c.lambda_points < 2) config_error("key lambda_points: must be >= 2");
  if (c.eps_min < 0.0) config_error("key eps_min: must be >= 0");
}

const char* regime_name(analytic::Regime r) {
  switch (r) {
    case analytic::Regime::VbarBelow4_3: return "vbar_below_4_3";
    case analytic::Regime::VbarEq4_3: return "vbar_eq_4_3";
    case analytic::Regime::VbarAbove4_3: return "vbar_above_4_3";
  }
  return "unknown";
}

void write_chart(JsonWriter& j, const analytic::SignChart& ch) {
  j.begin_object();
  j.key("alpha").value(ch.alpha);
  j.key("beta").value(ch.beta);
  j.key("gamma").value(ch.gamma);
  j.key("roots_in_window").begin_array();
  for (double r : ch.roots_in_window) j.value(r);
  j.end_array();
  j.key("regime").value(regime_name(ch.regime));
  j.end_object();
}

void write_targets(JsonWriter& j, const analytic::LayerTargets& t) {
  j.begin_object();
  j.key("x0").value(t.x0);
  j.key("x1").value(t.x1);
  j.key("x2").value(t.x2);
  j.key("v2_limit").value(t.v2_limit);
  j.key("lambda0_bar").value(t.lambda0_bar);
  j.end_object();
}

double resolve_x0(const RunConfig& c) {
  if (c.x0 > 0.0) return c.x0;
  const model::Params& p = c.params;
  const double den = (p.a1 + p.c1) * (p.a2 - p.c2);
  const double x1 = std::max(0.0, ((p.a2 - p.c2) * p.c1 - 2.0 * p.a1 * p.c2) * p.L / den);
  const double x2 = ((p.a2 - p.c2) * p.c1 - p.a1 * p.c2) * p.L / den;
  return 0.5 * (x1 + x2);
}

void cmd_analyze(const RunConfig& c, std::ostream& log) {
  const model::Params& P = c.params;
  const model::ConstantState cs = model::constant_state(P);
  const model::Admissibility adm = model::admissible(P);
  std::ofstream f = open_out(out_path(c, "analysis.json"));
  JsonWriter j(f);
  j.begin_object();
  write_config_json(j, c);
  j.key("admissible").begin_object();
  j.key("ordering").value(adm.ordering);
  j.key("bifurcation_positive").value(adm.bifurcation_positive);
  j.key("lambda_window").begin_array();
  j.value(adm.lambda_window.first);
  j.value(adm.lambda_window.second);
  j.end_array();
  j.end_object();
  j.key("constant_state").begin_object();
  j.key("v_bar").value(cs.v_bar);
  j.key("lambda_bar").value(cs.lambda_bar);
  j.end_object();

  j.key("eps_k").begin_array();
  if (adm.bifurcation_positive) {
    for (int k = 1; k <= 8; ++k) {
      j.begin_object();
      j.key("k").value(k);
      j.key("eps").value(analytic::bifurcation_eps(k, P));
      j.key("mu_dot").value(analytic::mu_dot(k, P));
      j.end_object();
    }
  }
  j.end_array();

  if (P.b1 == 0.0 && adm.bifurcation_positive) {
    j.key("t").value(analytic::t_parameter(P));
    j.key("pitchfork").begin_array();
    for (int k = 1; k <= 8; ++k) {
      const analytic::PitchforkCoeffs pc = analytic::pitchfork_coeffs(k, P);
      j.begin_object();
      j.key("k").value(k);
      j.key("K1").value(pc.K1);
      j.key("K2").value(pc.K2);
      j.key("K2_chart").value(pc.K2_chart);
      j.key("lambda2_bar").value(pc.lambda2_bar);
      j.key("int_phi2").value(pc.int_phi2);
      j.key("int_phi2_cos2k").value(pc.int_phi2_cos2k);
      try {
        const analytic::StabilityClass sc = analytic::classify_stability(k, P);
        j.key("direction").value(sc.direction == analytic::Direction::Right ? "right" : "left");
        j.key("stable").value(sc.stable);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate) throw;
        j.key("direction").value("degenerate");
        j.key("stable").value(false);
      }
      j.end_object();
    }
    j.end_array();
    j.key("sign_chart");
    write_chart(j, analytic::sign_chart(P));
    j.key("expansion_sign_chart");
    write_chart(j, analytic::expansion_sign_chart(P));
  }

  if (P.b1 == 0.0) {
    try {
      const double x0 = resolve_x0(c);
      j.key("layer_targets");
      write_targets(j, analytic::layer_targets(x0, P));
    } catch (const Error& e) {
      j.key("layer_targets").begin_object();
      j.key("error").value(e.what());
      j.end_object();
    }
  }
  try {
    j.key("maxwell_lambda").value(analytic::maxwell_lambda(P));
  } catch (const Error& e) {
    j.value(std::string(e.what()));
  }
  j.end_object();
  j.finish();
  log << "wrote analysis.json\n";
}

void cmd_detect(const RunConfig& c, std::ostream& log) {
  continuation::DetectOptions o;
  if (c.n > 0) o.n = c.n;
  const auto found = continuation::detect_bifurcations(c.params, c.eps_lo, c.eps_hi, c.k_max, o);
  std::ofstream f = open_out(out_path(c, "bifurcations.csv"));
  io::write_comment_block(f, resolved_config(c));
  f << "k,eps_detected,eps_analytic,rel_error,kernel_mean,projection\n";
  for (const auto& d : found) {
    double ea = std::nan("");
    try {
      ea = analytic::bifurcation_eps(d.k, c.params);
    } catch (const Error&) {
    }
    f << d.k << ',' << fmt(d.eps) << ',' << fmt(ea) << ',' << fmt(std::abs(d.eps - ea) / ea) << ','
      << fmt(d.kernel_mean) << ',' << fmt(d.projection) << '\n';
  }
  log << "wrote bifurcations.csv (" << found.size() << " crossings)\n";
}

void cmd_branch(const RunConfig& c, std::ostream& log) {
  continuation::ContinuationOptions o;
  o.n = c.n > 0 ? c.n : 200;
  o.step = c.step;
  o.s_max = c.s_max;
  o.tol = c.tol;
  auto [plus, minus] = continuation::branch_from_bifurcation(c.k, c.params, o);
  if (c.eps_min > 0.0) {
    continuation::ContinuationOptions e = o;
    e.compute_stability = false;
    plus = continuation::extend_to_small_eps(plus, c.eps_min, e);
  }
  const continuation::Branch B = continuation::merge(plus, minus);
  std::ofstream f = open_out(out_path(c, "branch.csv"));
  continuation::write_branch_csv(f, B, resolved_config(c));
  if (c.profiles) {
    const fs::path dir = out_path(c, "profiles");
    fs::create_directories(dir);
    for (std::size_t i = 0; i < B.points.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "profile_%04zu.csv", i);
      std::ofstream pf = open_out(dir / name);
      continuation::write_profile_csv(pf, B.points[i], resolved_config(c));
    }
  }
  std::ofstream ev = open_out(out_path(c, "branch_events.csv"));
  io::write_comment_block(ev, resolved_config(c));
  ev << "kind,index,eps,detail\n";
  for (const auto& e : B.events) ev << continuation::to_string(e.kind) << ',' << e.index << ',' << fmt(e.eps) << ',' << e.detail << '\n';
  log << "wrote branch.csv (" << B.points.size() << " points)\n";
}

void cmd_layer(const RunConfig& c, std::ostream& log) {
  layer::LayerOptions o;
  o.n = c.n;
  o.tol = c.tol;
  const double x0 = resolve_x0(c);
  const layer::LayerReport r = layer::layer_solve(x0, c.eps, c.params, o);
  {
    std::ofstream f = open_out(out_path(c, "layer_report.json"));
    JsonWriter j(f);
    j.begin_object();
    write_config_json(j, c);
    j.key("eps").value(r.eps);
    j.key("x0").value(r.x0);
    j.key("n").value(r.n);
    j.key("lambda_eps").value(r.lambda_eps);
    j.key("layer_x").value(r.layer_x);
    j.key("v0").value(r.v0);
    j.key("vL").value(r.vL);
    j.key("v2_at_lambda_eps").value(r.v2_at_lambda_eps);
    j.key("sup_dev").value(r.sup_dev);
    j.key("sup_dev_seed").value(r.sup_dev_seed);
    j.key("maxwell_gap").value(r.maxwell_gap_at_lambda0);
    j.key("maxwell_gap_at_lambda_eps").value(r.maxwell_gap_at_lambda_eps);
    j.key("constraint_residual").value(r.constraint_residual);
    j.key("newton_iterations").value(r.newton_iterations);
    j.key("targets");
    write_targets(j, r.targets);
    j.end_object();
    j.finish();
  }
  layer::HeteroclinicOptions ho;
  ho.gap_tol = std::numeric_limits<double>::infinity();
  const layer::Heteroclinic H = layer::heteroclinic(r.lambda_eps, c.params, ho);
  const layer::LayerAnsatz A = layer::compose_ansatz(H, r.layer_x, r.eps, r.state.grid);
  const layer::ResidualG G = layer::residual_G(A, r.lambda_eps, c.params);
  std::ofstream f = open_out(out_path(c, "layer_profile.csv"));
  io::write_comment_block(f, resolved_config(c));
  f << "x,v,V_eps,G_eps\n";
  for (int i = 0; i < r.state.grid.size(); ++i) {
    f << fmt(r.state.grid.node(i)) << ',' << fmt(r.state.v(i)) << ',' << fmt(A.V_eps(i)) << ',' << fmt(G.profile(i))
      << '\n';
  }
  log << "wrote layer_report.json and layer_profile.csv (lambda_eps=" << fmt(r.lambda_eps) << ")\n";
}

void cmd_stability(const RunConfig& c, std::ostream& log) {
  const model::ConstantState cs = model::constant_state(c.params);
  const discretize::Grid grid(c.n > 0 ? c.n : 200, c.params.L);
  const discretize::State S{Eigen::VectorXd::Constant(grid.size(), cs.v_bar), cs.lambda_bar, grid};
  const auto ev = spectrum::stability_spectrum(S, c.eps, c.params, c.count);
  std::ofstream f = open_out(out_path(c, "spectrum.csv"));
  io::write_comment_block(f, resolved_config(c));
  f << "index,real,imag\n";
  for (std::size_t i = 0; i < ev.size(); ++i) f << i << ',' << fmt(ev[i].real()) << ',' << fmt(ev[i].imag()) << '\n';
  log << "wrote spectrum.csv\n";
}

void cmd_maxwell(const RunConfig& c, std::ostream& log) {
  const model::Admissibility adm = model::admissible(c.params);
  const double lo = adm.lambda_window.first, hi = adm.lambda_window.second;
  std::ofstream f = open_out(out_path(c, "maxwell.csv"));
  std::string header = resolved_config(c);
  header += "maxwell_lambda=" + fmt(analytic::maxwell_lambda(c.params));
  io::write_comment_block(f, header);
  f << "lambda,v1,v2,gap\n";
  for (int i = 0; i < c.lambda_points; ++i) {
    const double lam = lo + (hi - lo) * i / (c.lambda_points - 1);
    const model::Equilibria e = model::equilibria_of_lambda(lam, c.params);
    f << fmt(lam) << ',' << fmt(e.v1) << ',' << fmt(e.v2) << ',' << fmt(analytic::maxwell_gap(lam, c.params)) << '\n';
  }
  log << "wrote maxwell.csv\n";
}

}  // namespace

std::string resolved_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : config_map(cfg)) os << k << '=' << v << '\n';
  return os.str();
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    validate(cfg);
    cfg.params.validate();
    if (cfg.command == "analyze") cmd_analyze(cfg, log);
    else if (cfg.command == "detect") cmd_detect(cfg, log);
    else if (cfg.command == "branch") cmd_branch(cfg, log);
    else if (cfg.command == "layer") cmd_layer(cfg, log);
    else if (cfg.command == "stability") cmd_stability(cfg, log);
    else cmd_maxwell(cfg, log);
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (classify(e.kind())) {
      case ErrorClass::Config: return 1;
      case ErrorClass::Model: return 2;
      case ErrorClass::Solver: return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 3;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Shadow-system steady states: bifurcation, continuation and transition layers", "shadowkit"};
  app.add_option("command", cfg.command, "analyze | detect | branch | layer | stability | maxwell")
      ->required()
      ->check(CLI::IsMember({"analyze", "detect", "branch", "layer", "stability", "maxwell"}));
  app.set_config("--config", "", "key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  model::Params& p = cfg.params;
  app.add_option("--a1", p.a1);
  app.add_option("--b1", p.b1);
  app.add_option("--c1", p.c1);
  app.add_option("--a2", p.a2);
  app.add_option("--b2", p.b2);
  app.add_option("--c2", p.c2);
  app.add_option("--L", p.L);
  app.add_option("--eps", cfg.eps);
  app.add_option("--k", cfg.k);
  app.add_option("--x0", cfg.x0);
  app.add_option("--n", cfg.n);
  app.add_option("--s_max", cfg.s_max);
  app.add_option("--step", cfg.step);
  app.add_option("--eps_min", cfg.eps_min);
  app.add_option("--tol", cfg.tol);
  app.add_option("--eps_lo", cfg.eps_lo);
  app.add_option("--eps_hi", cfg.eps_hi);
  app.add_option("--k_max", cfg.k_max);
  app.add_option("--count", cfg.count);
  app.add_option("--lambda_points", cfg.lambda_points);
  app.add_option("--profiles", cfg.profiles);
  app.add_option("--out_dir", cfg.out_dir);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: ConfigError: " << e.get_name() << ": " << e.what() << '\n';
    return 1;
  }
  if (const char* env = std::getenv("SHADOWKIT_OUT"); env && *env) cfg.out_dir = env;
  return run(cfg, err);
}

}  // namespace shadowkit::cli

#include "cmv/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "cmv/analysis.hpp"
#include "cmv/random.hpp"

namespace cmv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::BadConfig, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(Err::BadConfig, std::string("config parse: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Err::BadConfig, std::string("config key ") + key + ": " + e.what());
  }
}

VerblunskySequence parse_sequence(const json& cfg) {
  if (!cfg.contains("sequence")) fail(Err::BadConfig, "config needs a sequence object");
  return VerblunskySequence::from_json(cfg.at("sequence").dump());
}

ArcSpec parse_arc(const json& cfg) {
  if (!cfg.contains("arc")) fail(Err::BadConfig, "config needs arc [theta0, theta1]");
  const json& a = cfg.at("arc");
  if (!a.is_array() || a.size() != 2) fail(Err::BadConfig, "arc must be [theta0, theta1]");
  return ArcSpec(a[0].get<double>(), a[1].get<double>());
}

Matrix parse_matrix(const json& j, int m) {
  if (!j.is_array() || j.size() != static_cast<size_t>(m) * static_cast<size_t>(m))
    fail(Err::BadConfig, "matrix needs m*m [re, im] entries");
  Matrix a(m, m);
  size_t idx = 0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const json& e = j[idx++];
      if (!e.is_array() || e.size() != 2) fail(Err::BadConfig, "matrix entry needs [re, im]");
      a(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return a;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(Err::IoFailure, "cannot write " + p.string());
  out << text;
  if (!out) fail(Err::IoFailure, "short write " + p.string());
}

json containment_json(const ContainmentReport& rep) { return json::parse(rep.to_json()); }

struct ContainmentGate {
  double dilate = 0.05;
  double deep = 0.2;
  double min_fraction = 0.99;
  long max_deep = 0;
  double max_gap_ratio = 10.0;
};

ContainmentGate parse_gate(const json& cfg, int m) {
  ContainmentGate g;
  g.max_deep = 4L * m;
  if (!cfg.contains("containment")) return g;
  const json& c = cfg.at("containment");
  g.dilate = get_or(c, "dilate", g.dilate);
  g.deep = get_or(c, "deep", g.deep);
  g.min_fraction = get_or(c, "min_fraction", g.min_fraction);
  g.max_deep = get_or(c, "max_deep", g.max_deep);
  g.max_gap_ratio = get_or(c, "max_gap_ratio", g.max_gap_ratio);
  return g;
}

bool gate_pass(const ContainmentReport& rep, const ContainmentGate& g) {
  return rep.inside_fraction >= g.min_fraction && rep.deep_intruders <= g.max_deep &&
         (rep.gap_ratio == 0 || rep.gap_ratio <= g.max_gap_ratio);
}

struct CommandIo {
  fs::path out_dir;
  std::ostream& out;
};

int finish(const CommandIo& io, const std::string& command, bool pass, json config, json results) {
  json env;
  env["schema"] = 1;
  env["command"] = command;
  env["pass"] = pass;
  env["config"] = std::move(config);
  env["results"] = std::move(results);
  write_file(io.out_dir / "summary.json", env.dump(2) + "\n");
  io.out << command << ": " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_spectrum(const json& cfg, const CommandIo& io) {
  auto seq = parse_sequence(cfg);
  auto range = get_or<std::vector<long>>(cfg, "range", {-64, 63});
  if (range.size() != 2) fail(Err::BadConfig, "range must be [k_lo, k_hi]");
  long k0 = get_or<long>(cfg, "k0", 0);
  auto t = build_truncation(seq, range[0], range[1]);
  require(k0 >= t.k_lo && k0 <= t.k_hi, Err::BadConfig, "k0 outside range");
  auto eig = spectrum(t);
  auto mu = spectral_measure(t, eig, k0);
  write_file(io.out_dir / "eigenangles.csv", angles_to_csv(eig.angles));
  write_file(io.out_dir / "measure.csv", measure_to_csv(mu));

  json config;
  config["k0"] = k0;
  config["range"] = {t.k_lo, t.k_hi};
  json results;
  results["m"] = t.m;
  results["dim"] = t.dim();
  results["unitarity_defect"] = t.u.gram_defect();
  results["min_angle"] = eig.angles[0];
  results["max_angle"] = eig.angles[eig.angles.size() - 1];
  results["max_circular_gap"] = max_circular_gap(eig.angles);
  results["measure_total_defect"] =
      operator_norm(mu.total() - Matrix::Identity(t.m, t.m));
  bool pass = true;
  if (cfg.contains("arc")) {
    ArcSpec arc = parse_arc(cfg);
    ContainmentGate gate = parse_gate(cfg, t.m);
    auto rep = arc_containment(eig.angles, arc, gate.dilate, gate.deep);
    pass = gate_pass(rep, gate);
    config["arc"] = {arc.theta0, arc.theta1};
    results["containment"] = containment_json(rep);
  }
  return finish(io, "spectrum", pass, std::move(config), std::move(results));
}

XiOptions parse_xi_options(const json& cfg, int grid_override) {
  XiOptions opt;
  opt.k0 = get_or<long>(cfg, "k0", 0);
  opt.r = get_or(cfg, "radius", 0.99);
  opt.grid_n = get_or(cfg, "grid_n", 2048);
  opt.half_width = get_or<long>(cfg, "half_width", 1024);
  if (grid_override > 0) opt.grid_n = grid_override;
  require(opt.r > 0 && opt.r < 1, Err::BadConfig, "radius must lie in (0, 1)");
  return opt;
}

json xi_config_json(const XiOptions& opt) {
  json c;
  c["k0"] = opt.k0;
  c["radius"] = opt.r;
  c["grid_n"] = opt.grid_n;
  c["half_width"] = opt.half_width;
  return c;
}

int run_trace(const json& cfg, const CommandIo& io, int grid_override) {
  auto seq = parse_sequence(cfg);
  XiOptions opt = parse_xi_options(cfg, grid_override);
  int jmax = get_or(cfg, "jmax", 4);
  double tol = get_or(cfg, "tol", 5e-3);
  require(jmax >= 1 && jmax <= 64, Err::BadConfig, "jmax must lie in [1, 64]");
  auto rep = xi_of_operator(seq, opt);
  auto tr = trace_check_profile(seq, opt.k0, jmax, rep, opt.half_width);
  write_file(io.out_dir / "xi.csv", xi_to_csv(rep.xi));
  write_file(io.out_dir / "trace_report.json", tr.to_json() + "\n");
  json config = xi_config_json(opt);
  config["jmax"] = jmax;
  config["tol"] = tol;
  json results;
  results["max_err"] = tr.max_err;
  results["err"] = tr.err;
  results["xi_invalid"] = tr.xi_invalid;
  return finish(io, "trace", tr.max_err < tol, std::move(config), std::move(results));
}

int run_xi(const json& cfg, const CommandIo& io, int grid_override) {
  auto seq = parse_sequence(cfg);
  XiOptions opt = parse_xi_options(cfg, grid_override);
  double tol = get_or(cfg, "tol", 1e-6);
  auto rep = xi_of_operator(seq, opt);
  write_file(io.out_dir / "xi.csv", xi_to_csv(rep.xi));

  // round trip: the synthesized function must match a direct evaluation
  auto t = build_truncation(seq, opt.k0 - opt.half_width, opt.k0 + opt.half_width - 1);
  ResolventSolver rs(t);
  double synth = 0;
  for (int i = 0; i < 8; ++i) {
    Complex w = std::polar(0.5 * opt.r, TWO_PI * (i + 0.5) / 8.0);
    Matrix direct = m11_truncation(rs, t, opt.k0, w);
    synth = std::max(synth, operator_norm(herglotz_synthesize(rep, w) - direct));
  }
  json config = xi_config_json(opt);
  config["tol"] = tol;
  json results;
  results["d_norm"] = operator_norm(rep.d);
  results["mean_norm"] = operator_norm(rep.xi.mean());
  results["max_angle"] = rep.xi.max_angle();
  results["invalid"] = rep.xi.invalid_count();
  results["synth_residual"] = synth;
  return finish(io, "xi", synth < tol, std::move(config), std::move(results));
}

int run_reflectionless(const json& cfg, const CommandIo& io) {
  auto seq = parse_sequence(cfg);
  ArcSpec arc = parse_arc(cfg);
  ReflectionlessOptions opt;
  opt.r = get_or(cfg, "radius", 1 - 1e-3);
  opt.angles = get_or(cfg, "angles", 24);
  opt.collar = get_or(cfg, "collar", 0.3);
  opt.tol_pair = get_or(cfg, "tol_pair", opt.tol_pair);
  opt.tol_xi = get_or(cfg, "tol_xi", opt.tol_xi);
  auto sites = get_or<std::vector<long>>(cfg, "sites", {0, 1});
  if (sites.size() != 2) fail(Err::BadConfig, "sites must be [k_a, k_b]");
  auto rep = reflectionless_check(seq, arc, sites[0], sites[1], opt);
  json config;
  config["arc"] = {arc.theta0, arc.theta1};
  config["radius"] = opt.r;
  config["angles"] = opt.angles;
  config["collar"] = opt.collar;
  config["sites"] = sites;
  config["tol_pair"] = opt.tol_pair;
  config["tol_xi"] = opt.tol_xi;
  return finish(io, "reflectionless", rep.ok, std::move(config), json::parse(rep.to_json()));
}

int run_borg_verify(const json& cfg, const CommandIo& io, int grid_override) {
  int m = get_or(cfg, "m", 1);
  require(m >= 1 && m <= 8, Err::BadConfig, "m must lie in [1, 8]");
  ArcSpec arc = parse_arc(cfg);
  Matrix gamma = cfg.contains("gamma") ? parse_matrix(cfg.at("gamma"), m)
                                       : Matrix(Matrix::Identity(m, m));
  auto seq = VerblunskySequence::borg(m, arc, gamma);
  long ladder_range = get_or<long>(cfg, "ladder_range", 8);
  long sites = get_or<long>(cfg, "sites", 256);
  XiOptions xopt = parse_xi_options(cfg, grid_override);
  double tol_ladder = get_or(cfg, "tol_ladder", 1e-12);
  double tol_coeff = get_or(cfg, "tol_coeff", 1e-10);
  double tol_xi = get_or(cfg, "tol_xi", 0.05);
  double tol_mean = get_or(cfg, "tol_mean", 1e-2);
  double collar = get_or(cfg, "collar", 0.3);
  double tol_equiv = get_or(cfg, "tol_equiv", 1e-10);

  json results;
  // ladder identities
  auto ladder = borg_ladder_check(seq, arc, -ladder_range, ladder_range);
  bool ladder_ok = ladder.worst() < tol_ladder;
  results["ladder_worst"] = ladder.worst();

  // closed log coefficients through the moment path
  auto l = log_coeffs(moments(seq, xopt.k0, 2));
  double l1_err = operator_norm(l[0] - borg_l1(arc, m));
  double l2_err = operator_norm(l[1] - borg_l2(arc, m));
  bool coeff_ok = l1_err < tol_coeff && l2_err < tol_coeff;
  results["l1_err"] = l1_err;
  results["l2_err"] = l2_err;

  // spectrum of a centered truncation stays near the arc
  auto t = build_truncation(seq, -sites / 2, sites / 2 - 1);
  auto eig = spectrum(t);
  ContainmentGate gate = parse_gate(cfg, m);
  auto cont = arc_containment(eig.angles, arc, gate.dilate, gate.deep);
  bool cont_ok = gate_pass(cont, gate);
  results["containment"] = containment_json(cont);

  // phase profile matches the step profile away from the jumps
  auto rep = xi_of_operator(seq, xopt);
  auto step = borg_xi(arc, m, xopt.grid_n);
  double xi_off = 0;
  auto edge_dist = [&](double th) {
    double d = TWO_PI;
    for (double e : {arc.theta0, arc.theta1, arc.theta_star()}) {
      double c = wrap_angle(th - e);
      d = std::min(d, std::min(c, TWO_PI - c));
    }
    return d;
  };
  for (long c = 0; c < rep.xi.n(); ++c) {
    if (edge_dist(rep.xi.theta[size_t(c)]) <= collar) continue;
    xi_off = std::max(xi_off, operator_norm(rep.xi.xi[size_t(c)] - step.xi[size_t(c)]));
  }
  double xi_mean = operator_norm(rep.xi.mean());
  bool xi_ok = xi_off < tol_xi && xi_mean < tol_mean;
  results["xi_max_off_collar"] = xi_off;
  results["xi_mean_norm"] = xi_mean;

  // the gamma twist is unitarily removable
  auto plain = VerblunskySequence::borg(m, arc, Matrix::Identity(m, m));
  auto ta = build_truncation(plain, -64, 63);
  auto tb = build_truncation(seq, -64, 63, gamma, gamma);
  double equiv = eigenangle_distance(spectrum(ta).angles, spectrum(tb).angles);
  bool equiv_ok = equiv < tol_equiv;
  results["gamma_distance"] = equiv;

  results["ladder_ok"] = ladder_ok;
  results["coeff_ok"] = coeff_ok;
  results["containment_ok"] = cont_ok;
  results["xi_ok"] = xi_ok;
  results["equiv_ok"] = equiv_ok;

  json config = xi_config_json(xopt);
  config["m"] = m;
  config["arc"] = {arc.theta0, arc.theta1};
  config["ladder_range"] = ladder_range;
  config["sites"] = sites;
  config["collar"] = collar;
  bool pass = ladder_ok && coeff_ok && cont_ok && xi_ok && equiv_ok;
  return finish(io, "borg-verify", pass, std::move(config), std::move(results));
}

int run_resolvent_check(const json& cfg, const CommandIo& io, uint64_t seed_override,
                        bool seed_set) {
  auto seq = parse_sequence(cfg);
  long k0 = get_or<long>(cfg, "k0", 0);
  int pairs = get_or(cfg, "pairs", 20);
  long k_abs = get_or<long>(cfg, "k_abs_max", 12);
  double tol = get_or(cfg, "tol", 1e-8);
  uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
  if (seed_set) seed = seed_override;
  auto range = get_or<std::vector<long>>(cfg, "range", {-84, 83});
  if (range.size() != 2) fail(Err::BadConfig, "range must be [k_lo, k_hi]");
  std::vector<Complex> zs;
  if (cfg.contains("z")) {
    for (const auto& e : cfg.at("z")) zs.emplace_back(e[0].get<double>(), e[1].get<double>());
  } else {
    zs = {Complex(0.5, 0.0), Complex(0.3, 0.3)};
  }
  for (Complex z : zs)
    require(std::abs(z) > 1e-3 && std::abs(z) < 1 - 1e-6, Err::BadConfig,
            "z must lie inside the disk away from center and boundary");

  auto t = build_truncation(seq, range[0], range[1]);
  ResolventSolver rs(t);
  Rng rng(seed);
  double worst = 0;
  json detail = json::array();
  for (Complex z : zs) {
    rs.set_z(z);
    for (int p = 0; p < pairs; ++p) {
      long k = rng.uniform_int(-k_abs, k_abs);
      long kp = rng.uniform_int(-k_abs, k_abs);
      Matrix rhs = Matrix::Zero(t.dim(), t.m);
      rhs.block(t.row0(kp), 0, t.m, t.m) = Matrix::Identity(t.m, t.m);
      Matrix sol = rs.solve_block(rhs);
      Matrix direct = sol.block(t.row0(k), 0, t.m, t.m);
      Matrix weyl = resolvent_entry_weyl(seq, z, k0, k, kp);
      double e = operator_norm(weyl - direct);
      worst = std::max(worst, e);
      json d;
      d["z"] = {z.real(), z.imag()};
      d["k"] = k;
      d["kp"] = kp;
      d["err"] = e;
      detail.push_back(d);
    }
  }
  json config;
  config["k0"] = k0;
  config["pairs"] = pairs;
  config["k_abs_max"] = k_abs;
  config["tol"] = tol;
  config["seed"] = seed;
  config["range"] = {t.k_lo, t.k_hi};
  json results;
  results["worst"] = worst;
  results["entries"] = detail;
  return finish(io, "resolvent-check", worst < tol, std::move(config), std::move(results));
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral toolkit for block unitary band operators"};
  app.name("cmv");
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int grid_n = 0;

  constexpr std::pair<const char*, const char*> commands[] = {
      {"spectrum", "eigenangles and a site spectral measure of a truncation"},
      {"trace", "log moment coefficients against the boundary phase profile"},
      {"xi", "extract the phase profile and round trip the synthesis"},
      {"reflectionless", "interior matching battery on an arc"},
      {"borg-verify", "closed form checks for the arc supported family"},
      {"resolvent-check", "banded solves against transfer matrix entries"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, desc] : commands) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config_path, "path to a json run config")->required();
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--seed", seed, "override the sampling seed");
    s->add_option("--grid-n", grid_n, "override the circle grid size");
    subs.push_back(s);
  }
  app.require_subcommand(1);

  std::vector<const char*> argv;
  argv.push_back("cmv");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  json cfg;
  try {
    cfg = load_config(config_path);
    fs::create_directories(out_dir);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  CommandIo io{fs::path(out_dir), out};
  bool seed_set = subs.empty() ? false : app.get_subcommands().front()->count("--seed") > 0;
  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "spectrum") return run_spectrum(cfg, io);
    if (name == "trace") return run_trace(cfg, io, grid_n);
    if (name == "xi") return run_xi(cfg, io, grid_n);
    if (name == "reflectionless") return run_reflectionless(cfg, io);
    if (name == "borg-verify") return run_borg_verify(cfg, io, grid_n);
    if (name == "resolvent-check") return run_resolvent_check(cfg, io, seed, seed_set);
    err << "unknown command " << name << "\n";
    return 2;
  } catch (const Error& e) {
    if (e.code() == Err::BadConfig || e.code() == Err::BadArc || e.code() == Err::BadRange ||
        e.code() == Err::BadGrid) {
      err << "config error: " << e.what() << "\n";
      return 2;
    }
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cmv

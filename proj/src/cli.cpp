#include "kdual/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kdual/options.hpp"

namespace kdual {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& name, std::size_t line,
                               const std::string& msg) {
  throw InputError(name + ":" + std::to_string(line) + ": " + msg);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

// Settings shared by every subcommand.
struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::size_t grid_n = 0;        // 0 keeps the config value
  std::int64_t seed = -1;        // < 0 keeps the config value
  double tol_gap = -1.0;         // symmetry gap (per-command default)
  double tol_limit = 1e-6;       // dualize limit-condition residual
  double tol_monotone = -1.0;    // monotone min-derivative (auto by default)
  double tol_selfdual = 1e-6;    // self-duality residual
  double tol_chain = 1e-8;       // propagator chain-rule residual
  double tol_pairing = 1e-3;     // propagator duality-pairing residual
};

PathConfig mc_settings(const Config& c, const CliOptions& opt) {
  PathConfig cfg = mc_from_config(c);
  if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
  return cfg;
}

std::string kv_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += fmt(m(i, j));
      out += j + 1 < m.cols() ? ',' : '\n';
    }
  }
  return out;
}

std::string quoted(const Expr& e) {
  return e.empty() ? "\"0\"" : "\"" + e.serialize() + "\"";
}

void cmd_dualize(const Config& c, const CliOptions& opt) {
  GeneratorSpec spec = model_from_config(c);
  Grid grid = grid_from_config(c, opt.grid_n);
  double k = c.get_num("duality", "k");

  GeneratorMatrix l = discretize(spec, grid);
  FOperator f = build_f_operator(k, grid);
  GeneratorMatrix ld = dual_matrix(l, f);
  double residual = f.intertwining_residual(l.m, ld.m);

  // Closed forms exist for pure diffusions and pure jump densities.
  DualGeneratorResult analytic;
  if (spec.jump.kind == JumpSpec::Kind::none) {
    analytic = dual_diffusion_analytic(spec.a, spec.b, k, grid);
  } else if (spec.jump.kind == JumpSpec::Kind::density && spec.a.empty() &&
             spec.b.empty()) {
    analytic = dual_jump_analytic(spec.jump.nu, k, grid);
  }

  std::vector<std::pair<std::string, std::string>> rows = {
      {"k", fmt(k)},
      {"grid_n", std::to_string(grid.n)},
      {"intertwining_residual", fmt(residual)},
      {"has_analytic", analytic.has_analytic ? "1" : "0"},
  };
  if (analytic.has_analytic) {
    rows.emplace_back("a_dual", quoted(analytic.a_dual));
    rows.emplace_back("b_dual", quoted(analytic.b_dual));
    rows.emplace_back("monotone_ok", analytic.diagnostics.monotone_ok ? "1" : "0");
    rows.emplace_back("limit_condition_residual",
                      fmt(analytic.diagnostics.limit_condition_residual));
    rows.emplace_back("sub_markov", analytic.diagnostics.sub_markov ? "1" : "0");
  }
  write_file(std::filesystem::path(opt.out_dir) / "dual_report.csv", kv_csv(rows));
  if (analytic.has_analytic && analytic.jump_dual.rows() > 0)
    write_file(std::filesystem::path(opt.out_dir) / "dual_jump.csv",
               matrix_csv(analytic.jump_dual));

  if (analytic.has_analytic) {
    const DualDiagnostics& d = analytic.diagnostics;
    if (d.sub_markov)
      throw ConditionFailure("closed-form dual exists only in sub-Markov form");
    if (d.limit_condition_residual > opt.tol_limit)
      throw ConditionFailure("limit condition fails (residual " +
                             fmt(d.limit_condition_residual) + "): no Markov dual");
    if (!d.monotone_ok)
      throw ConditionFailure("dual jump density is not nonnegative on the interior");
  }
  std::cout << "dualize: ok (intertwining residual " << fmt(residual) << ")\n";
}

void cmd_verify(const Config& c, const CliOptions& opt) {
  GeneratorSpec spec = model_from_config(c);
  Grid grid = grid_from_config(c, opt.grid_n);
  double k = c.get_num_or("duality", "k", 2.0);
  double t = c.get_num("task", "t");
  std::string kind = c.get_str_or("task", "kind", "putcall");

  SymmetryReport rep;
  if (kind == "putcall") {
    std::string method = c.get_str_or("duality", "method", "grid");
    double tol = opt.tol_gap > 0.0 ? opt.tol_gap : 1e-3;
    Vector spots = c.get_list("task", "spots");
    Vector strikes = c.get_list("task", "strikes");
    if (method == "grid") {
      rep = putcall_symmetry_report(spec, k, spots, strikes, t, PriceMethod::grid,
                                    grid, tol);
    } else if (method == "mc") {
      rep = putcall_symmetry_report(spec, k, spots, strikes, t, PriceMethod::mc,
                                    grid, tol, mc_settings(c, opt));
    } else {
      throw InputError("unknown method: " + method);
    }
  } else if (kind == "straddle" || kind == "spread") {
    Vector xs = c.get_list("task", "xs");
    Vector ys = c.get_list("task", "ys");
    if (xs.size() != ys.size())
      throw InputError("xs and ys must have the same length");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < xs.size(); ++i) pairs.emplace_back(xs[i], ys[i]);
    double tol = opt.tol_gap > 0.0 ? opt.tol_gap : 1e-2;
    if (kind == "straddle")
      rep = straddle_selfsymmetry_report(spec, k, pairs, t, grid, tol);
    else
      rep = spread_symmetry_report(spec, c.get_num("task", "alpha"),
                                   c.get_num("task", "beta_shift"), pairs, t, grid,
                                   tol);
  } else {
    throw InputError("unknown verify kind: " + kind);
  }

  write_file(std::filesystem::path(opt.out_dir) / "symmetry.csv", to_csv(rep));
  if (rep.warning) std::cout << "verify: warning: " << rep.note << "\n";
  if (!rep.all_pass) throw ConditionFailure("symmetry gaps exceed tolerance");
  std::cout << "verify: ok (" << rep.rows.size() << " pairs, method " << rep.method
            << ")\n";
}

void cmd_monotone(const Config& c, const CliOptions& opt) {
  GeneratorSpec spec = model_from_config(c);
  Grid grid = grid_from_config(c, opt.grid_n);
  double k = c.get_num("duality", "k");
  double t = c.get_num("task", "t");
  double wf = c.get_num_or("task", "window_fraction", 0.3);

  MonotoneReport rep =
      check_monotone_order_k(discretize(spec, grid), k, t, opt.tol_monotone, wf);
  write_file(std::filesystem::path(opt.out_dir) / "monotone.csv",
             kv_csv({{"monotone", rep.monotone ? "1" : "0"},
                     {"min_derivative", fmt(rep.min_derivative)},
                     {"scale", fmt(rep.scale)},
                     {"tol", fmt(rep.tol)},
                     {"edge_high", fmt(rep.edge_high)},
                     {"edge_low", fmt(rep.edge_low)}}));
  if (!rep.monotone)
    throw ConditionFailure("process is not stochastically monotone of order " +
                           fmt(k));
  std::cout << "monotone: ok (min derivative " << fmt(rep.min_derivative) << ")\n";
}

void cmd_selfdual(const Config& c, const CliOptions& opt) {
  GeneratorSpec spec = model_from_config(c);
  Grid grid = grid_from_config(c, opt.grid_n);
  if (spec.jump.kind != JumpSpec::Kind::density)
    throw InputError("selfdual needs a jump density model");
  int order = static_cast<int>(c.get_num_or("task", "order", 2.0));

  double residual = check_self_dual(spec.jump.nu, order, grid);
  write_file(std::filesystem::path(opt.out_dir) / "selfdual.csv",
             kv_csv({{"order", std::to_string(order)},
                     {"residual", fmt(residual)},
                     {"tol", fmt(opt.tol_selfdual)}}));
  if (residual >= opt.tol_selfdual)
    throw ConditionFailure("jump density is not self-dual (residual " +
                           fmt(residual) + ")");
  std::cout << "selfdual: ok (residual " << fmt(residual) << ")\n";
}

void cmd_propagator(const Config& c, const CliOptions& opt) {
  GeneratorSpec spec = model_from_config(c);
  Grid grid = grid_from_config(c, opt.grid_n);
  double k = c.get_num("duality", "k");
  double horizon = c.get_num("task", "horizon");
  double dt = c.get_num("task", "dt");
  double s = c.get_num_or("task", "s", 0.0);
  double t = c.get_num_or("task", "t", horizon);

  Propagator p(spec, grid, horizon, dt);
  DualPropagator dp(p, build_f_operator(k, grid));
  double mid = 0.5 * (s + t);
  double chain = (dp.evolve(s, mid) * dp.evolve(mid, t) - dp.evolve(s, t)).max_abs();
  double pairing = dp.pairing_residual(s, t);

  write_file(std::filesystem::path(opt.out_dir) / "propagator.csv",
             kv_csv({{"chain_residual", fmt(chain)},
                     {"pairing_residual", fmt(pairing)},
                     {"tol_chain", fmt(opt.tol_chain)},
                     {"tol_pairing", fmt(opt.tol_pairing)}}));
  if (chain >= opt.tol_chain)
    throw ConditionFailure("dual propagator violates the chain rule");
  if (pairing >= opt.tol_pairing)
    throw ConditionFailure("propagator duality pairing fails (residual " +
                           fmt(pairing) + ")");
  std::cout << "propagator: ok (pairing residual " << fmt(pairing) << ")\n";
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config c;
  c.name_ = name;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        config_error(name, lineno, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      config_error(name, lineno, "expected key = value");
    if (section.empty())
      config_error(name, lineno, "key outside any [section]");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) config_error(name, lineno, "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    c.data_[section][key] = value;
  }
  return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

const std::string& Config::get_str(const std::string& section,
                                   const std::string& key) const {
  auto s = data_.find(section);
  if (s != data_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw InputError(name_ + ": missing [" + section + "] " + key);
}

std::string Config::get_str_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_str(section, key) : fallback;
}

double Config::get_num(const std::string& section, const std::string& key) const {
  const std::string& v = get_str(section, key);
  std::size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw InputError(name_ + ": [" + section + "] " + key + " is not a number: " + v);
  }
  if (used != v.size())
    throw InputError(name_ + ": [" + section + "] " + key + " is not a number: " + v);
  return out;
}

double Config::get_num_or(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_num(section, key) : fallback;
}

Vector Config::get_list(const std::string& section, const std::string& key) const {
  const std::string& v = get_str(section, key);
  Vector out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t comma = v.find(',', pos);
    std::string item = trim(v.substr(pos, comma - pos));
    if (item.empty())
      throw InputError(name_ + ": [" + section + "] " + key + " has an empty entry");
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError(name_ + ": [" + section + "] " + key +
                       " has a non-numeric entry: " + item);
    }
    if (used != item.size())
      throw InputError(name_ + ": [" + section + "] " + key +
                       " has a non-numeric entry: " + item);
    out.push_back(x);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

GeneratorSpec model_from_config(const Config& c) {
  GeneratorSpec spec;
  if (c.has("model", "a")) spec.a = Expr::parse(c.get_str("model", "a"));
  if (c.has("model", "b")) spec.b = Expr::parse(c.get_str("model", "b"));
  std::string jump = c.get_str_or("model", "jump", "none");
  if (jump == "none") {
    spec.jump = JumpSpec::none();
  } else if (jump == "density") {
    spec.jump = JumpSpec::density(Expr::parse(c.get_str("model", "nu")),
                                  c.get_num_or("model", "compensated", 0.0) != 0.0);
  } else if (jump == "stable_like" || jump == "symmetric_stable") {
    double beta = c.get_num("model", "beta");
    Expr scale = Expr::parse(c.get_str("model", "scale"));
    if (jump == "symmetric_stable") {
      spec.jump = JumpSpec::symmetric_stable(beta, scale);
    } else {
      std::string side = c.get_str_or("model", "side", "plus");
      if (side != "plus" && side != "minus")
        throw InputError("stable_like side must be plus or minus: " + side);
      spec.jump = JumpSpec::stable_like(beta, side == "plus" ? Side::plus : Side::minus,
                                        scale);
    }
  } else {
    throw InputError("unknown jump kind: " + jump);
  }
  spec.time_dependent = c.get_num_or("model", "time_dependent", 0.0) != 0.0;
  return spec;
}

Grid grid_from_config(const Config& c, std::size_t n_override) {
  double x_min = c.get_num("grid", "x_min");
  double x_max = c.get_num("grid", "x_max");
  std::size_t n = n_override > 0
                      ? n_override
                      : static_cast<std::size_t>(c.get_num("grid", "n"));
  return Grid::uniform(x_min, x_max, n);
}

PathConfig mc_from_config(const Config& c) {
  PathConfig cfg;
  cfg.dt = c.get_num_or("mc", "dt", cfg.dt);
  cfg.n_paths = static_cast<std::size_t>(
      c.get_num_or("mc", "n_paths", static_cast<double>(cfg.n_paths)));
  cfg.seed = static_cast<std::uint64_t>(c.get_num_or("mc", "seed", 0.0));
  std::string scheme = c.get_str_or("mc", "scheme", "euler");
  if (scheme == "euler")
    cfg.scheme = Scheme::euler;
  else if (scheme == "thinning")
    cfg.scheme = Scheme::euler_jump_thinning;
  else if (scheme == "stable")
    cfg.scheme = Scheme::euler_stable;
  else
    throw InputError("unknown mc scheme: " + scheme);
  return cfg;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"order-k stochastic duals of one-dimensional Markov generators"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "config file path")->required();
  app.add_option("--out", opt.out_dir, "output directory for CSV reports");
  app.add_option("--grid-n", opt.grid_n, "override the grid node count");
  app.add_option("--seed", opt.seed, "override the Monte Carlo seed");
  app.add_option("--tol-gap", opt.tol_gap, "symmetry gap tolerance");
  app.add_option("--tol-limit", opt.tol_limit, "limit-condition residual tolerance");
  app.add_option("--tol-monotone", opt.tol_monotone,
                 "monotonicity tolerance (negative selects automatic)");
  app.add_option("--tol-selfdual", opt.tol_selfdual, "self-duality residual tolerance");
  app.add_option("--tol-chain", opt.tol_chain, "propagator chain-rule tolerance");
  app.add_option("--tol-pairing", opt.tol_pairing, "propagator pairing tolerance");

  CLI::App* dualize = app.add_subcommand("dualize", "compute the order-k dual generator");
  CLI::App* verify = app.add_subcommand("verify", "check a pricing symmetry");
  CLI::App* monotone = app.add_subcommand("monotone", "check order-k monotonicity");
  CLI::App* selfdual = app.add_subcommand("selfdual", "check jump-density self-duality");
  CLI::App* propagator =
      app.add_subcommand("propagator", "check time-dependent propagator duality");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::filesystem::create_directories(opt.out_dir);
    Config config = Config::parse_file(opt.config_path);
    if (dualize->parsed()) cmd_dualize(config, opt);
    if (verify->parsed()) cmd_verify(config, opt);
    if (monotone->parsed()) cmd_monotone(config, opt);
    if (selfdual->parsed()) cmd_selfdual(config, opt);
    if (propagator->parsed()) cmd_propagator(config, opt);
  } catch (const ConditionFailure& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace kdual

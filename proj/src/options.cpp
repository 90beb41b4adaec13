#include "kdual/options.hpp"

#include <cmath>
#include <cstdio>

namespace kdual {

namespace {

double plus_pow(double s, double k) {
  if (s > 0.0) return k == 2.0 ? s : std::pow(s, k - 1.0);
  return s == 0.0 && k == 1.0 ? 1.0 : 0.0;  // theta(0) = 1
}

void require_order(double k) {
  if (!(k > 0.0)) throw InputError("payoff order must be positive");
}

template <class Fn>
double row_price(const Matrix& p, std::size_t i, const Grid& grid, const Fn& pay) {
  double s = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) s += pay(grid.node(j)) * p(i, j);
  return s;
}

// Price started from an off-node spot: linear interpolation between the two
// bracketing transition rows (snapping to the nearest node costs O(h/2) in
// the starting point, interpolation only O(h^2)).
template <class Fn>
double interp_price(const Matrix& p, const Grid& grid, double spot, const Fn& pay) {
  double u = (spot - grid.x_min) / grid.h();
  double lo = std::floor(u);
  std::size_t i0 = static_cast<std::size_t>(std::min(std::max(lo, 0.0),
                                                     static_cast<double>(grid.n - 2)));
  double w = std::min(1.0, std::max(0.0, u - static_cast<double>(i0)));
  double a = row_price(p, i0, grid, pay);
  if (w == 0.0) return a;
  return (1.0 - w) * a + w * row_price(p, i0 + 1, grid, pay);
}

SymmetryRow make_row(double x, double y, double lhs, double rhs, double tol) {
  SymmetryRow r;
  r.x = x;
  r.y = y;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_gap = std::fabs(lhs - rhs);
  double denom = std::max(std::fabs(lhs), std::fabs(rhs));
  r.rel_gap = denom > 0.0 ? r.abs_gap / denom : 0.0;
  r.pass = r.abs_gap < tol;
  return r;
}

}  // namespace

Payoff Payoff::powered_call(double k, double strike) {
  require_order(k);
  Payoff p;
  p.kind = Kind::powered_call;
  p.k = k;
  p.strike = strike;
  return p;
}

Payoff Payoff::powered_put(double k, double strike) {
  require_order(k);
  Payoff p;
  p.kind = Kind::powered_put;
  p.k = k;
  p.strike = strike;
  return p;
}

Payoff Payoff::digital_call(double strike) {
  Payoff p;
  p.kind = Kind::digital_call;
  p.k = 1.0;
  p.strike = strike;
  return p;
}

Payoff Payoff::digital_put(double strike) {
  Payoff p;
  p.kind = Kind::digital_put;
  p.k = 1.0;
  p.strike = strike;
  return p;
}

Payoff Payoff::straddle(double k, double strike) {
  require_order(k);
  Payoff p;
  p.kind = Kind::straddle;
  p.k = k;
  p.strike = strike;
  return p;
}

Payoff Payoff::bull_put_spread(double alpha, double beta_shift, double strike) {
  if (!(alpha < beta_shift)) throw InputError("spread needs alpha < beta_shift");
  Payoff p;
  p.kind = Kind::bull_put_spread;
  p.k = 2.0;
  p.strike = strike;
  p.alpha = alpha;
  p.beta_shift = beta_shift;
  return p;
}

double Payoff::operator()(double s) const {
  switch (kind) {
    case Kind::powered_call:
      return plus_pow(s - strike, k);
    case Kind::powered_put:
      return plus_pow(strike - s, k);
    case Kind::digital_call:
      return plus_pow(s - strike, 1.0);
    case Kind::digital_put:
      return plus_pow(strike - s, 1.0);
    case Kind::straddle:
      return s == strike ? (k == 1.0 ? 1.0 : 0.0)
                         : std::pow(std::fabs(s - strike), k - 1.0);
    case Kind::bull_put_spread:
      return plus_pow(s - strike + alpha, 2.0) - plus_pow(s - strike + beta_shift, 2.0);
  }
  return 0.0;
}

double price_grid(const GeneratorSpec& spec, const Grid& grid, const Payoff& payoff,
                  double t, double spot, double window_fraction) {
  if (!(window_fraction >= 0.0) || window_fraction >= 0.5)
    throw InputError("window fraction must lie in [0, 0.5)");
  double margin = window_fraction * (grid.x_max - grid.x_min);
  if (spot < grid.x_min + margin || spot > grid.x_max - margin)
    throw SpotOutsideWindow("spot outside the interior pricing window");
  if (t == 0.0) return payoff(spot);
  Matrix p = transition(discretize(spec, grid), t);
  return interp_price(p, grid, spot, payoff);
}

std::string to_csv(const SymmetryReport& rep) {
  std::string out = "x,y,lhs,rhs,abs_gap,rel_gap,method,pass\n";
  char buf[256];
  for (const SymmetryRow& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%d\n",
                  r.x, r.y, r.lhs, r.rhs, r.abs_gap, r.rel_gap, rep.method.c_str(),
                  r.pass ? 1 : 0);
    out += buf;
  }
  return out;
}

SymmetryReport putcall_symmetry_report(const GeneratorSpec& spec, double k,
                                       const Vector& spots, const Vector& strikes,
                                       double t, PriceMethod method, const Grid& grid,
                                       double tol, const PathConfig& cfg) {
  require_order(k);
  SymmetryReport rep;

  if (method == PriceMethod::grid) {
    rep.method = "grid";
    GeneratorMatrix l = discretize(spec, grid);
    GeneratorMatrix ld = dual_matrix(l, build_f_operator(k, grid));
    Matrix p = transition(l, t);
    Matrix pd = transition(ld, t);
    for (double x : spots)
      for (double y : strikes) {
        double lhs = interp_price(p, grid, x, Payoff::powered_call(k, y));
        double rhs = interp_price(pd, grid, y, Payoff::powered_put(k, x));
        rep.rows.push_back(make_row(x, y, lhs, rhs, tol));
      }
  } else {
    rep.method = "mc";
    if (spec.jump.kind != JumpSpec::Kind::none)
      throw InputError("mc comparison needs a pure diffusion (dual in coefficient form)");
    DualGeneratorResult d = dual_diffusion_analytic(spec.a, spec.b, k, grid);
    GeneratorSpec dual = GeneratorSpec::diffusion(d.a_dual, d.b_dual);
    for (double x : spots)
      for (double y : strikes) {
        DualityReport mc = duality_mc_report(spec, dual, k, x, y, t, grid, cfg);
        SymmetryRow r = make_row(x, y, mc.forward.mean, mc.reverse.mean, tol);
        r.pass = mc.pass;
        rep.rows.push_back(r);
      }
  }

  for (const SymmetryRow& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

SymmetryReport straddle_selfsymmetry_report(const GeneratorSpec& spec, double k,
                                            const std::vector<std::pair<double, double>>& pairs,
                                            double t, const Grid& grid, double tol) {
  require_order(k);
  if (!spec.a.empty() || !spec.b.empty() ||
      spec.jump.kind != JumpSpec::Kind::symmetric_stable)
    throw InputError("straddle symmetry needs a symmetric stable-like generator");
  if (std::fabs(spec.jump.beta - k) > 1e-12)
    throw InputError("straddle symmetry needs the stable index to equal the order k");

  SymmetryReport rep;
  rep.method = "grid";
  Matrix p = transition(discretize(spec, grid), t);
  for (auto [x, y] : pairs) {
    double lhs = interp_price(p, grid, x, Payoff::straddle(k, y));
    double rhs = interp_price(p, grid, y, Payoff::straddle(k, x));
    rep.rows.push_back(make_row(x, y, lhs, rhs, tol));
    rep.all_pass = rep.all_pass && rep.rows.back().pass;
  }
  return rep;
}

SymmetryReport spread_symmetry_report(const GeneratorSpec& spec, double alpha,
                                      double beta_shift,
                                      const std::vector<std::pair<double, double>>& pairs,
                                      double t, const Grid& grid, double tol) {
  if (!(alpha < beta_shift)) throw InputError("spread needs alpha < beta_shift");
  if (spec.a.empty() || !spec.b.empty() || spec.jump.kind != JumpSpec::Kind::none)
    throw InputError("spread symmetry needs a driftless pure diffusion");

  SymmetryReport rep;
  rep.method = "grid";

  // The identity needs a(x) to be (beta_shift - alpha)-periodic.
  double period = beta_shift - alpha;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double x = grid.node(i);
    if (x + period > grid.x_max) break;
    double ax = spec.a.eval(Bindings::at_x(x));
    double axp = spec.a.eval(Bindings::at_x(x + period));
    worst = std::max(worst, std::fabs(axp - ax));
  }
  if (worst >= 1e-10) {
    rep.warning = true;
    rep.note = "diffusion coefficient is not periodic with the spread width; "
               "gaps are reported but not asserted";
  }

  Matrix p = transition(discretize(spec, grid), t);
  for (auto [x, y] : pairs) {
    // lhs freezes the first argument: E f(x, X_t^y); rhs the second.
    auto f_first = [&](double z) {
      return plus_pow(x - z + alpha, 2.0) - plus_pow(x - z + beta_shift, 2.0);
    };
    auto f_second = [&](double z) {
      return plus_pow(z - y + alpha, 2.0) - plus_pow(z - y + beta_shift, 2.0);
    };
    double lhs = interp_price(p, grid, y, f_first);
    double rhs = interp_price(p, grid, x, f_second);
    rep.rows.push_back(make_row(x, y, lhs, rhs, tol));
  }
  if (!rep.warning)
    for (const SymmetryRow& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

}  // namespace kdual

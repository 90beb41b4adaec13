#include "kdual/montecarlo.hpp"

#include <cmath>

namespace kdual {

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double powered_plus(double s, double k) {
  if (s > 0.0) return k == 2.0 ? s : std::pow(s, k - 1.0);
  return s == 0.0 && k == 1.0 ? 1.0 : 0.0;  // theta(0) = 1
}

double eval_coeff(const Expr& e, double x, double t, bool time_dependent) {
  if (e.empty()) return 0.0;
  Bindings b = Bindings::at_x(x);
  if (time_dependent) b.set(Var::t, t);
  return e.eval(b);
}

}  // namespace

SubStream::SubStream(std::uint64_t seed, std::uint64_t path) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix(s);
  s = path;
  std::uint64_t b = splitmix(s);
  state_ = a ^ (b * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
}

std::uint64_t SubStream::next_u64() { return splitmix(state_); }

double SubStream::next_unit() {
  // 53-bit mantissa, shifted to the open interval.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SubStream::next_gauss() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = next_unit(), u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double SubStream::next_stable(double beta, double skew) {
  double u = M_PI * (next_unit() - 0.5);  // uniform on (-pi/2, pi/2)
  double w = -std::log(next_unit());      // exponential(1)
  if (beta == 1.0) {
    double hp = 0.5 * M_PI;
    if (skew == 0.0) return std::tan(u);
    return ((hp + skew * u) * std::tan(u) -
            skew * std::log((hp * w * std::cos(u)) / (hp + skew * u))) /
           hp;
  }
  double tb = std::tan(0.5 * M_PI * beta);
  double bb = std::atan(skew * tb) / beta;
  double sb = std::pow(1.0 + skew * skew * tb * tb, 0.5 / beta);
  double cu = std::cos(u);
  return sb * std::sin(beta * (u + bb)) / std::pow(cu, 1.0 / beta) *
         std::pow(std::cos(u - beta * (u + bb)) / w, (1.0 - beta) / beta);
}

SimResult simulate(const GeneratorSpec& spec, const Grid& box, double x0, double t,
                   const PathConfig& cfg) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and >= 0");
  if (!(cfg.dt > 0.0)) throw InputError("step size must be positive");
  if (cfg.n_paths < 1) throw InputError("need at least one path");
  switch (spec.jump.kind) {
    case JumpSpec::Kind::none:
      break;
    case JumpSpec::Kind::density:
      if (cfg.scheme != Scheme::euler_jump_thinning)
        throw InputError("density jumps need the thinning scheme");
      break;
    case JumpSpec::Kind::stable_like:
    case JumpSpec::Kind::symmetric_stable:
      if (cfg.scheme != Scheme::euler_stable)
        throw InputError("stable jumps need the stable-increment scheme");
      break;
  }

  // Rate bounds and the abort fence live on a 3x enlargement of the box.
  double c = 0.5 * (box.x_min + box.x_max), half = 0.5 * (box.x_max - box.x_min);
  Grid ebox = Grid::uniform(c - 3.0 * half, c + 3.0 * half, 3 * (box.n - 1) + 1);
  const double he = ebox.h();

  double rate_bound = 0.0;
  Vector comp;  // compensator drift table on ebox nodes
  if (spec.jump.kind == JumpSpec::Kind::density) {
    for (std::size_t i = 0; i < ebox.n; ++i) {
      double xi = ebox.node(i), r = 0.0, m = 0.0;
      for (std::size_t j = 0; j < ebox.n; ++j) {
        Bindings b;
        b.set(Var::x, xi).set(Var::z, ebox.node(j));
        double v = spec.jump.nu.eval(b);
        if (v < 0.0) throw InputError("jump density must be nonnegative on the box");
        r += he * v;
        m += he * v * (ebox.node(j) - xi);
      }
      rate_bound = std::max(rate_bound, r);
      if (spec.jump.compensated) {
        if (comp.empty()) comp.assign(ebox.n, 0.0);
        comp[i] = m;
      }
    }
    if (!std::isfinite(rate_bound))
      throw InputError("jump rate bound is not finite on the box");
  }

  const std::size_t nsteps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / cfg.dt)));
  const double step = t / static_cast<double>(nsteps);
  const double cosfac = spec.jump.kind == JumpSpec::Kind::stable_like
                            ? std::fabs(std::cos(0.5 * M_PI * spec.jump.beta))
                            : 1.0;
  const double skew = spec.jump.kind == JumpSpec::Kind::stable_like
                          ? (spec.jump.side == Side::plus ? -1.0 : 1.0)
                          : 0.0;

  SimResult out;
  out.terminal.reserve(cfg.n_paths);
  out.aborted = 0;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    SubStream rng(cfg.seed, p);
    double x = x0;
    bool alive = true;
    for (std::size_t s = 0; s < nsteps && alive; ++s) {
      double tm = (static_cast<double>(s) + 0.5) * step;
      double a = eval_coeff(spec.a, x, tm, spec.time_dependent);
      double b = eval_coeff(spec.b, x, tm, spec.time_dependent);
      if (a < 0.0) throw InputError("diffusion coefficient must be nonnegative");
      if (!comp.empty()) {
        // Linear interpolation of the compensator drift.
        double u = (x - ebox.x_min) / he;
        std::size_t i0 = std::min(ebox.n - 2, static_cast<std::size_t>(std::max(0.0, u)));
        double w = std::min(1.0, std::max(0.0, u - static_cast<double>(i0)));
        b -= (1.0 - w) * comp[i0] + w * comp[i0 + 1];
      }
      x += b * step;
      if (a > 0.0) x += std::sqrt(2.0 * a * step) * rng.next_gauss();

      if (spec.jump.kind == JumpSpec::Kind::density && rate_bound > 0.0) {
        if (rng.next_unit() < rate_bound * step) {
          // Candidate event: one uniform drives both acceptance and target.
          double v = rng.next_unit() * rate_bound;
          double acc = 0.0;
          for (std::size_t j = 0; j < ebox.n; ++j) {
            Bindings bd;
            bd.set(Var::x, x).set(Var::z, ebox.node(j));
            acc += he * spec.jump.nu.eval(bd);
            if (v < acc) {
              x = ebox.node(j) + (rng.next_unit() - 0.5) * he;
              break;
            }
          }
          // v >= total rate at x: candidate rejected by thinning.
        }
      } else if (spec.jump.kind == JumpSpec::Kind::stable_like ||
                 spec.jump.kind == JumpSpec::Kind::symmetric_stable) {
        double sc = eval_coeff(spec.jump.scale, x, tm, spec.time_dependent);
        if (sc < 0.0) throw InputError("stable scale must be nonnegative");
        if (sc > 0.0)
          x += std::pow(sc * step * cosfac, 1.0 / spec.jump.beta) *
               rng.next_stable(spec.jump.beta, skew);
      }
      if (x < ebox.x_min || x > ebox.x_max) {
        alive = false;
        ++out.aborted;
      }
    }
    if (alive) out.terminal.push_back(x);
  }
  out.n_effective = out.terminal.size();
  return out;
}

MomentEstimate powered_moment(const Vector& sample, double y, double k, double beta) {
  if (!(k > 0.0)) throw InputError("moment order must be positive");
  MomentEstimate est;
  est.n_effective = sample.size();
  est.heavy_tail_warning = k - 1.0 >= beta;
  if (sample.empty()) return est;
  Vector v(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) v[i] = powered_plus(sample[i] - y, k);
  const double n = static_cast<double>(v.size());
  est.mean = pairwise_sum(v.data(), v.size()) / n;
  if (v.size() > 1) {
    for (double& w : v) {
      double d = w - est.mean;
      w = d * d;
    }
    double var = pairwise_sum(v.data(), v.size()) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

DualityReport duality_mc_report(const GeneratorSpec& spec_x, const GeneratorSpec& spec_y,
                                double k, double x, double y, double t,
                                const Grid& box, const PathConfig& cfg) {
  double beta = 2.0;
  for (const GeneratorSpec* s : {&spec_x, &spec_y})
    if (s->jump.kind == JumpSpec::Kind::stable_like ||
        s->jump.kind == JumpSpec::Kind::symmetric_stable)
      beta = std::min(beta, s->jump.beta);

  DualityReport rep;
  rep.heavy_tail_warning = k - 1.0 >= beta;
  if (rep.heavy_tail_warning) {
    // Abstain: the compared moments may not exist.
    rep.forward.heavy_tail_warning = rep.reverse.heavy_tail_warning = true;
    return rep;
  }

  SimResult fx = simulate(spec_x, box, x, t, cfg);
  PathConfig cfg_rev = cfg;
  cfg_rev.seed = cfg.seed + 0x9E3779B97F4A7C15ull;  // independent substreams
  SimResult fy = simulate(spec_y, box, y, t, cfg_rev);

  rep.forward = powered_moment(fx.terminal, y, k, beta);
  Vector mirrored(fy.terminal.size());
  for (std::size_t i = 0; i < fy.terminal.size(); ++i) mirrored[i] = x - fy.terminal[i];
  rep.reverse = powered_moment(mirrored, 0.0, k, beta);

  double denom = std::sqrt(rep.forward.std_error * rep.forward.std_error +
                           rep.reverse.std_error * rep.reverse.std_error);
  double diff = rep.forward.mean - rep.reverse.mean;
  rep.z_score = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : INFINITY);
  rep.pass = std::fabs(rep.z_score) < 3.0;
  return rep;
}

}  // namespace kdual

#pragma once

#include <cstdint>

#include "kdual/model.hpp"

namespace kdual {

enum class Scheme { euler, euler_jump_thinning, euler_stable };

struct PathConfig {
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::euler;
};

// Deterministic per-path random substream: a counter generator keyed by
// (seed, path index), so paths are independent of execution order.
class SubStream {
 public:
  SubStream(std::uint64_t seed, std::uint64_t path);

  std::uint64_t next_u64();
  double next_unit();   // uniform on (0,1)
  double next_gauss();  // standard normal (Box-Muller, pairs cached)
  // Stable variate, unit scale: symmetric for skew 0, fully skewed otherwise.
  double next_stable(double beta, double skew);

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct SimResult {
  Vector terminal;           // surviving paths only
  std::size_t n_effective;   // = terminal.size()
  std::size_t aborted;       // paths that left the enlarged box
};

// Terminal values of the process at time t started from x0. The box grid
// scopes the jump-rate bounds; paths leaving a 3x enlargement of it abort.
// Diffusion convention: generator a*d^2/dx^2, so increments use sqrt(2a).
SimResult simulate(const GeneratorSpec& spec, const Grid& box, double x0, double t,
                   const PathConfig& cfg);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;
  bool heavy_tail_warning = false;
};

// Sample mean and standard error of (s - y)_+^{k-1}; theta(0) = 1 keeps the
// k=1 payoff right-continuous. Passing the stable index beta flags the
// estimate as unreliable when k-1 >= beta (the moment may not exist).
MomentEstimate powered_moment(const Vector& sample, double y, double k,
                              double beta = 2.0);

struct DualityReport {
  MomentEstimate forward;  // E (X_t^x - y)_+^{k-1}
  MomentEstimate reverse;  // E (x - Y_t^y)_+^{k-1}
  double z_score = 0.0;
  bool pass = false;
  bool heavy_tail_warning = false;
};

// Monte Carlo witness of the order-k duality identity with independent seeds
// for the two sides; pass means |z| < 3 and no heavy-tail abstention.
DualityReport duality_mc_report(const GeneratorSpec& spec_x, const GeneratorSpec& spec_y,
                                double k, double x, double y, double t,
                                const Grid& box, const PathConfig& cfg);

}  // namespace kdual

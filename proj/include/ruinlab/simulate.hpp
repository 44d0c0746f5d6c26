#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ruinlab/levy.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;
};

// One realization of the return side on a merged grid.
struct SimulatedPath {
  std::vector<double> times;
  std::vector<double> r_hat;
  std::vector<double> r_hat_jump;  // jump of R_hat at times[i] (0 when none)
  std::vector<double> stoch_exp;
  std::vector<double> i_func;
  std::vector<double> alphas;               // J(alpha) is tracked for each; 2 is always present
  std::vector<std::vector<double>> j_func;  // j_func[a][i] = J_{t_i}(alphas[a])
  std::vector<double> disc_integral;        // filled by discounted_integral_direct

  std::size_t size() const noexcept { return times.size(); }
  // J_t(alpha) column; throws std::out_of_range if alpha was not requested.
  const std::vector<double>& j(double alpha) const;
};

// Increments of X on a grid; jumps attached to the first grid point at or after their epoch.
struct BusinessIncrements {
  struct Jump {
    double time = 0.0;
    double size = 0.0;
    std::size_t index = 0;  // grid index the jump is attached to
    bool big = false;       // |size| > 1
  };
  std::vector<double> continuous;  // drift + Gaussian part over (t_{i-1}, t_i]; entry 0 unused
  std::vector<double> jumps;       // summed jump sizes at t_i
  std::vector<Jump> events;

  // X_{t_i} as a running sum.
  std::vector<double> cumulative() const;
};

// a_X I_t + sigma_X W_{J_t} + M^d_t + U_t on the grid of a SimulatedPath.
struct RepresentationPath {
  std::vector<double> times;
  std::vector<double> a_term;
  std::vector<double> w_term;
  std::vector<double> m_term;
  std::vector<double> u_term;

  double total(std::size_t i) const { return a_term[i] + w_term[i] + m_term[i] + u_term[i]; }
};

// ---------------------------------------------------------------------------
// Precomputed simulation plans.

class ReturnModel {
 public:
  explicit ReturnModel(const ReturnSpec& spec);

  // Jump epochs on (0, horizon] in time order with raw sizes (jumps of R,
  // of R_hat for the hat family, of the driver L for the additive family).
  void draw_jumps(double horizon, RngStream& rng, std::vector<JumpEvent>& out) const;
  // Continuous part of R_hat over (u, v].
  double continuous_increment(double u, double v, RngStream& rng) const;
  // Jump of R_hat caused by a raw jump of size x at time s.
  double hat_jump(double s, double x) const;

 private:
  enum class Kind { Levy, Hat, Additive } kind_ = Kind::Levy;
  double hat_drift_ = 0.0;  // drift of R_hat per unit time (Levy and hat families)
  double sigma_ = 0.0;
  JumpSampler sampler_;
  PiecewiseLinear weight_;
  double driver_drift_ = 0.0;  // drift of L net of the small-jump compensator
};

class BusinessModel {
 public:
  explicit BusinessModel(const BusinessSpec& spec);

  void draw_jumps(double horizon, RngStream& rng, std::vector<JumpEvent>& out) const;
  double continuous_increment(double dt, RngStream& rng) const;

  double drift() const noexcept { return drift_; }
  double sigma() const noexcept { return sigma_; }
  // int_{|x|<=1} x nu_X(dx)
  double small_jump_mean() const noexcept { return small_mean_; }

 private:
  double drift_ = 0.0;
  double sigma_ = 0.0;
  double small_mean_ = 0.0;
  JumpSampler sampler_;
};

// Uniform grid k T / n merged with the given epochs and extra times.
// Epochs are only inserted when grid.jump_adapted is set; extra times always are.
void build_grid(const GridSpec& grid, const std::vector<const std::vector<JumpEvent>*>& epochs,
                const std::vector<double>& extra_times, std::vector<double>& times);

// Fills r_hat, stoch_exp, i_func and j_func on path.times (already set).
void fill_return_path(const ReturnModel& model, const std::vector<JumpEvent>& events, RngStream& rng,
                      SimulatedPath& path);
void fill_business(const BusinessModel& model, const std::vector<JumpEvent>& events, const std::vector<double>& times,
                   RngStream& rng, BusinessIncrements& out);
void fill_representation(const BusinessModel& model, const SimulatedPath& path, const std::vector<JumpEvent>& events,
                         RngStream& rng, RepresentationPath& out);

// ---------------------------------------------------------------------------
// Single-path operations.

// Return path on the uniform grid merged with the jump epochs of R.
SimulatedPath simulate_return_path(const ReturnSpec& returns, const GridSpec& grid, RngStream& rng,
                                   const std::vector<double>& alphas = {});

BusinessIncrements simulate_business_increments(const BusinessSpec& business, const std::vector<double>& times,
                                                RngStream& rng);

// Z_{t_i} = sum_k dX_k / E(R)_{t_k -}; jumps of R at t_k are excluded from the
// discount factor of X's jumps at t_k when jump_adapted is set.
void discounted_integral_direct(SimulatedPath& path, const BusinessIncrements& x, bool jump_adapted = true);

RepresentationPath discounted_integral_representation(const BusinessSpec& business, const SimulatedPath& path,
                                                      RngStream& rng);

// First grid time with Z < -y.
std::optional<double> detect_ruin(const SimulatedPath& path, double y);

// ---------------------------------------------------------------------------
// Path engine: the full per-path pipeline with reusable buffers.

struct PathOptions {
  std::vector<double> alphas;
  std::vector<double> extra_times;  // inserted into every grid
  bool representation = false;      // also build the representation-scheme path
};

struct PathWorkspace {
  SimulatedPath path;
  BusinessIncrements business;
  RepresentationPath representation;
  std::vector<JumpEvent> r_events;
  std::vector<JumpEvent> x_events;
  std::vector<JumpEvent> rep_events;
};

class PathEngine {
 public:
  // Validates the experiment; throws Error{InvalidSpec}.
  explicit PathEngine(const ExperimentSpec& spec, PathOptions options = {});

  // Simulates path `index` into ws.
  void run(std::uint64_t index, PathWorkspace& ws) const;

  const ExperimentSpec& spec() const noexcept { return spec_; }
  const PathOptions& options() const noexcept { return options_; }

 private:
  ExperimentSpec spec_;
  PathOptions options_;
  ReturnModel returns_;
  BusinessModel business_;
};

// Number of worker threads used when 0 is requested.
unsigned default_threads();

// Calls fn(index, ws) for every index in [first, first + count). Indices are
// handed out dynamically; fn must only write to per-index storage.
void for_each_path(const PathEngine& engine, std::uint64_t first, std::uint64_t count, unsigned threads,
                   const std::function<void(std::uint64_t, const PathWorkspace&)>& fn);

}  // namespace ruinlab

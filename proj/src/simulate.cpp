#include "ruinlab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

// Closed interval [-1, 1] in the (lo, hi] convention of expect().
const double kMinusOneOpen = std::nextafter(-1.0, -kInf);

std::vector<double> with_two(std::vector<double> alphas) {
  if (std::find(alphas.begin(), alphas.end(), 2.0) == alphas.end()) alphas.push_back(2.0);
  return alphas;
}

[[noreturn]] void below_minus_one(double s, double x) {
  throw Error(ErrorCode::JumpBelowMinusOne,
              "jump of R at t = " + std::to_string(s) + " has size " + std::to_string(x) + " <= -1");
}

// Merges the sorted range [first, last) into the sorted vector times.
template <class It, class Key>
void merge_sorted(std::vector<double>& times, std::vector<double>& scratch, It first, It last, Key key) {
  if (first == last) return;
  scratch.clear();
  auto a = times.begin();
  while (a != times.end() && first != last) {
    const double b = key(*first);
    if (*a <= b) {
      scratch.push_back(*a++);
    } else {
      scratch.push_back(b);
      ++first;
    }
  }
  scratch.insert(scratch.end(), a, times.end());
  for (; first != last; ++first) scratch.push_back(key(*first));
  times.swap(scratch);
}

}  // namespace

const std::vector<double>& SimulatedPath::j(double alpha) const {
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (alphas[a] == alpha) return j_func[a];
  }
  throw std::out_of_range("J(alpha) not tracked for alpha = " + std::to_string(alpha));
}

std::vector<double> BusinessIncrements::cumulative() const {
  std::vector<double> x(continuous.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = x[i - 1] + continuous[i] + jumps[i];
  return x;
}

// ---------------------------------------------------------------------------

ReturnModel::ReturnModel(const ReturnSpec& spec) {
  if (const auto* bs = std::get_if<BlackScholesReturns>(&spec)) {
    kind_ = Kind::Levy;
    sigma_ = bs->sigma;
    hat_drift_ = bs->drift - 0.5 * bs->sigma * bs->sigma;
  } else if (const auto* lv = std::get_if<LevyReturns>(&spec)) {
    if (std::holds_alternative<TemperedStableJumps>(lv->jumps)) {
      throw Error(ErrorCode::InvalidSpec, "levy returns take compound Poisson jumps only");
    }
    kind_ = Kind::Levy;
    sigma_ = lv->sigma;
    sampler_ = JumpSampler(lv->jumps, 0.0);
    // jumps with |ln(1+x)| <= 1 are compensated
    const double small = integrate_levy(lv->jumps, [](double x) { return x; }, std::nextafter(std::exp(-1.0) - 1.0, -kInf),
                                        std::exp(1.0) - 1.0);
    hat_drift_ = lv->drift - small - 0.5 * lv->sigma * lv->sigma;
  } else if (const auto* hat = std::get_if<HatReturns>(&spec)) {
    kind_ = Kind::Hat;
    sigma_ = hat->sigma;
    sampler_ = JumpSampler(hat->jumps, hat->cutoff);
    hat_drift_ = hat->drift - sampler_.band_drift();
  } else if (const auto* add = std::get_if<AdditiveReturns>(&spec)) {
    if (std::holds_alternative<TemperedStableJumps>(add->jumps)) {
      throw Error(ErrorCode::InvalidSpec, "additive returns take compound Poisson drivers only");
    }
    kind_ = Kind::Additive;
    sigma_ = add->sigma;
    sampler_ = JumpSampler(add->jumps, 0.0);
    weight_ = add->weight;
    driver_drift_ = add->drift - integrate_levy(add->jumps, [](double x) { return x; }, kMinusOneOpen, 1.0);
  }
}

void ReturnModel::draw_jumps(double horizon, RngStream& rng, std::vector<JumpEvent>& out) const {
  out.clear();
  if (sampler_.empty()) return;
  const double rate = sampler_.rate();
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    out.push_back({t, sampler_.sample(rng)});
  }
}

double ReturnModel::continuous_increment(double u, double v, RngStream& rng) const {
  if (kind_ == Kind::Additive) {
    const double g1 = weight_.integral(u, v);
    const double g2 = weight_.integral_sq(u, v);
    double inc = driver_drift_ * g1 - 0.5 * sigma_ * sigma_ * g2;
    if (sigma_ > 0.0) inc += sigma_ * std::sqrt(g2) * rng.normal();
    return inc;
  }
  const double dt = v - u;
  double inc = hat_drift_ * dt;
  if (sigma_ > 0.0) inc += sigma_ * std::sqrt(dt) * rng.normal();
  return inc;
}

double ReturnModel::hat_jump(double s, double x) const {
  switch (kind_) {
    case Kind::Hat:
      return x;
    case Kind::Levy:
      if (!(x > -1.0)) below_minus_one(s, x);
      return std::log1p(x);
    case Kind::Additive: {
      const double gx = weight_(s) * x;
      if (!(gx > -1.0)) below_minus_one(s, gx);
      return std::log1p(gx);
    }
  }
  return 0.0;
}

BusinessModel::BusinessModel(const BusinessSpec& spec) : drift_(spec.drift), sigma_(spec.sigma) {
  if (std::holds_alternative<TemperedStableJumps>(spec.jumps)) {
    throw Error(ErrorCode::InvalidSpec, "business jumps must be compound Poisson");
  }
  sampler_ = JumpSampler(spec.jumps, 0.0);
  small_mean_ = integrate_levy(spec.jumps, [](double x) { return x; }, kMinusOneOpen, 1.0);
}

void BusinessModel::draw_jumps(double horizon, RngStream& rng, std::vector<JumpEvent>& out) const {
  out.clear();
  if (sampler_.empty()) return;
  const double rate = sampler_.rate();
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    out.push_back({t, sampler_.sample(rng)});
  }
}

double BusinessModel::continuous_increment(double dt, RngStream& rng) const {
  double inc = (drift_ - small_mean_) * dt;
  if (sigma_ > 0.0) inc += sigma_ * std::sqrt(dt) * rng.normal();
  return inc;
}

// ---------------------------------------------------------------------------

void build_grid(const GridSpec& grid, const std::vector<const std::vector<JumpEvent>*>& epochs,
                const std::vector<double>& extra_times, std::vector<double>& times) {
  thread_local std::vector<double> scratch;
  const std::int64_t n = grid.n_steps;
  const double horizon = grid.horizon;
  times.clear();
  for (std::int64_t k = 0; k < n; ++k) times.push_back(horizon * static_cast<double>(k) / static_cast<double>(n));
  times.push_back(horizon);
  if (grid.jump_adapted) {
    for (const auto* list : epochs) {
      if (list) merge_sorted(times, scratch, list->begin(), list->end(), [](const JumpEvent& e) { return e.time; });
    }
  }
  merge_sorted(times, scratch, extra_times.begin(), extra_times.end(), [](double t) { return t; });
  times.erase(std::unique(times.begin(), times.end()), times.end());
}

void fill_return_path(const ReturnModel& model, const std::vector<JumpEvent>& events, RngStream& rng,
                      SimulatedPath& path) {
  const std::size_t m = path.times.size();
  const std::size_t na = path.alphas.size();
  path.r_hat.assign(m, 0.0);
  path.r_hat_jump.assign(m, 0.0);
  path.stoch_exp.assign(m, 1.0);
  path.i_func.assign(m, 0.0);
  path.j_func.resize(na);
  for (auto& col : path.j_func) col.assign(m, 0.0);
  path.disc_integral.clear();

  std::size_t e = 0;
  for (std::size_t k = 1; k < m; ++k) {
    const double t0 = path.times[k - 1];
    const double t1 = path.times[k];
    const double dt = t1 - t0;
    const double cont = model.continuous_increment(t0, t1, rng);
    double jump = 0.0;
    while (e < events.size() && events[e].time <= t1) {
      jump += model.hat_jump(events[e].time, events[e].size);
      ++e;
    }
    const double prev = path.r_hat[k - 1];
    path.r_hat[k] = prev + cont + jump;
    path.r_hat_jump[k] = jump;
    path.stoch_exp[k] = std::exp(path.r_hat[k]);

    const double inv = 1.0 / path.stoch_exp[k - 1];
    path.i_func[k] = path.i_func[k - 1] + inv * dt;
    for (std::size_t a = 0; a < na; ++a) {
      const double alpha = path.alphas[a];
      const double w = alpha == 1.0 ? inv : alpha == 2.0 ? inv * inv : std::exp(-alpha * prev);
      path.j_func[a][k] = path.j_func[a][k - 1] + w * dt;
    }
  }
}

void fill_business(const BusinessModel& model, const std::vector<JumpEvent>& events, const std::vector<double>& times,
                   RngStream& rng, BusinessIncrements& out) {
  const std::size_t m = times.size();
  out.continuous.assign(m, 0.0);
  out.jumps.assign(m, 0.0);
  out.events.clear();
  for (std::size_t k = 1; k < m; ++k) out.continuous[k] = model.continuous_increment(times[k] - times[k - 1], rng);
  for (const JumpEvent& ev : events) {
    auto it = std::lower_bound(times.begin(), times.end(), ev.time);
    if (it == times.end()) continue;
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(it - times.begin()));
    out.jumps[k] += ev.size;
    out.events.push_back({ev.time, ev.size, k, std::abs(ev.size) > 1.0});
  }
}

void fill_representation(const BusinessModel& model, const SimulatedPath& path, const std::vector<JumpEvent>& events,
                         RngStream& rng, RepresentationPath& out) {
  const std::size_t m = path.times.size();
  const std::vector<double>& j2 = path.j(2.0);
  out.times = path.times;
  out.a_term.assign(m, 0.0);
  out.w_term.assign(m, 0.0);
  out.m_term.assign(m, 0.0);
  out.u_term.assign(m, 0.0);

  const double sigma = model.sigma();
  for (std::size_t k = 1; k < m; ++k) {
    out.a_term[k] = model.drift() * path.i_func[k];
    double w = out.w_term[k - 1];
    if (sigma > 0.0) w += sigma * std::sqrt(j2[k] - j2[k - 1]) * rng.normal();
    out.w_term[k] = w;
  }

  // Jumps of X' inside (t_{k-1}, t_k] are discounted at t_{k-1}.
  std::vector<double>& small = out.m_term;
  std::vector<double>& big = out.u_term;
  for (const JumpEvent& ev : events) {
    auto it = std::lower_bound(path.times.begin(), path.times.end(), ev.time);
    if (it == path.times.end()) continue;
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(it - path.times.begin()));
    const double discounted = ev.size / path.stoch_exp[k - 1];
    (std::abs(ev.size) > 1.0 ? big : small)[k] += discounted;
  }
  const double comp = model.small_jump_mean();
  for (std::size_t k = 1; k < m; ++k) {
    small[k] += small[k - 1];
    big[k] += big[k - 1];
  }
  for (std::size_t k = 1; k < m; ++k) small[k] -= comp * path.i_func[k];
}

// ---------------------------------------------------------------------------

SimulatedPath simulate_return_path(const ReturnSpec& returns, const GridSpec& grid, RngStream& rng,
                                   const std::vector<double>& alphas) {
  ValidationReport report = validate(grid);
  report.merge(validate(returns, grid.horizon));
  require_valid(report);
  const ReturnModel model(returns);
  std::vector<JumpEvent> events;
  model.draw_jumps(grid.horizon, rng, events);
  SimulatedPath path;
  build_grid(grid, {&events}, {}, path.times);
  path.alphas = with_two(alphas);
  fill_return_path(model, events, rng, path);
  return path;
}

BusinessIncrements simulate_business_increments(const BusinessSpec& business, const std::vector<double>& times,
                                                RngStream& rng) {
  require_valid(validate(business));
  const BusinessModel model(business);
  std::vector<JumpEvent> events;
  model.draw_jumps(times.back(), rng, events);
  BusinessIncrements out;
  fill_business(model, events, times, rng, out);
  return out;
}

void discounted_integral_direct(SimulatedPath& path, const BusinessIncrements& x, bool jump_adapted) {
  const std::size_t m = path.times.size();
  path.disc_integral.assign(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double eps_prev = path.stoch_exp[k - 1];
    double z = path.disc_integral[k - 1] + x.continuous[k] / eps_prev;
    if (x.jumps[k] != 0.0) {
      const double eps_minus = jump_adapted ? std::exp(path.r_hat[k] - path.r_hat_jump[k]) : eps_prev;
      z += x.jumps[k] / eps_minus;
    }
    path.disc_integral[k] = z;
  }
}

RepresentationPath discounted_integral_representation(const BusinessSpec& business, const SimulatedPath& path,
                                                      RngStream& rng) {
  require_valid(validate(business));
  const BusinessModel model(business);
  std::vector<JumpEvent> events;
  model.draw_jumps(path.times.back(), rng, events);
  RepresentationPath out;
  fill_representation(model, path, events, rng, out);
  return out;
}

std::optional<double> detect_ruin(const SimulatedPath& path, double y) {
  for (std::size_t i = 0; i < path.disc_integral.size(); ++i) {
    if (path.disc_integral[i] < -y) return path.times[i];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

PathEngine::PathEngine(const ExperimentSpec& spec, PathOptions options)
    : spec_(spec), options_(std::move(options)), returns_((require_valid(validate(spec)), spec.returns)),
      business_(spec.business) {
  options_.alphas = with_two(options_.alphas);
  auto& extra = options_.extra_times;
  for (double t : extra) {
    if (!(t > 0.0 && t <= spec_.grid.horizon)) {
      throw Error(ErrorCode::InvalidSpec, "extra grid time " + std::to_string(t) + " outside (0, T]");
    }
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
}

void PathEngine::run(std::uint64_t index, PathWorkspace& ws) const {
  RngStream rng_r(spec_.seed, index, Substream::Returns);
  RngStream rng_x(spec_.seed, index, Substream::Business);
  const double horizon = spec_.grid.horizon;
  returns_.draw_jumps(horizon, rng_r, ws.r_events);
  business_.draw_jumps(horizon, rng_x, ws.x_events);
  build_grid(spec_.grid, {&ws.r_events, &ws.x_events}, options_.extra_times, ws.path.times);
  ws.path.alphas = options_.alphas;
  fill_return_path(returns_, ws.r_events, rng_r, ws.path);
  fill_business(business_, ws.x_events, ws.path.times, rng_x, ws.business);
  discounted_integral_direct(ws.path, ws.business, spec_.grid.jump_adapted);
  if (options_.representation) {
    RngStream rng_p(spec_.seed, index, Substream::Representation);
    business_.draw_jumps(horizon, rng_p, ws.rep_events);
    fill_representation(business_, ws.path, ws.rep_events, rng_p, ws.representation);
  }
}

unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

void for_each_path(const PathEngine& engine, std::uint64_t first, std::uint64_t count, unsigned threads,
                   const std::function<void(std::uint64_t, const PathWorkspace&)>& fn) {
  if (threads == 0) threads = default_threads();
  if (threads <= 1 || count < 2) {
    PathWorkspace ws;
    for (std::uint64_t i = 0; i < count; ++i) {
      engine.run(first + i, ws);
      fn(first + i, ws);
    }
    return;
  }
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    PathWorkspace ws;
    try {
      while (!stop.load(std::memory_order_relaxed)) {
        const std::uint64_t begin = next.fetch_add(kChunk);
        if (begin >= count) break;
        const std::uint64_t end = std::min(count, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) {
          engine.run(first + i, ws);
          fn(first + i, ws);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ruinlab

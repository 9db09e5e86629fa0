#pragma once

// Continuous-time dynamics of the zero-range process with rejection-free
// event selection. Sites are registered by occupation class (1..A and one
// class for n > A) so that the stiff fast class costs nothing extra.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/model.hpp"
#include "zrp/rng.hpp"

namespace zrp {

enum class GeometryKind { Complete, Ring };

/// Lattice with a doubly stochastic jump kernel.
struct Geometry {
  GeometryKind kind = GeometryKind::Complete;
  std::int64_t L = 0;

  /// Destination of a particle leaving x.
  std::int64_t destination(std::int64_t x, Rng& rng) const {
    if (kind == GeometryKind::Complete) {
      auto y = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(L - 1)));
      return y >= x ? y + 1 : y;
    }
    return (rng.uniform() < 0.5) ? (x + 1) % L : (x + L - 1) % L;
  }
};

/// Event or time budget for a run; a run stops at whichever is reached first.
struct Budget {
  std::optional<std::uint64_t> events;
  std::optional<double> time;
};

/**
 * Mutable simulation state: configuration, class registry, total rate and clock.
 *
 * It also integrates the number of sites holding n particles over time, which
 * gives the time-averaged one-site occupation histogram without extra passes.
 */
class SimState {
 public:
  static constexpr std::uint64_t kResyncInterval = 1'000'000;

  SimState(ModelSpec spec, Geometry geometry, Configuration init)
      : spec_(std::move(spec)), geometry_(geometry), config_(std::move(init)) {
    if (geometry_.L < 2) throw std::invalid_argument("SimState: the lattice needs at least two sites");
    if (config_.L() != geometry_.L) throw std::invalid_argument("SimState: configuration size differs from L");
    if (!config_.valid()) throw std::invalid_argument("SimState: invalid configuration");
    A_ = spec_.threshold();
    classes_.assign(static_cast<std::size_t>(A_) + 2, {});
    pos_.assign(static_cast<std::size_t>(geometry_.L), -1);
    for (int c = 1; c <= A_; ++c) class_rate_.push_back(spec_.rate(c));
    occ_count_.assign(static_cast<std::size_t>(config_.N) + 1, 0);
    occ_time_.assign(static_cast<std::size_t>(config_.N) + 1, 0.0);
    occ_since_.assign(static_cast<std::size_t>(config_.N) + 1, 0.0);
    for (std::int64_t x = 0; x < geometry_.L; ++x) {
      const auto n = config_.occupations[x];
      enter(x, n);
      ++occ_count_[n];
    }
    above_rate_ = recompute_above_rate();
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const Geometry& geometry() const noexcept { return geometry_; }
  const Configuration& config() const noexcept { return config_; }
  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }
  /// Jumps that did not leave a site holding exactly A particles.
  std::uint64_t slow_events() const noexcept { return slow_events_; }

  /// Incrementally maintained sum of rate(eta_x).
  double total_rate() const noexcept {
    double r = above_rate_;
    for (int c = 1; c <= A_; ++c) r += static_cast<double>(classes_[c].size()) * class_rate_[c - 1];
    return r;
  }

  /// sum_x rate(eta_x) recomputed from the configuration.
  double recompute_total_rate() const {
    double r = 0.0;
    for (auto n : config_.occupations) r += spec_.rate(n);
    return r;
  }

  /// Performs one jump and advances the clock.
  void step(Rng& rng) {
    const double total = total_rate();
    time_ += rng.exponential(total);
    const std::int64_t x = pick_departure(rng, total);
    const std::int64_t y = geometry_.destination(x, rng);
    if (config_.occupations[x] != A_) ++slow_events_;
    move(x, y);
    ++events_;
    if (events_ % kResyncInterval == 0) {
      above_rate_ = recompute_above_rate();
      above_comp_ = 0.0;
    }
  }

  void run(const Budget& budget, Rng& rng) {
    if (!budget.events && !budget.time) throw std::invalid_argument("run: empty budget");
    const std::uint64_t stop_events = budget.events ? events_ + *budget.events : UINT64_MAX;
    const double stop_time = budget.time ? time_ + *budget.time : INFINITY;
    while (events_ < stop_events && time_ < stop_time) step(rng);
  }

  /// Time-averaged fraction of sites with occupation n, n = 0..N, since the last reset.
  std::vector<double> occupation_histogram() const {
    std::vector<double> h(occ_time_.size());
    const double span = time_ - hist_start_;
    if (span <= 0.0) throw std::logic_error("occupation_histogram: no time elapsed");
    for (std::size_t n = 0; n < h.size(); ++n)
      h[n] = (occ_time_[n] + static_cast<double>(occ_count_[n]) * (time_ - occ_since_[n])) /
             (span * static_cast<double>(geometry_.L));
    return h;
  }

  /// Restarts the histogram integration (e.g. after burn-in).
  void reset_histogram() {
    std::fill(occ_time_.begin(), occ_time_.end(), 0.0);
    std::fill(occ_since_.begin(), occ_since_.end(), time_);
    hist_start_ = time_;
  }

  /// Registry consistency with the configuration; used by tests.
  bool registry_consistent() const {
    for (std::int64_t x = 0; x < geometry_.L; ++x) {
      const int c = class_of(config_.occupations[x]);
      if (c == 0) {
        if (pos_[x] != -1) return false;
        continue;
      }
      if (pos_[x] < 0 || pos_[x] >= static_cast<std::int64_t>(classes_[c].size())) return false;
      if (classes_[c][pos_[x]] != x) return false;
    }
    return true;
  }

 private:
  int class_of(std::int64_t n) const noexcept {
    return n <= A_ ? static_cast<int>(n) : A_ + 1;
  }

  double recompute_above_rate() const {
    const auto& above = classes_[A_ + 1];
    if (spec_.variant() == AboveVariant::ConstantOne) return static_cast<double>(above.size());
    double s = 0.0;
    double comp = 0.0;
    for (auto x : above) {
      const double yv = spec_.rate(config_.occupations[x]) - comp;
      const double t = s + yv;
      comp = (t - s) - yv;
      s = t;
    }
    return s;
  }

  void enter(std::int64_t x, std::int64_t n) {
    const int c = class_of(n);
    if (c == 0) return;
    pos_[x] = static_cast<std::int64_t>(classes_[c].size());
    classes_[c].push_back(x);
  }

  void leave(std::int64_t x, std::int64_t n) {
    const int c = class_of(n);
    if (c == 0) return;
    auto& members = classes_[c];
    const auto p = pos_[x];
    members[p] = members.back();
    pos_[members[p]] = p;
    members.pop_back();
    pos_[x] = -1;
  }

  void touch_count(std::int64_t n, int delta) {
    occ_time_[n] += static_cast<double>(occ_count_[n]) * (time_ - occ_since_[n]);
    occ_since_[n] = time_;
    occ_count_[n] += delta;
  }

  void set_occupation(std::int64_t x, std::int64_t n_new) {
    const std::int64_t n_old = config_.occupations[x];
    if (class_of(n_old) != class_of(n_new)) {
      leave(x, n_old);
      enter(x, n_new);
    }
    if (spec_.variant() == AboveVariant::PdRatio) {
      if (n_old > A_) add_above(-spec_.rate(n_old));
      if (n_new > A_) add_above(spec_.rate(n_new));
    } else {
      above_rate_ += (n_new > A_) - (n_old > A_);
    }
    touch_count(n_old, -1);
    touch_count(n_new, +1);
    config_.occupations[x] = n_new;
  }

  // compensated update of the n > A rate sum
  void add_above(double v) {
    const double y = v - above_comp_;
    const double t = above_rate_ + y;
    above_comp_ = (t - above_rate_) - y;
    above_rate_ = t;
  }

  void move(std::int64_t x, std::int64_t y) {
    set_occupation(x, config_.occupations[x] - 1);
    set_occupation(y, config_.occupations[y] + 1);
  }

  std::int64_t pick_departure(Rng& rng, double total) const {
    double u = rng.uniform() * total;
    for (int c = 1; c <= A_; ++c) {
      const double w = static_cast<double>(classes_[c].size()) * class_rate_[c - 1];
      if (u < w) return classes_[c][rng.below(classes_[c].size())];
      u -= w;
    }
    const auto& above = classes_[A_ + 1];
    if (above.empty()) {
      // only reachable through rounding in u; fall back to the last nonempty class
      for (int c = A_; c >= 1; --c)
        if (!classes_[c].empty()) return classes_[c][rng.below(classes_[c].size())];
    }
    if (spec_.variant() == AboveVariant::ConstantOne) return above[rng.below(above.size())];
    // rates in (1, (A+1)/A]: accept a uniform member with probability rate / max_rate
    const double rmax = spec_.max_above_rate();
    for (;;) {
      const auto x = above[rng.below(above.size())];
      if (rng.uniform() * rmax < spec_.rate(config_.occupations[x])) return x;
    }
  }

  ModelSpec spec_;
  Geometry geometry_;
  Configuration config_;
  int A_ = 0;
  std::vector<std::vector<std::int64_t>> classes_;  // index 0 unused (empty sites)
  std::vector<std::int64_t> pos_;
  std::vector<double> class_rate_;
  double above_rate_ = 0.0;
  double above_comp_ = 0.0;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t slow_events_ = 0;

  std::vector<std::int64_t> occ_count_;
  std::vector<double> occ_time_;
  std::vector<double> occ_since_;
  double hist_start_ = 0.0;
};

/// Runs the dynamics from `init` for `budget` and returns the final state.
inline SimState run(const ModelSpec& spec, const Geometry& geometry, Configuration init,
                    const Budget& budget, Rng& rng) {
  SimState state(spec, geometry, std::move(init));
  state.run(budget, rng);
  return state;
}

}  // namespace zrp

#pragma once

/**
 * Swarm-style dynamic temperature control.
 *
 * Each reasoning tree carries a sampling temperature that is re-derived after
 * every reasoning step from the step's evaluation score x, the tree's best
 * score so far (personal best, pb) and the best score across all trees
 * (global best, gb):
 *
 *   T' = clamp(w0 * T + a1 * (pb - x) + a2 * (gb - x),  T_min, T_max)
 *
 * With a1 = a2 = 0 and w0 = 1 the rule degenerates to a constant temperature,
 * which is how the fixed-temperature baseline is expressed. A random
 * controller (uniform per-step draws) backs the random-temperature ablation.
 *
 * State is single-writer per tree: controllers are not internally locked and
 * one instance must never be advanced from two threads at once.
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace t2ot {

/// Update-rule coefficients and temperature bounds.
struct PsoParams {
  double inertial_weight = 1.0;  // w0, gain on the previous temperature
  double accel_personal = 0.1;   // a1, gain on (pb - x)
  double accel_global = 0.1;     // a2, gain on (gb - x)
  double temp_min = 0.1;
  double temp_max = 1.0;
  double temp_init = 0.7;

  /// Throws std::invalid_argument unless
  /// 0 <= temp_min <= temp_init <= temp_max and everything is finite.
  void validate() const;
};

/// One controller update: the temperature produced for the next step plus the
/// values that produced it. pb and gb are the values consumed by the update,
/// i.e. before x was folded into the personal best.
struct TemperatureHistoryEntry {
  int step = 0;
  double temperature = 0.0;
  double x = 0.0;
  double pb = 0.0;
  double gb = 0.0;
};

struct TemperatureState {
  double current_temp = 0.7;
  std::optional<double> personal_best;  // unset until the first observation
  int step_index = 0;                   // number of updates applied
  std::vector<TemperatureHistoryEntry> history;
};

/// Per-run view of the swarm: one personal best per tree plus their maximum.
struct SwarmState {
  std::vector<double> personal_bests;
  std::optional<double> global_best;
};

double clamp_temperature(double t, double t_min, double t_max);

/// The update rule before clamping. Kept separate so the adjustment
/// direction can be asserted without the bounds interfering.
double temperature_step_raw(const PsoParams& params, double prev_temp,
                            double pb, double x, double gb);

/// Applies one update: computes the clamped next temperature from the
/// pre-update personal best (x itself when no observation exists yet),
/// records a history entry and advances the step counter. Does NOT fold x
/// into the personal best; that is update_personal_best's job.
/// Throws std::invalid_argument on non-finite x or gb.
double update_temperature(const PsoParams& params, TemperatureState& state,
                          double x, double gb);

/// pb <- max(pb, x); the first observation initializes pb to x.
void update_personal_best(TemperatureState& state, double x);

/// global_best <- max(personal_bests). Throws when there are none.
void update_global_best(SwarmState& swarm);

// ---- controllers ----------------------------------------------------------

/// Per-tree temperature strategy. advance() consumes the step score and the
/// swarm's global best, emits the temperature for the next step, and folds
/// the score into the personal best. All strategies keep the same history
/// bookkeeping so run transcripts are method-independent in shape.
class TemperatureController {
 public:
  virtual ~TemperatureController() = default;

  /// Temperature for the first reasoning step.
  virtual double initial_temperature() = 0;

  virtual double advance(double x, double gb) = 0;

  const TemperatureState& state() const { return state_; }

  /// Personal best consumed by the next update (x-seeded when absent).
  double personal_best_or(double fallback) const {
    return state_.personal_best.value_or(fallback);
  }

 protected:
  TemperatureState state_;
};

/// Eq-style swarm controller.
std::unique_ptr<TemperatureController> make_pso_controller(
    const PsoParams& params);

/// Constant temperature (the fixed-temperature baseline).
/// Requires t0 in [t_min, t_max].
std::unique_ptr<TemperatureController> make_fixed_controller(
    double t0, double t_min = 0.1, double t_max = 1.0);

/// Uniform draw from the open interval (t_min, t_max) at every step,
/// including the first. Deterministic for a given seed.
std::unique_ptr<TemperatureController> make_random_controller(
    double t_min, double t_max, std::uint64_t seed);

}  // namespace t2ot

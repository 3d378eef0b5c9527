#include "t2ot/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace t2ot {

void PsoParams::validate() const {
  const double values[] = {inertial_weight, accel_personal, accel_global,
                           temp_min,        temp_max,       temp_init};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("PsoParams: non-finite parameter");
    }
  }
  if (temp_min < 0.0) {
    throw std::invalid_argument("PsoParams: temp_min must be >= 0");
  }
  if (!(temp_min <= temp_init && temp_init <= temp_max)) {
    throw std::invalid_argument(
        "PsoParams: requires temp_min <= temp_init <= temp_max");
  }
}

double clamp_temperature(double t, double t_min, double t_max) {
  return std::min(std::max(t, t_min), t_max);
}

double temperature_step_raw(const PsoParams& params, double prev_temp,
                            double pb, double x, double gb) {
  return params.inertial_weight * prev_temp +
         params.accel_personal * (pb - x) + params.accel_global * (gb - x);
}

double update_temperature(const PsoParams& params, TemperatureState& state,
                          double x, double gb) {
  if (!std::isfinite(x) || !std::isfinite(gb)) {
    throw std::invalid_argument("update_temperature: non-finite input");
  }
  const double pb = state.personal_best.value_or(x);
  const double raw = temperature_step_raw(params, state.current_temp, pb, x, gb);
  const double next = clamp_temperature(raw, params.temp_min, params.temp_max);
  state.step_index += 1;
  state.current_temp = next;
  state.history.push_back({state.step_index, next, x, pb, gb});
  return next;
}

void update_personal_best(TemperatureState& state, double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("update_personal_best: non-finite input");
  }
  if (!state.personal_best || x > *state.personal_best) {
    state.personal_best = x;
  }
}

void update_global_best(SwarmState& swarm) {
  if (swarm.personal_bests.empty()) {
    throw std::invalid_argument("update_global_best: no personal bests");
  }
  swarm.global_best =
      *std::max_element(swarm.personal_bests.begin(), swarm.personal_bests.end());
}

namespace {

class PsoController final : public TemperatureController {
 public:
  explicit PsoController(const PsoParams& params) : params_(params) {
    params_.validate();
    state_.current_temp = params_.temp_init;
  }

  double initial_temperature() override { return params_.temp_init; }

  double advance(double x, double gb) override {
    const double next = update_temperature(params_, state_, x, gb);
    update_personal_best(state_, x);
    return next;
  }

 private:
  PsoParams params_;
};

class FixedController final : public TemperatureController {
 public:
  FixedController(double t0, double t_min, double t_max) : t0_(t0) {
    if (!std::isfinite(t0) || t0 < t_min || t0 > t_max) {
      throw std::invalid_argument(
          "make_fixed_controller: t0 outside [t_min, t_max]");
    }
    state_.current_temp = t0;
  }

  double initial_temperature() override { return t0_; }

  double advance(double x, double gb) override {
    if (!std::isfinite(x) || !std::isfinite(gb)) {
      throw std::invalid_argument("FixedController: non-finite input");
    }
    const double pb = state_.personal_best.value_or(x);
    state_.step_index += 1;
    state_.history.push_back({state_.step_index, t0_, x, pb, gb});
    update_personal_best(state_, x);
    return t0_;
  }

 private:
  double t0_;
};

class RandomController final : public TemperatureController {
 public:
  RandomController(double t_min, double t_max, std::uint64_t seed)
      : t_min_(t_min), t_max_(t_max), rng_(seed) {
    if (!(t_min < t_max)) {
      throw std::invalid_argument("make_random_controller: t_min < t_max");
    }
    state_.current_temp = draw();
  }

  double initial_temperature() override { return state_.current_temp; }

  double advance(double x, double gb) override {
    if (!std::isfinite(x) || !std::isfinite(gb)) {
      throw std::invalid_argument("RandomController: non-finite input");
    }
    const double pb = state_.personal_best.value_or(x);
    const double next = draw();
    state_.step_index += 1;
    state_.current_temp = next;
    state_.history.push_back({state_.step_index, next, x, pb, gb});
    update_personal_best(state_, x);
    return next;
  }

 private:
  double draw() {
    std::uniform_real_distribution<double> dist(t_min_, t_max_);
    double v = dist(rng_);
    // Open interval: re-draw on (measure-zero) boundary hits.
    while (v <= t_min_ || v >= t_max_) v = dist(rng_);
    return v;
  }

  double t_min_;
  double t_max_;
  std::mt19937_64 rng_;
};

}  // namespace

std::unique_ptr<TemperatureController> make_pso_controller(
    const PsoParams& params) {
  return std::make_unique<PsoController>(params);
}

std::unique_ptr<TemperatureController> make_fixed_controller(double t0,
                                                             double t_min,
                                                             double t_max) {
  return std::make_unique<FixedController>(t0, t_min, t_max);
}

std::unique_ptr<TemperatureController> make_random_controller(
    double t_min, double t_max, std::uint64_t seed) {
  return std::make_unique<RandomController>(t_min, t_max, seed);
}

}  // namespace t2ot

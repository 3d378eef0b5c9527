#include <doctest.h>

#include <cmath>
#include <random>

#include "t2ot/temperature.hpp"

using namespace t2ot;

namespace {

// Independent reference for the update rule; kept to one expression on
// purpose so the implementation can be checked bit-for-bit against it.
double oracle_update(double w0, double a1, double a2, double t, double pb,
                     double x, double gb, double t_min, double t_max) {
  const double raw = w0 * t + a1 * (pb - x) + a2 * (gb - x);
  return std::min(std::max(raw, t_min), t_max);
}

PsoParams params_with(double w0, double a1, double a2, double t_min = 0.1,
                      double t_max = 1.0, double t_init = 0.7) {
  PsoParams p;
  p.inertial_weight = w0;
  p.accel_personal = a1;
  p.accel_global = a2;
  p.temp_min = t_min;
  p.temp_max = t_max;
  p.temp_init = t_init;
  return p;
}

TemperatureState state_with(double temp, double pb) {
  TemperatureState s;
  s.current_temp = temp;
  s.personal_best = pb;
  return s;
}

}  // namespace

TEST_CASE("clamp_temperature") {
  CHECK(clamp_temperature(1.7, 0.1, 1.0) == 1.0);
  CHECK(clamp_temperature(-0.2, 0.1, 1.0) == 0.1);
  CHECK(clamp_temperature(0.7, 0.1, 1.0) == 0.7);
}

TEST_CASE("update_temperature identity when pb and gb equal x") {
  auto params = params_with(1.0, 0.1, 0.1);
  auto state = state_with(0.7, 0.5);
  CHECK(update_temperature(params, state, 0.5, 0.5) == 0.7);
  CHECK(state.current_temp == 0.7);
  CHECK(state.step_index == 1);
  REQUIRE(state.history.size() == 1);
  CHECK(state.history[0].pb == 0.5);
  CHECK(state.history[0].gb == 0.5);
}

TEST_CASE("update_temperature moves by the weighted differences") {
  auto params = params_with(1.0, 0.1, 0.1);
  auto state = state_with(0.7, 1.0);
  // pb - x = 0.5 and gb - x = 0.5: 0.7 + 0.05 + 0.05.
  CHECK(update_temperature(params, state, 0.5, 1.0) ==
        doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("update_temperature clamps at the upper bound") {
  auto params = params_with(1.0, 0.1, 0.1);
  auto state = state_with(0.95, 2.0);
  // Unclamped value is 1.15.
  CHECK(update_temperature(params, state, 1.0, 2.0) == 1.0);
}

TEST_CASE("update_temperature rejects non-finite inputs") {
  auto params = params_with(1.0, 0.1, 0.1);
  auto state = state_with(0.7, 0.5);
  CHECK_THROWS_AS(
      update_temperature(params, state, std::nan(""), 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(update_temperature(params, state, 0.5,
                                     std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("update_temperature matches the direct-formula oracle exactly") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.0, 2.0);
  std::uniform_real_distribution<double> score(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double t_min = unit(rng) * 0.5;
    const double t_max = t_min + 0.1 + unit(rng);
    auto params = params_with(weight(rng), coeff(rng), coeff(rng), t_min,
                              t_max, t_min);
    const double t = t_min + unit(rng) * (t_max - t_min);
    const double pb = score(rng);
    const double x = score(rng);
    const double gb = score(rng);
    auto state = state_with(t, pb);
    const double got = update_temperature(params, state, x, gb);
    const double want =
        oracle_update(params.inertial_weight, params.accel_personal,
                      params.accel_global, t, pb, x, gb, t_min, t_max);
    CHECK(got == want);  // bit-for-bit
    CHECK(got >= t_min);
    CHECK(got <= t_max);
  }
}

TEST_CASE("update_personal_best keeps the maximum") {
  TemperatureState state;
  state.personal_best = 0.5;
  update_personal_best(state, 0.8);
  CHECK(*state.personal_best == 0.8);
  update_personal_best(state, 0.5);
  CHECK(*state.personal_best == 0.8);
}

TEST_CASE("update_personal_best initializes from the first observation") {
  TemperatureState state;
  CHECK(!state.personal_best.has_value());
  update_personal_best(state, 0.3);
  CHECK(*state.personal_best == 0.3);
}

TEST_CASE("update_global_best is the maximum over trees") {
  SwarmState swarm;
  swarm.personal_bests = {0.4, 0.9, 0.7};
  update_global_best(swarm);
  CHECK(*swarm.global_best == 0.9);

  SwarmState single;
  single.personal_bests = {0.6};
  update_global_best(single);
  CHECK(*single.global_best == 0.6);

  SwarmState empty;
  CHECK_THROWS_AS(update_global_best(empty), std::invalid_argument);
}

TEST_CASE("gb stays put because pb updates are monotone") {
  TemperatureState tree;
  update_personal_best(tree, 0.9);
  update_personal_best(tree, 0.8);  // rejected by max semantics
  SwarmState swarm;
  swarm.personal_bests = {*tree.personal_best};
  update_global_best(swarm);
  CHECK(*swarm.global_best == 0.9);
}

TEST_CASE("fixed controller is constant and matches the degenerate rule") {
  auto fixed = make_fixed_controller(0.7);
  auto degenerate = make_pso_controller(params_with(1.0, 0.0, 0.0));
  CHECK(fixed->initial_temperature() == 0.7);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double x = score(rng);
    const double gb = score(rng);
    CHECK(fixed->advance(x, gb) == 0.7);
    CHECK(degenerate->advance(x, gb) == 0.7);
  }
  CHECK(fixed->state().history.size() == 10);
  for (const auto& entry : fixed->state().history) {
    CHECK(entry.temperature == 0.7);
  }
  CHECK_THROWS_AS(make_fixed_controller(1.4, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("random controller is seed-deterministic") {
  auto a = make_random_controller(0.0, 1.0, 7);
  auto b = make_random_controller(0.0, 1.0, 7);
  CHECK(a->initial_temperature() == b->initial_temperature());
  for (int i = 0; i < 50; ++i) {
    CHECK(a->advance(0.5, 0.5) == b->advance(0.5, 0.5));
  }
  CHECK_THROWS_AS(make_random_controller(1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("random controller draws are uniform on the open interval") {
  auto c = make_random_controller(0.0, 1.0, 123);
  double sum = c->initial_temperature();
  double lo = sum;
  double hi = sum;
  const int n = 10000;
  for (int i = 1; i < n; ++i) {
    const double t = c->advance(0.5, 0.5);
    sum += t;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("zero coefficients keep the temperature at its initial value") {
  auto controller = make_pso_controller(params_with(1.0, 0.0, 0.0));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    CHECK(controller->advance(score(rng), score(rng)) == 0.7);
  }
}

TEST_CASE("every emitted temperature stays inside the bounds") {
  auto controller = make_pso_controller(params_with(1.0, 0.4, -0.3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = controller->advance(score(rng), score(rng));
    CHECK(t >= 0.1);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("with pb == gb the rule reduces to the single-tree form") {
  auto params = params_with(1.0, 0.1, 0.1);
  auto state = state_with(0.7, 0.9);
  const double got = update_temperature(params, state, 0.4, 0.9);
  const double reduced =
      clamp_temperature(0.7 + (0.1 + 0.1) * (0.9 - 0.4), 0.1, 1.0);
  CHECK(got == doctest::Approx(reduced).epsilon(1e-12));
}

TEST_CASE("negative coefficients lower the pre-clamp output for sub-best x") {
  auto params = params_with(1.0, -0.005, -0.005);
  // x below pb == gb: raw output must drop strictly below the input temp.
  const double raw = temperature_step_raw(params, 0.7, 80.0, 60.0, 80.0);
  CHECK(raw < 0.7);
  // x equal to the running best: both difference terms vanish.
  const double same = temperature_step_raw(params, 0.7, 80.0, 80.0, 80.0);
  CHECK(same == 0.7);
}

TEST_CASE("pb history is monotone under arbitrary score streams") {
  auto controller = make_pso_controller(params_with(1.0, 0.1, 0.1));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  double last_pb = -1.0;
  for (int i = 0; i < 300; ++i) {
    controller->advance(score(rng), score(rng));
    const double pb = *controller->state().personal_best;
    CHECK(pb >= last_pb);
    last_pb = pb;
  }
}

TEST_CASE("PsoParams validation") {
  CHECK_THROWS_AS(params_with(1.0, 0.1, 0.1, 0.8, 1.0, 0.7).validate(),
                  std::invalid_argument);  // init below min
  CHECK_THROWS_AS(params_with(1.0, 0.1, 0.1, -0.1, 1.0, 0.5).validate(),
                  std::invalid_argument);  // negative min
  CHECK_NOTHROW(params_with(1.0, -0.005, -0.005).validate());
}

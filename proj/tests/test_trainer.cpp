#include "netae/trainer.hpp"

#include <cmath>

#include "doctest.h"
#include "netae/errors.hpp"
#include "netae/rng.hpp"

using namespace netae;

namespace {

const ModelShape kTinyShape{6, {4, 3, 2}};

std::vector<EncodedSample> constant_samples(std::size_t n, const Vector& features) {
  std::vector<EncodedSample> samples(n);
  for (auto& s : samples) {
    s.features = features;
    s.cls = TrafficClass::Normal;
  }
  return samples;
}

// straight-line Adam over flat arrays, kept independent of the library's
// tensor walking so the two implementations can be compared bit for bit
struct FlatAdam {
  std::vector<double> m, v;
  long t = 0;

  void step(std::vector<double>& theta, const std::vector<double>& grad, const TrainConfig& cfg) {
    if (m.empty()) {
      m.assign(theta.size(), 0.0);
      v.assign(theta.size(), 0.0);
    }
    t += 1;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
      v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
      theta[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_epsilon);
    }
  }
};

std::vector<double> flatten(const ModelParams& p) {
  std::vector<double> flat;
  for (const auto* t : tensor_list(p)) flat.insert(flat.end(), t->begin(), t->end());
  return flat;
}

}  // namespace

TEST_CASE("adam_step with zero gradient keeps parameters and advances t") {
  auto params = init_params(kTinyShape, 1);
  const auto before = params;
  auto state = AdamState::init(params);
  adam_step(params, zeros_like(params), state, TrainConfig{});
  CHECK(params == before);
  CHECK(state.t == 1);
}

TEST_CASE("one adam step on a fresh state moves by about -lr * sign(g)") {
  TrainConfig cfg;
  cfg.learning_rate = 0.001;
  auto params = init_params(kTinyShape, 2);
  const auto before = flatten(params);
  auto grads = zeros_like(params);
  Rng rng(5);
  for (auto* t : tensor_list(grads)) {
    for (double& g : *t) g = rng.next_in(-1.0, 1.0);
  }
  auto state = AdamState::init(params);
  adam_step(params, grads, state, cfg);
  const auto after = flatten(params);
  const auto flat_grads = flatten(grads);
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (std::abs(flat_grads[i]) < 1e-3) continue;  // sign(g) ill-conditioned near zero
    const double move = after[i] - before[i];
    const double expect = -cfg.learning_rate * (flat_grads[i] > 0 ? 1.0 : -1.0);
    CHECK(move == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("adam_step matches the straight-line reference bit for bit") {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  auto params = init_params(kTinyShape, 3);
  auto flat = flatten(params);
  auto state = AdamState::init(params);
  FlatAdam reference;
  Rng rng(9);
  for (int step = 0; step < 2; ++step) {
    auto grads = zeros_like(params);
    std::vector<double> flat_grads;
    for (auto* t : tensor_list(grads)) {
      for (double& g : *t) {
        g = rng.next_in(-0.5, 0.5);
        flat_grads.push_back(g);
      }
    }
    adam_step(params, grads, state, cfg);
    reference.step(flat, flat_grads, cfg);
    CHECK(flatten(params) == flat);
  }
  CHECK(state.t == 2);
}

TEST_CASE("train memorizes a single repeated point") {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 8;
  cfg.epochs = 100;
  cfg.seed = 4;
  cfg.threads = 1;
  const Vector point{0.1, 0.9, 0.3, 0.0, 0.7, 0.5};
  const auto result = train(constant_samples(64, point), cfg, kTinyShape);
  CHECK(result.history.size() == 100);
  CHECK(result.history.back().train_loss < 1e-4);
}

TEST_CASE("train rejects contract violations") {
  TrainConfig cfg;
  cfg.batch_size = 4;
  auto samples = constant_samples(16, Vector(6, 0.5));
  samples[7].cls = TrafficClass::Dos;
  CHECK_THROWS_AS(train(samples, cfg, kTinyShape), DataError);

  CHECK_THROWS_AS(train(constant_samples(7, Vector(6, 0.5)), cfg, kTinyShape), DataError);

  TrainConfig bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(train(constant_samples(16, Vector(6, 0.5)), bad, kTinyShape), DataError);
  bad = cfg;
  bad.validation_fraction = 1.0;
  CHECK_THROWS_AS(train(constant_samples(16, Vector(6, 0.5)), bad, kTinyShape), DataError);
}

TEST_CASE("training is deterministic for a fixed config and seed") {
  TrainConfig cfg;
  cfg.learning_rate = 0.005;
  cfg.batch_size = 8;
  cfg.epochs = 5;
  cfg.seed = 11;
  cfg.threads = 4;
  Rng rng(21);
  std::vector<EncodedSample> samples;
  for (int i = 0; i < 80; ++i) {
    Vector v(6);
    for (double& x : v) x = rng.next_unit();
    samples.push_back({v, TrafficClass::Normal});
  }
  const auto a = train(samples, cfg, kTinyShape);
  const auto b = train(samples, cfg, kTinyShape);
  CHECK(a.params == b.params);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].validation_loss == b.history[e].validation_loss);
  }
  // thread count must not change the arithmetic
  TrainConfig serial = cfg;
  serial.threads = 1;
  const auto c = train(samples, serial, kTinyShape);
  CHECK(a.params == c.params);
}

TEST_CASE("validation samples never contribute gradients") {
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 3;
  cfg.seed = 2;
  cfg.validation_fraction = 0.25;
  cfg.threads = 1;
  const auto samples = constant_samples(80, Vector(6, 0.4));
  const auto result = train(samples, cfg, kTinyShape);
  // 80 samples, 20 held out: exactly 60 gradient evaluations per epoch
  CHECK(result.gradient_sample_evals == 3 * 60);
}

TEST_CASE("epoch ordering depends only on seed and epoch index") {
  const auto a = epoch_order(100, 5, 3);
  const auto b = epoch_order(100, 5, 3);
  CHECK(a == b);
  CHECK(a != epoch_order(100, 5, 4));
  CHECK(a != epoch_order(100, 6, 3));
  // it is a permutation
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("loss stays finite and decreases on a learnable distribution") {
  TrainConfig cfg;
  cfg.learning_rate = 0.005;
  cfg.batch_size = 16;
  cfg.epochs = 20;
  cfg.seed = 13;
  Rng rng(31);
  std::vector<EncodedSample> samples;
  for (int i = 0; i < 200; ++i) {
    Vector v(6);
    for (std::size_t j = 0; j < 6; ++j) v[j] = 0.2 + 0.05 * rng.next_unit() + (j % 2 ? 0.3 : 0.0);
    samples.push_back({v, TrafficClass::Normal});
  }
  const auto result = train(samples, cfg, kTinyShape);
  for (const auto& e : result.history) {
    CHECK(std::isfinite(e.train_loss));
    CHECK(std::isfinite(e.validation_loss));
    CHECK(e.train_loss >= 0.0);
  }
  CHECK(result.history.back().train_loss < result.history.front().train_loss);
}

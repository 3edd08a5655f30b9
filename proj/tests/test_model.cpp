#include "netae/model.hpp"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "netae/errors.hpp"
#include "netae/io.hpp"
#include "netae/rng.hpp"

using namespace netae;

namespace {

const ModelShape kTinyShape{6, {4, 3, 2}};

Vector random_unit_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (double& x : v) x = rng.next_unit();
  return v;
}

// independent straight-line evaluation of one LSTM step, written against the
// gate equations directly rather than through the library's matrix helpers
LstmState reference_cell(const Vector& x, const Vector& h_prev, const Vector& c_prev,
                         const LstmLayerParams& p) {
  const std::size_t hidden = static_cast<std::size_t>(p.hidden_dim);
  auto pre = [&](const GateParams& g, std::size_t row) {
    double acc = g.b[row];
    for (std::size_t k = 0; k < x.size(); ++k) acc += g.w_x.at(static_cast<int>(row), static_cast<int>(k)) * x[k];
    for (std::size_t k = 0; k < h_prev.size(); ++k) acc += g.w_h.at(static_cast<int>(row), static_cast<int>(k)) * h_prev[k];
    return acc;
  };
  LstmState s;
  s.h.resize(hidden);
  s.c.resize(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    const double i = 1.0 / (1.0 + std::exp(-pre(p.input, j)));
    const double f = 1.0 / (1.0 + std::exp(-pre(p.forget, j)));
    const double g = std::tanh(pre(p.cell, j));
    const double o = 1.0 / (1.0 + std::exp(-pre(p.output, j)));
    s.c[j] = f * c_prev[j] + i * g;
    s.h[j] = o * std::tanh(s.c[j]);
  }
  return s;
}

}  // namespace

TEST_CASE("init_params is deterministic per seed and differs across seeds") {
  const auto shape = ModelShape::standard();
  const auto a = init_params(shape, 7);
  const auto b = init_params(shape, 7);
  CHECK(a == b);
  const auto c = init_params(shape, 8);
  CHECK(a != c);
}

TEST_CASE("init_params respects the uniform bound and bias convention") {
  for (std::uint64_t seed : {1ULL, 123ULL, 9999ULL, 424242ULL}) {
    const auto params = init_params(ModelShape::standard(), seed);
    // bottleneck layer has hidden_dim 8, so all its gate weights sit in +-1/sqrt(8)
    const double bound = 1.0 / std::sqrt(8.0);
    const auto& bottleneck = params.encoder.back();
    REQUIRE(bottleneck.hidden_dim == 8);
    for (const GateParams* gate :
         {&bottleneck.input, &bottleneck.forget, &bottleneck.cell, &bottleneck.output}) {
      for (double w : gate->w_x.data) CHECK(std::abs(w) <= bound);
      for (double w : gate->w_h.data) CHECK(std::abs(w) <= bound);
    }
    for (const auto& layer : params.encoder) {
      for (double v : layer.forget.b) CHECK(v == 1.0);
      for (double v : layer.input.b) CHECK(v == 0.0);
      for (double v : layer.cell.b) CHECK(v == 0.0);
      for (double v : layer.output.b) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("model dimensions follow the declared shape") {
  const auto params = init_params(ModelShape::standard(), 1);
  REQUIRE(params.encoder.size() == 3);
  REQUIRE(params.decoder.size() == 3);
  CHECK(params.encoder[0].input_dim == 122);
  CHECK(params.encoder[0].hidden_dim == 32);
  CHECK(params.encoder[1].input_dim == 32);
  CHECK(params.encoder[1].hidden_dim == 16);
  CHECK(params.encoder[2].input_dim == 16);
  CHECK(params.encoder[2].hidden_dim == 8);
  CHECK(params.decoder[0].input_dim == 8);
  CHECK(params.decoder[0].hidden_dim == 8);
  CHECK(params.decoder[1].input_dim == 8);
  CHECK(params.decoder[1].hidden_dim == 16);
  CHECK(params.decoder[2].input_dim == 16);
  CHECK(params.decoder[2].hidden_dim == 32);
  CHECK(params.output.w.rows == 122);
  CHECK(params.output.w.cols == 32);
}

TEST_CASE("lstm_cell with all-zero parameters outputs zero") {
  auto params = zero_params(ModelShape{3, {4}});
  const auto& layer = params.encoder[0];
  const auto s = lstm_cell({0.5, -0.2, 0.9}, Vector(4, 0.0), Vector(4, 0.0), layer);
  CHECK(s.h == Vector(4, 0.0));
  CHECK(s.c == Vector(4, 0.0));
}

TEST_CASE("lstm_cell pure carry: saturated forget gate keeps the cell state") {
  auto params = zero_params(ModelShape{3, {4}});
  auto& layer = params.encoder[0];
  // sigmoid(40) rounds to exactly 1.0 in double precision, and with zero
  // candidate weights g = tanh(0) = 0, so c = 1*c_prev + i*0 = c_prev
  for (double& b : layer.forget.b) b = 40.0;
  const Vector c_prev{0.3, -0.7, 0.12, 1.5};
  const auto s = lstm_cell({1.0, 1.0, 1.0}, Vector(4, 0.0), c_prev, layer);
  CHECK(s.c == c_prev);
}

TEST_CASE("lstm_cell matches the straight-line reference on random 4-dim cells") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto params = init_params(ModelShape{4, {4}}, seed);
    auto& layer = params.encoder[0];
    Rng rng(seed * 31);
    Vector x(4), h_prev(4), c_prev(4);
    for (int j = 0; j < 4; ++j) {
      x[j] = rng.next_in(-1.0, 1.0);
      h_prev[j] = rng.next_in(-1.0, 1.0);
      c_prev[j] = rng.next_in(-1.0, 1.0);
    }
    const auto got = lstm_cell(x, h_prev, c_prev, layer);
    const auto want = reference_cell(x, h_prev, c_prev, layer);
    for (int j = 0; j < 4; ++j) {
      CHECK(got.h[j] == doctest::Approx(want.h[j]).epsilon(1e-12));
      CHECK(got.c[j] == doctest::Approx(want.c[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("lstm_cell rejects mismatched dimensions") {
  auto params = zero_params(ModelShape{3, {4}});
  CHECK_THROWS_AS(lstm_cell({1.0, 2.0}, Vector(4, 0.0), Vector(4, 0.0), params.encoder[0]),
                  DataError);
}

TEST_CASE("forward zero propagation") {
  const auto params = zero_params(ModelShape::standard());
  const auto out = forward(Vector(122, 0.0), params);
  CHECK(out.x_hat == Vector(122, 0.0));
  CHECK(out.z == Vector(8, 0.0));
}

TEST_CASE("forward is deterministic and keeps the bottleneck at 8") {
  const auto params = init_params(ModelShape::standard(), 5);
  const auto x = random_unit_vector(122, 99);
  const auto a = forward(x, params);
  const auto b = forward(x, params);
  CHECK(a.x_hat == b.x_hat);
  CHECK(a.z == b.z);
  CHECK(a.z.size() == 8);
  CHECK(a.x_hat.size() == 122);
  CHECK_THROWS_AS(forward(Vector(121, 0.0), params), DataError);
}

TEST_CASE("cell state is bounded by |c_prev| + 1 after one step") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto params = init_params(ModelShape{5, {6}}, seed);
    Rng rng(seed);
    Vector x(5), h_prev(6), c_prev(6);
    for (auto* v : {&x, &h_prev, &c_prev}) {
      for (double& e : *v) e = rng.next_in(-2.0, 2.0);
    }
    const auto s = lstm_cell(x, h_prev, c_prev, params.encoder[0]);
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(s.c[j]) <= std::abs(c_prev[j]) + 1.0);
    }
  }
}

TEST_CASE("gradients are shape-congruent with the parameters") {
  for (const auto& shape : {ModelShape::standard(), kTinyShape, ModelShape{9, {5}}}) {
    const auto params = init_params(shape, 3);
    const auto grads = gradients(random_unit_vector(static_cast<std::size_t>(shape.input_dim), 17),
                                 params);
    const auto pt = tensor_list(params);
    const auto gt = tensor_list(grads);
    REQUIRE(pt.size() == gt.size());
    for (std::size_t k = 0; k < pt.size(); ++k) CHECK(pt[k]->size() == gt[k]->size());
  }
}

TEST_CASE("gradients match central finite differences on the tiny model") {
  auto params = init_params(kTinyShape, 42);
  const auto x = random_unit_vector(6, 7);
  const auto analytic = gradients(x, params);

  const double step = 1e-5;
  // central differences are only valid away from the relu kink; make sure no
  // dense pre-activation sits within reach of the probe step
  {
    ForwardTrace trace;
    forward(x, params, trace);
    for (double pre : trace.dense_pre) REQUIRE(std::abs(pre) > 100 * step);
  }
  const auto tensors = tensor_list(params);
  const auto grad_tensors = tensor_list(analytic);
  double max_rel = 0.0;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    auto& tensor = *tensors[k];
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor[i];
      tensor[i] = saved + step;
      const double up = mse(x, forward(x, params).x_hat);
      tensor[i] = saved - step;
      const double down = mse(x, forward(x, params).x_hat);
      tensor[i] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double got = (*grad_tensors[k])[i];
      const double rel = std::abs(got - fd) / std::max(std::abs(got) + std::abs(fd), 1e-6);
      max_rel = std::max(max_rel, rel);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("structurally dead parameters have exactly zero gradient") {
  const auto params = init_params(kTinyShape, 4);
  const auto grads = gradients(random_unit_vector(6, 21), params);
  // sequence length 1 from zero state: recurrent weights and the forget gate
  // never touch the loss
  for (const auto* layers : {&grads.encoder, &grads.decoder}) {
    for (const auto& layer : *layers) {
      for (double v : layer.forget.w_x.data) CHECK(v == 0.0);
      for (double v : layer.forget.b) CHECK(v == 0.0);
      for (const GateParams* gate : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
        for (double v : gate->w_h.data) CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("dense bias gradient is exactly zero where relu is dead") {
  auto params = zero_params(kTinyShape);
  // all pre-activations are b, negative everywhere -> x_hat = 0 and the whole
  // dense path is dead
  for (double& b : params.output.b) b = -1.0;
  const auto x = random_unit_vector(6, 3);
  const auto out = forward(x, params);
  CHECK(out.x_hat == Vector(6, 0.0));
  const auto grads = gradients(x, params);
  for (double v : grads.output.b) CHECK(v == 0.0);
  for (double v : grads.output.w.data) CHECK(v == 0.0);
}

TEST_CASE("gradient scales linearly with the loss scale") {
  const auto params = init_params(kTinyShape, 9);
  const auto x = random_unit_vector(6, 5);
  const auto g1 = gradients(x, params, 1.0);
  const auto g2 = gradients(x, params, 2.0);
  const auto t1 = tensor_list(g1);
  const auto t2 = tensor_list(g2);
  for (std::size_t k = 0; k < t1.size(); ++k) {
    for (std::size_t i = 0; i < t1[k]->size(); ++i) {
      const double a = 2.0 * (*t1[k])[i];
      const double b = (*t2[k])[i];
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("checkpoint json round-trip is exact") {
  const auto params = init_params(kTinyShape, 77);
  Checkpoint ckpt;
  ckpt.params = params;
  ckpt.schema_checksum = "0123456789abcdef";
  const auto text = checkpoint_to_json(ckpt);
  const auto loaded = checkpoint_from_json(text);
  CHECK(loaded.params == params);
  CHECK(loaded.schema_checksum == "0123456789abcdef");
  CHECK_FALSE(loaded.adam.has_value());
  CHECK_FALSE(loaded.history.has_value());
  CHECK(checkpoint_to_json(loaded) == text);
}

TEST_CASE("checkpoint carries optional adam state and loss history") {
  const auto params = init_params(kTinyShape, 78);
  Checkpoint ckpt;
  ckpt.params = params;
  ckpt.schema_checksum = "feed";
  AdamState adam = AdamState::init(params);
  adam.t = 12;
  *tensor_list(adam.m)[0] = Vector(tensor_list(adam.m)[0]->size(), 0.25);
  ckpt.adam = adam;
  ckpt.history = LossHistory{{0.5, 0.6}, {0.2, 0.25}};
  const auto loaded = checkpoint_from_json(checkpoint_to_json(ckpt));
  REQUIRE(loaded.adam.has_value());
  CHECK(loaded.adam->t == 12);
  CHECK(loaded.adam->m == adam.m);
  CHECK(loaded.adam->v == adam.v);
  REQUIRE(loaded.history.has_value());
  CHECK(loaded.history->size() == 2);
  CHECK((*loaded.history)[1].train_loss == 0.2);
}

TEST_CASE("loading a model against the wrong schema checksum fails") {
  const auto params = init_params(kTinyShape, 79);
  Checkpoint ckpt;
  ckpt.params = params;
  ckpt.schema_checksum = "aaaa";
  const auto dir = std::filesystem::temp_directory_path() / "netae_model_test.json";
  save_checkpoint(dir.string(), ckpt);
  CHECK(load_checkpoint(dir.string(), "aaaa").params == params);
  CHECK_THROWS_AS(load_checkpoint(dir.string(), "bbbb"), DataError);
}

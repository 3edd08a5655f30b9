#pragma once

#include <cstdint>
#include <vector>

#include "netae/linalg.hpp"

namespace netae {

// one LSTM gate: w_x applies to the layer input, w_h to the previous hidden
// state (the W and U matrices of the usual notation), b is the bias
struct GateParams {
  Matrix w_x;  // hidden_dim x input_dim
  Matrix w_h;  // hidden_dim x hidden_dim
  Vector b;    // hidden_dim

  bool operator==(const GateParams&) const = default;
};

struct LstmLayerParams {
  int input_dim = 0;
  int hidden_dim = 0;
  GateParams input, forget, cell, output;

  bool operator==(const LstmLayerParams&) const = default;
};

struct DenseLayerParams {
  Matrix w;  // out_dim x in_dim
  Vector b;  // out_dim

  bool operator==(const DenseLayerParams&) const = default;
};

// encoder hidden sizes fix the whole stack: encoder walks input_dim down the
// list, the decoder mirrors it back up, and a dense layer maps the last
// decoder width back to input_dim
struct ModelShape {
  int input_dim = 0;
  std::vector<int> encoder_dims;

  // the standard stack: 122 -> 32 -> 16 -> 8 -> 8 -> 16 -> 32 -> 122
  static ModelShape standard() { return {122, {32, 16, 8}}; }

  int bottleneck_dim() const { return encoder_dims.back(); }

  bool operator==(const ModelShape&) const = default;
};

struct ModelParams {
  ModelShape shape;
  std::vector<LstmLayerParams> encoder;
  std::vector<LstmLayerParams> decoder;
  DenseLayerParams output;
  std::uint64_t seed = 0;

  bool operator==(const ModelParams&) const = default;
};

// gate weights uniform in (-1/sqrt(hidden_dim), +1/sqrt(hidden_dim)), forget
// biases 1.0, all other biases 0.0; deterministic per seed
ModelParams init_params(const ModelShape& shape, std::uint64_t seed);
ModelParams zero_params(const ModelShape& shape);
ModelParams zeros_like(const ModelParams& params);

std::size_t param_count(const ModelParams& params);

// every trainable tensor in one canonical order (encoder layers, then decoder
// layers, gates input/forget/cell/output with w_x, w_h, b each, then the dense
// w and b). Adam, serialization and the finite-difference tests all walk
// parameters through this list so they agree on ordering.
std::vector<std::vector<double>*> tensor_list(ModelParams& params);
std::vector<const std::vector<double>*> tensor_list(const ModelParams& params);

struct LstmState {
  Vector h, c;
};

// one step of the standard LSTM cell
LstmState lstm_cell(const Vector& x, const Vector& h_prev, const Vector& c_prev,
                    const LstmLayerParams& p);

// per-layer values recorded for backprop; sized lazily and reused across calls
struct LayerTrace {
  Vector x;                       // layer input
  Vector pre_i, pre_f, pre_g, pre_o;  // gate pre-activations
  Vector act_i, act_f, act_g, act_o;  // gate activations
  Vector c, tanh_c, h;
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;  // encoder layers then decoder layers
  Vector dense_pre;                // dense output before relu
  Vector x_hat;
  Vector z;
  // scratch used by the backward pass
  Vector d_h, d_gate, d_x;
};

struct ForwardResult {
  Vector x_hat;
  Vector z;  // bottleneck, encoder_dims.back() wide
};

ForwardResult forward(const Vector& x, const ModelParams& params);
ForwardResult forward(const Vector& x, const ModelParams& params, ForwardTrace& trace);

// d mse(x, forward(x)) / d params, exact reverse-mode through the trace.
// loss_scale multiplies the loss (and therefore every gradient component).
ModelParams gradients(const Vector& x, const ModelParams& params, double loss_scale = 1.0);

// fast path for the trainer: runs forward + backward with reusable workspace,
// accumulates into grads, returns the sample's mse
double gradients_accumulate(const Vector& x, const ModelParams& params, ForwardTrace& workspace,
                            ModelParams& grads, double loss_scale = 1.0);

}  // namespace netae

#include "netae/model.hpp"

#include <cmath>
#include <string>

#include "netae/errors.hpp"
#include "netae/rng.hpp"

namespace netae {

namespace {

void check_shape(const ModelShape& shape) {
  if (shape.input_dim < 1) throw DataError("model shape: input_dim must be >= 1");
  if (shape.encoder_dims.empty()) throw DataError("model shape: encoder_dims must be non-empty");
  for (int d : shape.encoder_dims) {
    if (d < 1) throw DataError("model shape: hidden dims must be >= 1");
  }
}

LstmLayerParams make_layer(int input_dim, int hidden_dim) {
  LstmLayerParams layer;
  layer.input_dim = input_dim;
  layer.hidden_dim = hidden_dim;
  for (GateParams* gate : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
    gate->w_x = Matrix(hidden_dim, input_dim);
    gate->w_h = Matrix(hidden_dim, hidden_dim);
    gate->b = Vector(static_cast<std::size_t>(hidden_dim), 0.0);
  }
  return layer;
}

ModelParams make_zero_model(const ModelShape& shape) {
  check_shape(shape);
  ModelParams p;
  p.shape = shape;
  int in = shape.input_dim;
  for (int hidden : shape.encoder_dims) {
    p.encoder.push_back(make_layer(in, hidden));
    in = hidden;
  }
  const auto& dims = shape.encoder_dims;
  const int k = static_cast<int>(dims.size());
  int dec_in = dims[static_cast<std::size_t>(k - 1)];
  for (int l = 0; l < k; ++l) {
    const int hidden = dims[static_cast<std::size_t>(k - 1 - l)];
    p.decoder.push_back(make_layer(dec_in, hidden));
    dec_in = hidden;
  }
  p.output.w = Matrix(shape.input_dim, dims[0]);
  p.output.b = Vector(static_cast<std::size_t>(shape.input_dim), 0.0);
  return p;
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (double& v : m.data) v = rng.next_in(-bound, bound);
}

// io[c] += sum_r m(r,c) * v[r]
void matvec_transpose_add(const Matrix& m, const Vector& v, Vector& io) {
  const double* row = m.data.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    const double vr = v[static_cast<std::size_t>(r)];
    for (int c = 0; c < m.cols; ++c) io[static_cast<std::size_t>(c)] += row[c] * vr;
  }
}

// dst(r,c) += u[r] * v[c]
void outer_add(Matrix& dst, const Vector& u, const Vector& v) {
  double* row = dst.data.data();
  for (int r = 0; r < dst.rows; ++r, row += dst.cols) {
    const double ur = u[static_cast<std::size_t>(r)];
    for (int c = 0; c < dst.cols; ++c) row[c] += ur * v[static_cast<std::size_t>(c)];
  }
}

void add_into(Vector& dst, const Vector& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
  ModelParams p = make_zero_model(shape);
  Rng rng(Rng::mix(seed, 0));
  auto init_lstm = [&rng](LstmLayerParams& layer) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.hidden_dim));
    for (GateParams* gate : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
      fill_uniform(gate->w_x, bound, rng);
      fill_uniform(gate->w_h, bound, rng);
    }
    // forget bias 1.0 stabilizes early training; other biases stay 0
    for (double& v : layer.forget.b) v = 1.0;
  };
  for (auto& layer : p.encoder) init_lstm(layer);
  for (auto& layer : p.decoder) init_lstm(layer);
  fill_uniform(p.output.w, 1.0 / std::sqrt(static_cast<double>(p.output.w.cols)), rng);
  // targets live in [0,1]; a small positive bias keeps every reconstruction
  // unit on the live side of the relu at the start of training
  for (double& b : p.output.b) b = 0.1;
  p.seed = seed;
  return p;
}

ModelParams zero_params(const ModelShape& shape) { return make_zero_model(shape); }

ModelParams zeros_like(const ModelParams& params) {
  ModelParams p = make_zero_model(params.shape);
  p.seed = params.seed;
  return p;
}

std::vector<std::vector<double>*> tensor_list(ModelParams& params) {
  std::vector<std::vector<double>*> out;
  auto add_layer = [&out](LstmLayerParams& layer) {
    for (GateParams* gate : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
      out.push_back(&gate->w_x.data);
      out.push_back(&gate->w_h.data);
      out.push_back(&gate->b);
    }
  };
  for (auto& layer : params.encoder) add_layer(layer);
  for (auto& layer : params.decoder) add_layer(layer);
  out.push_back(&params.output.w.data);
  out.push_back(&params.output.b);
  return out;
}

std::vector<const std::vector<double>*> tensor_list(const ModelParams& params) {
  auto mutable_list = tensor_list(const_cast<ModelParams&>(params));
  return {mutable_list.begin(), mutable_list.end()};
}

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto* t : tensor_list(params)) n += t->size();
  return n;
}

LstmState lstm_cell(const Vector& x, const Vector& h_prev, const Vector& c_prev,
                    const LstmLayerParams& p) {
  const auto hidden = static_cast<std::size_t>(p.hidden_dim);
  if (x.size() != static_cast<std::size_t>(p.input_dim) || h_prev.size() != hidden ||
      c_prev.size() != hidden) {
    throw DataError("lstm_cell: dimension mismatch");
  }
  auto gate_pre = [&](const GateParams& g) {
    Vector pre = matvec(g.w_x, x);
    matvec_add(g.w_h, h_prev, pre);
    add_into(pre, g.b);
    return pre;
  };
  const Vector i = elementwise(gate_pre(p.input), Activation::sigmoid);
  const Vector f = elementwise(gate_pre(p.forget), Activation::sigmoid);
  const Vector g = elementwise(gate_pre(p.cell), Activation::tanh);
  const Vector o = elementwise(gate_pre(p.output), Activation::sigmoid);
  LstmState state;
  state.c.resize(hidden);
  state.h.resize(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    state.c[j] = f[j] * c_prev[j] + i[j] * g[j];
    state.h[j] = o[j] * std::tanh(state.c[j]);
  }
  return state;
}

namespace {

// one zero-state step; each sample is a length-1 sequence so h_prev = c_prev = 0
// and the recurrent w_h products vanish
void layer_forward(const LstmLayerParams& p, const Vector& x, LayerTrace& t) {
  const auto hidden = static_cast<std::size_t>(p.hidden_dim);
  t.x = x;
  matvec_into(p.input.w_x, x, t.pre_i);
  matvec_into(p.forget.w_x, x, t.pre_f);
  matvec_into(p.cell.w_x, x, t.pre_g);
  matvec_into(p.output.w_x, x, t.pre_o);
  add_into(t.pre_i, p.input.b);
  add_into(t.pre_f, p.forget.b);
  add_into(t.pre_g, p.cell.b);
  add_into(t.pre_o, p.output.b);
  t.act_i.resize(hidden);
  t.act_f.resize(hidden);
  t.act_g.resize(hidden);
  t.act_o.resize(hidden);
  t.c.resize(hidden);
  t.tanh_c.resize(hidden);
  t.h.resize(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    t.act_i[j] = sigmoid(t.pre_i[j]);
    t.act_f[j] = sigmoid(t.pre_f[j]);
    t.act_g[j] = std::tanh(t.pre_g[j]);
    t.act_o[j] = sigmoid(t.pre_o[j]);
    t.c[j] = t.act_i[j] * t.act_g[j];
    t.tanh_c[j] = std::tanh(t.c[j]);
    t.h[j] = t.act_o[j] * t.tanh_c[j];
  }
}

}  // namespace

ForwardResult forward(const Vector& x, const ModelParams& params, ForwardTrace& trace) {
  if (x.size() != static_cast<std::size_t>(params.shape.input_dim)) {
    throw DataError("forward: input has " + std::to_string(x.size()) + " components, model wants " +
                    std::to_string(params.shape.input_dim));
  }
  const std::size_t n_layers = params.encoder.size() + params.decoder.size();
  trace.layers.resize(n_layers);
  const Vector* cur = &x;
  std::size_t idx = 0;
  for (const auto& layer : params.encoder) {
    layer_forward(layer, *cur, trace.layers[idx]);
    cur = &trace.layers[idx].h;
    ++idx;
  }
  trace.z = *cur;  // bottleneck feeds the decoder unchanged
  for (const auto& layer : params.decoder) {
    layer_forward(layer, *cur, trace.layers[idx]);
    cur = &trace.layers[idx].h;
    ++idx;
  }
  matvec_into(params.output.w, *cur, trace.dense_pre);
  add_into(trace.dense_pre, params.output.b);
  trace.x_hat.resize(trace.dense_pre.size());
  for (std::size_t j = 0; j < trace.dense_pre.size(); ++j) {
    trace.x_hat[j] = relu(trace.dense_pre[j]);
  }
  return {trace.x_hat, trace.z};
}

ForwardResult forward(const Vector& x, const ModelParams& params) {
  ForwardTrace trace;
  return forward(x, params, trace);
}

namespace {

// reverse one zero-state LSTM step: consumes d_h, accumulates parameter
// gradients, leaves d(layer input) in d_x. The forget gate only touches the
// zero initial cell state, so its gradient is structurally zero, as is every
// recurrent w_h gradient.
void layer_backward(const LstmLayerParams& p, const LayerTrace& t, const Vector& d_h,
                    LstmLayerParams& grads, Vector& d_gate, Vector& d_x) {
  const auto hidden = static_cast<std::size_t>(p.hidden_dim);
  d_x.assign(t.x.size(), 0.0);
  Vector& da = d_gate;
  da.resize(hidden);

  // output gate: h = o * tanh(c)
  for (std::size_t j = 0; j < hidden; ++j) {
    const double d_o = d_h[j] * t.tanh_c[j];
    da[j] = d_o * t.act_o[j] * (1.0 - t.act_o[j]);
  }
  outer_add(grads.output.w_x, da, t.x);
  add_into(grads.output.b, da);
  matvec_transpose_add(p.output.w_x, da, d_x);

  // input gate: c = i * g
  for (std::size_t j = 0; j < hidden; ++j) {
    const double d_c = d_h[j] * t.act_o[j] * (1.0 - t.tanh_c[j] * t.tanh_c[j]);
    da[j] = d_c * t.act_g[j] * t.act_i[j] * (1.0 - t.act_i[j]);
  }
  outer_add(grads.input.w_x, da, t.x);
  add_into(grads.input.b, da);
  matvec_transpose_add(p.input.w_x, da, d_x);

  // candidate: c = i * g
  for (std::size_t j = 0; j < hidden; ++j) {
    const double d_c = d_h[j] * t.act_o[j] * (1.0 - t.tanh_c[j] * t.tanh_c[j]);
    da[j] = d_c * t.act_i[j] * (1.0 - t.act_g[j] * t.act_g[j]);
  }
  outer_add(grads.cell.w_x, da, t.x);
  add_into(grads.cell.b, da);
  matvec_transpose_add(p.cell.w_x, da, d_x);
}

}  // namespace

double gradients_accumulate(const Vector& x, const ModelParams& params, ForwardTrace& trace,
                            ModelParams& grads, double loss_scale) {
  forward(x, params, trace);
  const auto dim = static_cast<std::size_t>(params.shape.input_dim);
  const double loss = mse(x, trace.x_hat);

  // dense layer under the mse loss; relu kills gradient where pre <= 0
  Vector& d_pre = trace.d_gate;
  d_pre.resize(dim);
  const double scale = loss_scale * 2.0 / static_cast<double>(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    d_pre[j] = trace.dense_pre[j] > 0.0 ? scale * (trace.x_hat[j] - x[j]) : 0.0;
  }
  const std::size_t last = trace.layers.size() - 1;
  outer_add(grads.output.w, d_pre, trace.layers[last].h);
  add_into(grads.output.b, d_pre);
  Vector& d_h = trace.d_h;
  d_h.assign(trace.layers[last].h.size(), 0.0);
  matvec_transpose_add(params.output.w, d_pre, d_h);

  // walk decoder then encoder layers backwards; d_x of one layer is d_h of
  // the one below
  const std::size_t n_enc = params.encoder.size();
  for (std::size_t l = trace.layers.size(); l-- > 0;) {
    const LstmLayerParams& layer =
        l < n_enc ? params.encoder[l] : params.decoder[l - n_enc];
    LstmLayerParams& layer_grads = l < n_enc ? grads.encoder[l] : grads.decoder[l - n_enc];
    layer_backward(layer, trace.layers[l], d_h, layer_grads, trace.d_gate, trace.d_x);
    // d_x of this layer is d_h of the one below; the decoder->encoder seam
    // needs no special case because the bottleneck feeds through unchanged
    std::swap(d_h, trace.d_x);
  }
  return loss;
}

ModelParams gradients(const Vector& x, const ModelParams& params, double loss_scale) {
  ModelParams grads = zeros_like(params);
  ForwardTrace trace;
  gradients_accumulate(x, params, trace, grads, loss_scale);
  return grads;
}

}  // namespace netae

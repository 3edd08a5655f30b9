#include "netae/trainer.hpp"

#include <cmath>
#include <future>
#include <numeric>
#include <string>
#include <thread>

#include "netae/errors.hpp"
#include "netae/rng.hpp"

namespace netae {

namespace {

// fixed chunk size for batch-gradient evaluation: partial sums are produced
// per chunk and reduced in chunk order, so the arithmetic never depends on
// how many threads actually ran
constexpr std::size_t kGradChunk = 16;

constexpr std::uint64_t kSplitStream = 11;
constexpr std::uint64_t kEpochStream = 101;

void zero_params(ModelParams& p) {
  for (auto* t : tensor_list(p)) std::fill(t->begin(), t->end(), 0.0);
}

void add_params(ModelParams& dst, const ModelParams& src) {
  auto d = tensor_list(dst);
  auto s = tensor_list(src);
  for (std::size_t k = 0; k < d.size(); ++k) {
    auto& dv = *d[k];
    const auto& sv = *s[k];
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += sv[i];
  }
}

void scale_params(ModelParams& p, double factor) {
  for (auto* t : tensor_list(p)) {
    for (double& v : *t) v *= factor;
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ChunkContext {
  ModelParams grads;
  ForwardTrace trace;
  double loss_sum = 0.0;
};

}  // namespace

AdamState AdamState::init(const ModelParams& params) {
  AdamState state;
  state.m = zeros_like(params);
  state.v = zeros_like(params);
  state.t = 0;
  return state;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& cfg) {
  auto p = tensor_list(params);
  auto g = tensor_list(grads);
  auto m = tensor_list(state.m);
  auto v = tensor_list(state.v);
  if (p.size() != g.size()) throw DataError("adam_step: gradient shape mismatch");
  state.t += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& pv = *p[k];
    const auto& gv = *g[k];
    auto& mv = *m[k];
    auto& vv = *v[k];
    if (pv.size() != gv.size()) throw DataError("adam_step: gradient shape mismatch");
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double grad = gv[i];
      mv[i] = b1 * mv[i] + (1.0 - b1) * grad;
      vv[i] = b2 * vv[i] + (1.0 - b2) * grad * grad;
      const double m_hat = mv[i] / bc1;
      const double v_hat = vv[i] / bc2;
      pv[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(Rng::mix(seed, kEpochStream + static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  return order;
}

TrainResult train(const std::vector<EncodedSample>& normal_samples, const TrainConfig& cfg,
                  const ModelShape& shape) {
  if (cfg.learning_rate <= 0.0) throw DataError("train: learning_rate must be > 0");
  if (cfg.batch_size < 1) throw DataError("train: batch_size must be >= 1");
  if (cfg.epochs < 1) throw DataError("train: epochs must be >= 1");
  if (cfg.validation_fraction <= 0.0 || cfg.validation_fraction >= 1.0) {
    throw DataError("train: validation_fraction must be in (0,1)");
  }
  const std::size_t n = normal_samples.size();
  if (n < 2 * static_cast<std::size_t>(cfg.batch_size)) {
    throw DataError("train: need at least 2*batch_size samples, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (normal_samples[i].cls != TrafficClass::Normal) {
      throw DataError("train: sample " + std::to_string(i) +
                      " is not Normal traffic; the model trains on normal data only");
    }
    if (normal_samples[i].features.size() != static_cast<std::size_t>(shape.input_dim)) {
      throw DataError("train: sample " + std::to_string(i) + " has wrong dimension");
    }
  }

  // hold the validation split out once; everything else trains
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  Rng split_rng(Rng::mix(cfg.seed, kSplitStream));
  split_rng.shuffle(indices);
  std::size_t val_count = static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(n));
  val_count = std::max<std::size_t>(1, std::min(val_count, n - 1));
  const std::vector<std::size_t> val_idx(indices.begin(), indices.begin() + static_cast<long>(val_count));
  const std::vector<std::size_t> train_idx(indices.begin() + static_cast<long>(val_count), indices.end());

  TrainResult result;
  result.params = init_params(shape, cfg.seed);
  AdamState adam = AdamState::init(result.params);

  const int threads = resolve_threads(cfg.threads);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t max_chunks = (batch + kGradChunk - 1) / kGradChunk;
  std::vector<ChunkContext> chunks(max_chunks);
  for (auto& c : chunks) c.grads = zeros_like(result.params);
  ModelParams batch_grads = zeros_like(result.params);
  ForwardTrace val_trace;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = epoch_order(train_idx.size(), cfg.seed, epoch);
    double epoch_loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t batch_n = std::min(batch, order.size() - start);
      const std::size_t n_chunks = (batch_n + kGradChunk - 1) / kGradChunk;

      auto run_chunk = [&](std::size_t ci) {
        ChunkContext& ctx = chunks[ci];
        zero_params(ctx.grads);
        ctx.loss_sum = 0.0;
        const std::size_t lo = start + ci * kGradChunk;
        const std::size_t hi = std::min(lo + kGradChunk, start + batch_n);
        for (std::size_t k = lo; k < hi; ++k) {
          const auto& sample = normal_samples[train_idx[order[k]]];
          ctx.loss_sum +=
              gradients_accumulate(sample.features, result.params, ctx.trace, ctx.grads);
        }
      };

      if (threads > 1 && n_chunks > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(n_chunks);
        for (std::size_t ci = 0; ci < n_chunks; ++ci) {
          futures.push_back(std::async(std::launch::async, run_chunk, ci));
        }
        for (auto& f : futures) f.get();
      } else {
        for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
      }

      zero_params(batch_grads);
      for (std::size_t ci = 0; ci < n_chunks; ++ci) {
        add_params(batch_grads, chunks[ci].grads);
        epoch_loss_sum += chunks[ci].loss_sum;
      }
      scale_params(batch_grads, 1.0 / static_cast<double>(batch_n));
      adam_step(result.params, batch_grads, adam, cfg);
      result.gradient_sample_evals += batch_n;
    }

    EpochLoss entry;
    entry.train_loss = epoch_loss_sum / static_cast<double>(train_idx.size());
    double val_sum = 0.0;
    for (std::size_t idx : val_idx) {
      const auto out = forward(normal_samples[idx].features, result.params, val_trace);
      val_sum += mse(normal_samples[idx].features, out.x_hat);
    }
    entry.validation_loss = val_sum / static_cast<double>(val_idx.size());
    if (!std::isfinite(entry.train_loss) || !std::isfinite(entry.validation_loss)) {
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1));
    }
    result.history.push_back(entry);
  }
  return result;
}

}  // namespace netae

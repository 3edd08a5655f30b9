#pragma once

#include <cstdint>
#include <vector>

#include "netae/dataset.hpp"
#include "netae/model.hpp"

namespace netae {

struct TrainConfig {
  double learning_rate = 0.0001;
  int batch_size = 32;
  int epochs = 100;
  double validation_fraction = 0.1;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // worker threads for batch gradients; 0 = hardware concurrency. Affects
  // speed only: chunked fixed-order reduction keeps results bit-identical.
  int threads = 0;
};

// first/second moment accumulators, shape-congruent with the model
struct AdamState {
  ModelParams m;
  ModelParams v;
  long t = 0;

  static AdamState init(const ModelParams& params);
};

struct EpochLoss {
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

using LossHistory = std::vector<EpochLoss>;

// standard Adam update with bias correction; t is incremented first so the
// corrections use t = 1 on the first step
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainResult {
  ModelParams params;
  LossHistory history;
  // per-sample gradient evaluations; validation samples never contribute
  std::uint64_t gradient_sample_evals = 0;
};

// normal-only training: any non-Normal sample is a contract violation. The
// validation split is held out once up front; epoch order depends only on
// (seed, epoch).
TrainResult train(const std::vector<EncodedSample>& normal_samples, const TrainConfig& cfg,
                  const ModelShape& shape = ModelShape::standard());

// deterministic epoch ordering, exposed for tests
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch);

}  // namespace netae

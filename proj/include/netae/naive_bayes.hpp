#pragma once

#include <array>
#include <vector>

#include "netae/dataset.hpp"
#include "netae/detector.hpp"

namespace netae {

// hybrid naive bayes over encoded features: Gaussian likelihood on the
// leading numeric columns, Bernoulli with add-1 smoothing on the one-hot
// columns. Binary classes, normal vs attack.
struct NaiveBayesModel {
  int numeric_dim = 0;
  double variance_floor = 1e-9;
  std::array<double, 2> prior{};                       // [normal, attack]
  std::array<std::vector<double>, 2> mean;             // numeric_dim each
  std::array<std::vector<double>, 2> variance;         // floored
  std::array<std::vector<double>, 2> bernoulli_rate;   // encoded_dim - numeric_dim each

  int encoded_dim() const {
    return numeric_dim + static_cast<int>(bernoulli_rate[0].size());
  }
};

NaiveBayesModel nb_train(const std::vector<EncodedSample>& samples,
                         int numeric_dim = kNumericFeatures, double variance_floor = 1e-9);

// log prior + log likelihood per class
std::array<double, 2> nb_log_posterior(const NaiveBayesModel& model, const EncodedSample& sample);

// argmax with deterministic tie-break to Normal
Binary nb_predict(const NaiveBayesModel& model, const EncodedSample& sample);

std::string nb_to_json(const NaiveBayesModel& model);
NaiveBayesModel nb_from_json(const std::string& text);

}  // namespace netae

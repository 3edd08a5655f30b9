#include "netae/naive_bayes.hpp"

#include <cmath>
#include <string>

#include "netae/errors.hpp"

#include "json.hpp"

namespace netae {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

NaiveBayesModel nb_train(const std::vector<EncodedSample>& samples, int numeric_dim,
                         double variance_floor) {
  if (samples.empty()) throw DataError("nb_train: no samples");
  const std::size_t dim = samples.front().features.size();
  if (numeric_dim < 0 || static_cast<std::size_t>(numeric_dim) > dim) {
    throw DataError("nb_train: numeric_dim out of range");
  }
  if (variance_floor <= 0.0) throw DataError("nb_train: variance floor must be > 0");
  const std::size_t bern_dim = dim - static_cast<std::size_t>(numeric_dim);

  std::array<std::uint64_t, 2> count{};
  std::array<std::vector<double>, 2> sum, sum_sq, ones;
  for (int c = 0; c < 2; ++c) {
    sum[c].assign(static_cast<std::size_t>(numeric_dim), 0.0);
    sum_sq[c].assign(static_cast<std::size_t>(numeric_dim), 0.0);
    ones[c].assign(bern_dim, 0.0);
  }
  for (const auto& s : samples) {
    if (s.features.size() != dim) throw DataError("nb_train: inconsistent feature length");
    const int c = is_attack(s.cls) ? 1 : 0;
    ++count[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < static_cast<std::size_t>(numeric_dim); ++j) {
      const double v = s.features[j];
      sum[static_cast<std::size_t>(c)][j] += v;
      sum_sq[static_cast<std::size_t>(c)][j] += v * v;
    }
    for (std::size_t j = 0; j < bern_dim; ++j) {
      if (s.features[static_cast<std::size_t>(numeric_dim) + j] > 0.5) {
        ones[static_cast<std::size_t>(c)][j] += 1.0;
      }
    }
  }
  if (count[0] == 0 || count[1] == 0) {
    throw DataError("nb_train: both classes must be present");
  }

  NaiveBayesModel model;
  model.numeric_dim = numeric_dim;
  model.variance_floor = variance_floor;
  const auto total = static_cast<double>(count[0] + count[1]);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto n = static_cast<double>(count[c]);
    model.prior[c] = n / total;
    model.mean[c].resize(static_cast<std::size_t>(numeric_dim));
    model.variance[c].resize(static_cast<std::size_t>(numeric_dim));
    for (std::size_t j = 0; j < static_cast<std::size_t>(numeric_dim); ++j) {
      const double mu = sum[c][j] / n;
      model.mean[c][j] = mu;
      const double var = std::max(sum_sq[c][j] / n - mu * mu, 0.0);
      model.variance[c][j] = std::max(var, variance_floor);
    }
    model.bernoulli_rate[c].resize(bern_dim);
    for (std::size_t j = 0; j < bern_dim; ++j) {
      // add-1 smoothing keeps every rate strictly inside (0,1)
      model.bernoulli_rate[c][j] = (ones[c][j] + 1.0) / (n + 2.0);
    }
  }
  return model;
}

std::array<double, 2> nb_log_posterior(const NaiveBayesModel& model, const EncodedSample& sample) {
  if (sample.features.size() != static_cast<std::size_t>(model.encoded_dim())) {
    throw DataError("nb_log_posterior: sample has " + std::to_string(sample.features.size()) +
                    " components, model wants " + std::to_string(model.encoded_dim()));
  }
  std::array<double, 2> log_post{};
  const auto numeric_dim = static_cast<std::size_t>(model.numeric_dim);
  for (std::size_t c = 0; c < 2; ++c) {
    double lp = std::log(model.prior[c]);
    for (std::size_t j = 0; j < numeric_dim; ++j) {
      const double var = model.variance[c][j];
      const double d = sample.features[j] - model.mean[c][j];
      lp += -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
    }
    for (std::size_t j = 0; j < model.bernoulli_rate[c].size(); ++j) {
      const double p = model.bernoulli_rate[c][j];
      const bool on = sample.features[numeric_dim + j] > 0.5;
      lp += std::log(on ? p : 1.0 - p);
    }
    log_post[c] = lp;
  }
  return log_post;
}

Binary nb_predict(const NaiveBayesModel& model, const EncodedSample& sample) {
  const auto lp = nb_log_posterior(model, sample);
  return lp[1] > lp[0] ? Binary::Attack : Binary::Normal;
}

std::string nb_to_json(const NaiveBayesModel& model) {
  nlohmann::json doc;
  doc["format"] = "netae.naive_bayes";
  doc["version"] = 1;
  doc["numeric_dim"] = model.numeric_dim;
  doc["variance_floor"] = model.variance_floor;
  doc["prior"] = {model.prior[0], model.prior[1]};
  const char* keys[2] = {"normal", "attack"};
  for (std::size_t c = 0; c < 2; ++c) {
    doc["mean"][keys[c]] = model.mean[c];
    doc["variance"][keys[c]] = model.variance[c];
    doc["bernoulli_rate"][keys[c]] = model.bernoulli_rate[c];
  }
  return doc.dump(2) + "\n";
}

NaiveBayesModel nb_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("naive bayes model: invalid json: ") + e.what());
  }
  if (doc.value("format", "") != "netae.naive_bayes" || doc.value("version", 0) != 1) {
    throw DataError("naive bayes model: unsupported format/version");
  }
  NaiveBayesModel model;
  model.numeric_dim = doc.at("numeric_dim").get<int>();
  model.variance_floor = doc.at("variance_floor").get<double>();
  model.prior[0] = doc.at("prior").at(0).get<double>();
  model.prior[1] = doc.at("prior").at(1).get<double>();
  const char* keys[2] = {"normal", "attack"};
  for (std::size_t c = 0; c < 2; ++c) {
    model.mean[c] = doc.at("mean").at(keys[c]).get<std::vector<double>>();
    model.variance[c] = doc.at("variance").at(keys[c]).get<std::vector<double>>();
    model.bernoulli_rate[c] = doc.at("bernoulli_rate").at(keys[c]).get<std::vector<double>>();
  }
  return model;
}

}  // namespace netae

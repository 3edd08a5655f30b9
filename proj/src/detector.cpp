#include "netae/detector.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <thread>

#include "netae/errors.hpp"

namespace netae {

double reconstruction_error(const ModelParams& model, const EncodedSample& sample) {
  if (sample.features.size() != static_cast<std::size_t>(model.shape.input_dim)) {
    throw DataError("reconstruction_error: sample has " + std::to_string(sample.features.size()) +
                    " components, model wants " + std::to_string(model.shape.input_dim));
  }
  const auto out = forward(sample.features, model);
  return mse(sample.features, out.x_hat);
}

std::vector<ErrorRecord> score_all(const ModelParams& model,
                                   const std::vector<EncodedSample>& samples, int threads) {
  std::vector<ErrorRecord> errors(samples.size());
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  auto score_range = [&](std::size_t lo, std::size_t hi) {
    ForwardTrace trace;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto out = forward(samples[i].features, model, trace);
      errors[i] = {mse(samples[i].features, out.x_hat), samples[i].cls};
    }
  };
  const std::size_t n = samples.size();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 256) {
    score_range(0, n);
    return errors;
  }
  std::vector<std::future<void>> futures;
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t lo = 0; lo < n; lo += step) {
    futures.push_back(std::async(std::launch::async, score_range, lo, std::min(lo + step, n)));
  }
  for (auto& f : futures) f.get();
  return errors;
}

SweepRow detection_rates_row(const std::vector<ErrorRecord>& errors, double threshold) {
  std::array<std::uint64_t, kClassCount> seen{};
  std::array<std::uint64_t, kClassCount> detected{};
  for (const auto& rec : errors) {
    const auto c = static_cast<std::size_t>(rec.cls);
    ++seen[c];
    // normal traffic is detected below (or at) the threshold, attacks above it
    const bool hit = rec.cls == TrafficClass::Normal ? rec.error <= threshold
                                                     : rec.error > threshold;
    if (hit) ++detected[c];
  }
  SweepRow row;
  row.threshold = threshold;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    row.present[c] = seen[c] > 0;
    row.rate[c] = seen[c] > 0 ? static_cast<double>(detected[c]) / static_cast<double>(seen[c]) : 0.0;
  }
  return row;
}

std::vector<SweepRow> sweep_thresholds(const std::vector<ErrorRecord>& errors,
                                       const std::vector<double>& grid) {
  if (errors.empty()) throw DataError("sweep_thresholds: no error records");
  if (grid.empty()) throw DataError("sweep_thresholds: empty threshold grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw DataError("sweep_thresholds: grid must be strictly increasing");
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double tau : grid) rows.push_back(detection_rates_row(errors, tau));
  return rows;
}

SelectionObjective objective_from_name(const std::string& name) {
  if (name == "balanced") return SelectionObjective::balanced;
  throw DataError("unknown selection objective: " + name);
}

const char* objective_name(SelectionObjective objective) {
  switch (objective) {
    case SelectionObjective::balanced: return "balanced";
  }
  return "?";
}

namespace {

double objective_score(const SweepRow& row, SelectionObjective objective) {
  switch (objective) {
    case SelectionObjective::balanced: {
      const auto normal_idx = static_cast<std::size_t>(TrafficClass::Normal);
      const double normal_rate = row.present[normal_idx] ? row.rate[normal_idx] : 0.0;
      double attack_sum = 0.0;
      int attack_classes = 0;
      for (std::size_t c = 0; c < kClassCount; ++c) {
        if (c == normal_idx || !row.present[c]) continue;
        attack_sum += row.rate[c];
        ++attack_classes;
      }
      const double attack_mean = attack_classes > 0 ? attack_sum / attack_classes : 0.0;
      return (normal_rate + attack_mean) / 2.0;
    }
  }
  return 0.0;
}

}  // namespace

double select_threshold(const std::vector<ErrorRecord>& train_errors,
                        const std::vector<double>& grid, SelectionObjective objective) {
  const auto rows = sweep_thresholds(train_errors, grid);
  double best_tau = rows.front().threshold;
  double best_score = objective_score(rows.front(), objective);
  for (const auto& row : rows) {
    const double score = objective_score(row, objective);
    if (score > best_score) {  // strict: ties keep the smallest threshold
      best_score = score;
      best_tau = row.threshold;
    }
  }
  return best_tau;
}

std::vector<double> default_grid(const std::vector<ErrorRecord>& errors, int points) {
  if (errors.empty()) throw DataError("default_grid: no error records");
  if (points < 1) throw DataError("default_grid: points must be >= 1");
  std::vector<double> sorted;
  sorted.reserve(errors.size());
  for (const auto& rec : errors) sorted.push_back(rec.error);
  std::sort(sorted.begin(), sorted.end());
  const double hi = sorted.back();
  double lo = sorted[static_cast<std::size_t>(0.01 * static_cast<double>(sorted.size() - 1))];
  if (lo <= 0.0) {
    // log spacing needs a positive start; fall back to the smallest positive error
    auto it = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    if (it == sorted.end()) return {hi};  // every error is zero
    lo = *it;
  }
  if (!(lo < hi) || points == 1) return {hi};
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points - 1);
    double tau = std::exp(log_lo + t * (log_hi - log_lo));
    if (k == 0) tau = lo;
    if (k == points - 1) tau = hi;
    if (grid.empty() || tau > grid.back()) grid.push_back(tau);
  }
  return grid;
}

ThresholdReport threshold_report(const std::vector<ErrorRecord>& train_errors,
                                 const std::vector<double>& grid, SelectionObjective objective) {
  ThresholdReport report;
  report.sweep = sweep_thresholds(train_errors, grid);
  report.threshold = select_threshold(train_errors, grid, objective);
  report.at_threshold = detection_rates_row(train_errors, report.threshold);
  return report;
}

}  // namespace netae

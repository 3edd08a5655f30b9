#pragma once

#include <array>
#include <string>
#include <vector>

#include "netae/dataset.hpp"
#include "netae/model.hpp"

namespace netae {

struct ErrorRecord {
  double error = 0.0;
  TrafficClass cls = TrafficClass::Normal;
};

// per-sample anomaly score: mse over the encoded components (the squared
// l2 norm divided by the vector length, which fixes the threshold scale)
double reconstruction_error(const ModelParams& model, const EncodedSample& sample);
std::vector<ErrorRecord> score_all(const ModelParams& model,
                                   const std::vector<EncodedSample>& samples, int threads = 0);

enum class Binary { Normal, Attack };

// error strictly greater than the threshold is an attack; ties are normal
inline Binary classify(double error, double threshold) {
  return error > threshold ? Binary::Attack : Binary::Normal;
}

// detection rate per class at one threshold: Normal counts error <= tau on
// its side, attack classes count error > tau. Classes absent from the input
// report rate 0 and present=false.
struct SweepRow {
  double threshold = 0.0;
  std::array<double, kClassCount> rate{};
  std::array<bool, kClassCount> present{};
};

SweepRow detection_rates_row(const std::vector<ErrorRecord>& errors, double threshold);

std::vector<SweepRow> sweep_thresholds(const std::vector<ErrorRecord>& errors,
                                       const std::vector<double>& grid);

enum class SelectionObjective {
  // (normal rate + mean attack-class rate) / 2 over the classes present
  balanced,
};

SelectionObjective objective_from_name(const std::string& name);
const char* objective_name(SelectionObjective objective);

// grid threshold maximizing the objective; deterministic tie-break to the
// smallest such threshold. Selection runs on training-split errors only.
double select_threshold(const std::vector<ErrorRecord>& train_errors,
                        const std::vector<double>& grid,
                        SelectionObjective objective = SelectionObjective::balanced);

// log-spaced grid between the 1st percentile and the max of the errors
std::vector<double> default_grid(const std::vector<ErrorRecord>& errors, int points = 512);

struct ThresholdReport {
  double threshold = 0.0;
  SweepRow at_threshold;
  std::vector<SweepRow> sweep;
};

ThresholdReport threshold_report(const std::vector<ErrorRecord>& train_errors,
                                 const std::vector<double>& grid,
                                 SelectionObjective objective = SelectionObjective::balanced);

}  // namespace netae

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "netae/dataset.hpp"
#include "netae/detector.hpp"

namespace netae {

// binary confusion counts with Attack as the positive class
struct BinaryConfusion {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

BinaryConfusion confusion(const std::vector<Binary>& predictions,
                          const std::vector<TrafficClass>& truth);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double accuracy = 0.0;
  // set when tp+fp or tp+fn is zero and the affected metrics defaulted to 0
  bool degenerate = false;
};

Metrics metrics(const BinaryConfusion& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // non-decreasing staircase from (0,0) to (1,1)
};

// thresholds swept over all distinct error values; requires at least one
// Normal and one Attack record
RocCurve roc_curve(const std::vector<ErrorRecord>& errors);

// trapezoidal area under the curve
double auc(const RocCurve& curve);

// same counting rule as the detector sweep, packaged for evaluation runs that
// start from a frozen model and threshold
std::array<double, kClassCount> detection_rates(const std::vector<ErrorRecord>& errors,
                                                double threshold);

}  // namespace netae

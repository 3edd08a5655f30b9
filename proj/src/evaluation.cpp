#include "netae/evaluation.hpp"

#include <algorithm>
#include <string>

#include "netae/errors.hpp"

namespace netae {

BinaryConfusion confusion(const std::vector<Binary>& predictions,
                          const std::vector<TrafficClass>& truth) {
  if (predictions.size() != truth.size()) {
    throw DataError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " truth labels");
  }
  BinaryConfusion cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool truth_attack = is_attack(truth[i]);
    const bool pred_attack = predictions[i] == Binary::Attack;
    if (truth_attack && pred_attack) ++cm.tp;
    else if (truth_attack && !pred_attack) ++cm.fn;
    else if (!truth_attack && pred_attack) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

Metrics metrics(const BinaryConfusion& cm) {
  if (cm.total() == 0) throw DataError("metrics: empty confusion matrix");
  Metrics m;
  if (cm.tp + cm.fp > 0) {
    m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  } else {
    m.degenerate = true;
  }
  if (cm.tp + cm.fn > 0) {
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  } else {
    m.degenerate = true;
  }
  if (m.precision + m.recall > 0.0) {
    m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.degenerate = true;
  }
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  return m;
}

RocCurve roc_curve(const std::vector<ErrorRecord>& errors) {
  std::uint64_t n_pos = 0;
  std::uint64_t n_neg = 0;
  std::vector<std::pair<double, bool>> scored;  // (error, is_attack)
  scored.reserve(errors.size());
  for (const auto& rec : errors) {
    const bool attack = is_attack(rec.cls);
    attack ? ++n_pos : ++n_neg;
    scored.emplace_back(rec.error, attack);
  }
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("roc_curve: need at least one Normal and one Attack record");
  }
  // sweep the threshold down through the distinct scores; records tied on a
  // score flip together, which matches the half-credit tie convention
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::size_t i = 0;
  while (i < scored.size()) {
    const double score = scored[i].first;
    for (; i < scored.size() && scored[i].first == score; ++i) {
      scored[i].second ? ++tp : ++fp;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

std::array<double, kClassCount> detection_rates(const std::vector<ErrorRecord>& errors,
                                                double threshold) {
  if (errors.empty()) throw DataError("detection_rates: no error records");
  return detection_rates_row(errors, threshold).rate;
}

}  // namespace netae

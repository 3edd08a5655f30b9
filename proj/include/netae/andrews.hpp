#pragma once

#include <cstdint>
#include <vector>

#include "netae/dataset.hpp"

namespace netae {

// one evaluated point of the Andrews curve
// f_x(t) = x1/sqrt(2) + x2 sin t + x3 cos t + x4 sin 2t + x5 cos 2t + ...
struct AndrewsSample {
  double t = 0.0;  // in [-pi, pi]
  double value = 0.0;
  TrafficClass cls = TrafficClass::Normal;
};

double andrews_value(const Vector& x, double t);

// evaluates the series at `resolution` equally spaced t in [-pi, pi] for a
// seeded subsample of at most max_rows records (all records when they fit)
std::vector<AndrewsSample> andrews_samples(const std::vector<EncodedSample>& samples,
                                           int resolution, int max_rows, std::uint64_t seed);

}  // namespace netae

#include "netae/andrews.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netae/errors.hpp"
#include "netae/rng.hpp"

namespace netae {

namespace {
constexpr std::uint64_t kSubsampleStream = 7001;
constexpr double kPi = 3.141592653589793;
}  // namespace

double andrews_value(const Vector& x, double t) {
  if (x.empty()) return 0.0;
  double f = x[0] / std::sqrt(2.0);
  for (std::size_t j = 1; j < x.size(); ++j) {
    const auto k = static_cast<double>((j + 1) / 2);
    f += x[j] * (j % 2 == 1 ? std::sin(k * t) : std::cos(k * t));
  }
  return f;
}

std::vector<AndrewsSample> andrews_samples(const std::vector<EncodedSample>& samples,
                                           int resolution, int max_rows, std::uint64_t seed) {
  if (resolution < 2) throw DataError("andrews_samples: resolution must be >= 2");
  if (max_rows < 1) throw DataError("andrews_samples: max_rows must be >= 1");

  std::vector<std::size_t> chosen(samples.size());
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  if (samples.size() > static_cast<std::size_t>(max_rows)) {
    Rng rng(Rng::mix(seed, kSubsampleStream));
    rng.shuffle(chosen);
    chosen.resize(static_cast<std::size_t>(max_rows));
    std::sort(chosen.begin(), chosen.end());  // keep input order among the kept rows
  }

  std::vector<AndrewsSample> out;
  out.reserve(chosen.size() * static_cast<std::size_t>(resolution));
  for (std::size_t idx : chosen) {
    for (int j = 0; j < resolution; ++j) {
      const double t =
          -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(resolution - 1);
      out.push_back({t, andrews_value(samples[idx].features, t), samples[idx].cls});
    }
  }
  return out;
}

}  // namespace netae

#include "cvmw/distribution.hpp"

#include <cmath>

#include "cvmw/errors.hpp"

namespace cvmw {

double checked_modes(double N) {
  if (!std::isfinite(N) || N < 0.5 || std::abs(2.0 * N - std::round(2.0 * N)) > 1e-12) {
    throw ValidationError("number of modes must be a half-integer >= 1/2");
  }
  return N;
}

WeightDistribution::WeightDistribution(double N, std::optional<RadialFunction> continuous,
                                       std::vector<DeltaMass> discrete, std::map<std::string, std::string> metadata)
    : N_(checked_modes(N)), continuous_(std::move(continuous)), discrete_(std::move(discrete)),
      metadata_(std::move(metadata)) {
  for (std::size_t i = 0; i < discrete_.size(); ++i) {
    const auto& d = discrete_[i];
    if (!(d.location >= 0.0) || !std::isfinite(d.location) || !std::isfinite(d.mass)) {
      throw ValidationError("delta masses need finite non-negative locations and finite masses");
    }
    if (i > 0 && !(d.location > discrete_[i - 1].location)) {
      throw ValidationError("delta locations must be strictly increasing");
    }
  }
}

double WeightDistribution::discrete_mass() const {
  double s = 0.0;
  for (const auto& d : discrete_) s += d.mass;
  return s;
}

WeightDistribution WeightDistribution::scaled(double c) const {
  std::optional<RadialFunction> cont;
  if (continuous_) cont = continuous_->scaled(c);
  std::vector<DeltaMass> disc = discrete_;
  for (auto& d : disc) d.mass *= c;
  return WeightDistribution(N_, cont, std::move(disc), metadata_);
}

WeightDistribution WeightDistribution::with_metadata(const std::string& key, const std::string& value) const {
  WeightDistribution copy = *this;
  copy.metadata_[key] = value;
  return copy;
}

}  // namespace cvmw

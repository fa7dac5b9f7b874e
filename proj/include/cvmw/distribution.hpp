#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvmw/radial.hpp"

namespace cvmw {

struct DeltaMass {
  double location;
  double mass;
};

// Radial weight distribution on N modes: an optional continuous density plus a
// comb of point masses (ideal lattice codes are pure combs).
class WeightDistribution {
 public:
  WeightDistribution(double N, std::optional<RadialFunction> continuous, std::vector<DeltaMass> discrete = {},
                     std::map<std::string, std::string> metadata = {});

  double N() const { return N_; }
  const std::optional<RadialFunction>& continuous() const { return continuous_; }
  std::span<const DeltaMass> discrete() const { return discrete_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  // Continuous density at r (zero when there is none).
  double density(double r) const { return continuous_ ? (*continuous_)(r) : 0.0; }
  double discrete_mass() const;

  WeightDistribution scaled(double c) const;
  WeightDistribution with_metadata(const std::string& key, const std::string& value) const;

 private:
  double N_;
  std::optional<RadialFunction> continuous_;
  std::vector<DeltaMass> discrete_;
  std::map<std::string, std::string> metadata_;
};

// Checks that N is a half-integer >= 1/2 and returns it.
double checked_modes(double N);

}  // namespace cvmw

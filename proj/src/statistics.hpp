// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "nulling.hpp"
#include "radiation.hpp"

namespace beamnull {

// Empirical CDF: values ascending, probabilities[i] = (i + 1) / n.
struct EmpiricalCdf {
  std::vector<double> values;
  std::vector<double> probabilities;

  // Smallest value whose cumulative probability reaches p (0 < p <= 1).
  double percentile(double p) const;
  double median() const { return percentile(0.5); }
};

EmpiricalCdf make_cdf(std::vector<double> samples);

// CDF of subset EIRP at one direction under the given reference.
EmpiricalCdf cdf_at(const PatternStack& stack, const PmSubset& subset,
                    double theta_deg, double phi_deg, Reference reference,
                    const RadiationPattern* mask = nullptr);

struct MedianCut {
  std::vector<double> angles_deg;
  std::vector<double> medians_db;
};

// Per-direction lower median of the subset along one grid cut. The fixed
// angle must lie on the grid.
MedianCut median_cut(const PatternStack& stack, const PmSubset& subset,
                     CutAxis axis, double fixed_angle_deg, Reference reference,
                     const RadiationPattern* mask = nullptr);

}  // namespace beamnull

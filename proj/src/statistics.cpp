// SPDX-License-Identifier: Apache-2.0
#include "statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace beamnull {

double EmpiricalCdf::percentile(double p) const {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("percentile probability outside (0, 1]");
  if (values.empty()) throw std::invalid_argument("percentile of an empty CDF");
  // probabilities[i] = (i + 1) / n; first index with probability >= p.
  const size_t n = values.size();
  const double scaled = p * static_cast<double>(n);
  size_t idx = static_cast<size_t>(std::ceil(scaled - 1e-12));
  if (idx == 0) idx = 1;
  if (idx > n) idx = n;
  return values[idx - 1];
}

EmpiricalCdf make_cdf(std::vector<double> samples) {
  if (samples.empty())
    throw EmptySetError("CDF of an empty sample set");
  std::sort(samples.begin(), samples.end());
  EmpiricalCdf cdf;
  cdf.probabilities.resize(samples.size());
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    cdf.probabilities[i] = static_cast<double>(i + 1) * inv;
  cdf.values = std::move(samples);
  return cdf;
}

EmpiricalCdf cdf_at(const PatternStack& stack, const PmSubset& subset,
                    double theta_deg, double phi_deg, Reference reference,
                    const RadiationPattern* mask) {
  if (subset.retained.empty())
    throw EmptySetError("CDF of an empty codeword subset");
  const auto values =
      relative_values_at(stack, theta_deg, phi_deg, reference, mask);
  std::vector<double> picked;
  picked.reserve(subset.retained.size());
  for (size_t pm : subset.retained) {
    if (pm >= values.size())
      throw std::invalid_argument("subset index outside the stack");
    picked.push_back(values[pm]);
  }
  return make_cdf(std::move(picked));
}

MedianCut median_cut(const PatternStack& stack, const PmSubset& subset,
                     CutAxis axis, double fixed_angle_deg, Reference reference,
                     const RadiationPattern* mask) {
  if (subset.retained.empty())
    throw EmptySetError("median cut of an empty codeword subset");
  const auto& grid = stack.grid();
  const size_t fixed_index = axis == CutAxis::Elevation
                                 ? grid.phi_index(fixed_angle_deg)
                                 : grid.theta_index(fixed_angle_deg);

  // Reference offsets: a scalar for GlobalMax, per-codeword peaks otherwise.
  double scalar_ref = 0.0;
  std::vector<PmSummary> sums;
  if (reference == Reference::GlobalMax)
    scalar_ref = stack.global_max_db(mask);
  else if (reference == Reference::PatternPeak)
    sums = stack.summaries(mask);

  const auto& angles = stack.cut_angles(axis);
  MedianCut out;
  out.angles_deg = angles;
  out.medians_db.resize(angles.size());

  // Gather the subset's cut rows once, then take the median per direction.
  std::vector<std::vector<double>> rows;
  rows.reserve(subset.retained.size());
  for (size_t pm : subset.retained) {
    if (pm >= stack.size())
      throw std::invalid_argument("subset index outside the stack");
    auto row = stack.cut_values(pm, axis, fixed_index, mask);
    const double off =
        reference == Reference::PatternPeak ? sums[pm].peak_db : scalar_ref;
    if (off != 0.0)
      for (double& v : row) v -= off;
    rows.push_back(std::move(row));
  }
  std::vector<double> column(rows.size());
  for (size_t a = 0; a < angles.size(); ++a) {
    for (size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][a];
    std::vector<double> tmp = column;
    const size_t k = (tmp.size() - 1) / 2;
    std::nth_element(tmp.begin(), tmp.begin() + k, tmp.end());
    out.medians_db[a] = tmp[k];
  }
  return out;
}

}  // namespace beamnull

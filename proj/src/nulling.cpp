// SPDX-License-Identifier: Apache-2.0
#include "nulling.hpp"

#include <algorithm>
#include <stdexcept>

#include "errors.hpp"

namespace beamnull {

namespace {

// Lower median: element (n-1)/2 of the sorted values.
double lower_median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  const size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

}  // namespace

std::vector<double> relative_values_at(const PatternStack& stack,
                                       double theta_deg, double phi_deg,
                                       Reference reference,
                                       const RadiationPattern* mask) {
  std::vector<double> values(stack.size());
  for (size_t pm = 0; pm < stack.size(); ++pm)
    values[pm] = stack.value_at(pm, theta_deg, phi_deg, mask);
  switch (reference) {
    case Reference::Absolute:
      break;
    case Reference::GlobalMax: {
      const double ref = stack.global_max_db(mask);
      for (double& v : values) v -= ref;
      break;
    }
    case Reference::PatternPeak: {
      const auto sums = stack.summaries(mask);
      for (size_t pm = 0; pm < values.size(); ++pm)
        values[pm] -= sums[pm].peak_db;
      break;
    }
  }
  return values;
}

PmSubset threshold_select(const PatternStack& stack, const NullRequest& req,
                          const RadiationPattern* mask) {
  const auto values = relative_values_at(stack, req.target_theta_deg,
                                         req.target_phi_deg, req.reference,
                                         mask);
  PmSubset subset;
  subset.universe = stack.size();
  for (size_t pm = 0; pm < values.size(); ++pm)
    if (values[pm] < req.epsilon_db) subset.retained.push_back(pm);
  subset.empty_warning = subset.retained.empty();
  return subset;
}

PmSubset hpbw_select(const PatternStack& stack, const NullRequest& req,
                     const RadiationPattern* mask) {
  const auto sums = stack.summaries(mask);
  PmSubset subset;
  subset.universe = stack.size();
  for (size_t pm = 0; pm < sums.size(); ++pm) {
    const auto& s = sums[pm];
    if (!s.hpbw.has_value()) {
      // No half-power box to test against; keep and count.
      subset.retained.push_back(pm);
      ++subset.undefined_hpbw;
      continue;
    }
    const bool theta_hit =
        req.target_theta_deg >= s.peak_theta_deg - 0.5 * s.hpbw->theta_width_deg &&
        req.target_theta_deg <= s.peak_theta_deg + 0.5 * s.hpbw->theta_width_deg;
    const bool phi_hit =
        req.target_phi_deg >= s.peak_phi_deg - 0.5 * s.hpbw->phi_width_deg &&
        req.target_phi_deg <= s.peak_phi_deg + 0.5 * s.hpbw->phi_width_deg;
    const bool keep = req.hpbw_logic == HpbwLogic::AndExclude
                          ? (!theta_hit && !phi_hit)
                          : (!theta_hit || !phi_hit);
    if (keep) subset.retained.push_back(pm);
  }
  subset.empty_warning = subset.retained.empty();
  return subset;
}

PmSubset select(const PatternStack& stack, const NullRequest& req,
                const RadiationPattern* mask) {
  return req.algorithm == NullAlgorithm::Threshold
             ? threshold_select(stack, req, mask)
             : hpbw_select(stack, req, mask);
}

PmSubset full_subset(const PatternStack& stack) {
  PmSubset subset;
  subset.universe = stack.size();
  subset.retained.resize(stack.size());
  for (size_t pm = 0; pm < stack.size(); ++pm) subset.retained[pm] = pm;
  return subset;
}

double subset_median_at(const PatternStack& stack, const PmSubset& subset,
                        double theta_deg, double phi_deg, Reference reference,
                        const RadiationPattern* mask) {
  if (subset.retained.empty())
    throw EmptySetError("median of an empty codeword subset");
  const auto values =
      relative_values_at(stack, theta_deg, phi_deg, reference, mask);
  std::vector<double> picked;
  picked.reserve(subset.retained.size());
  for (size_t pm : subset.retained) {
    if (pm >= values.size())
      throw std::invalid_argument("subset index outside the stack");
    picked.push_back(values[pm]);
  }
  return lower_median(std::move(picked));
}

}  // namespace beamnull

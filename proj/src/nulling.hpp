// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "radiation.hpp"

namespace beamnull {

enum class Reference {
  Absolute,     // dB values as synthesized
  PatternPeak,  // each codeword relative to its own (masked) peak
  GlobalMax     // relative to the strongest value across the stack
};

enum class NullAlgorithm { Threshold, Hpbw };

enum class HpbwLogic {
  // Keep a codeword when the protected direction is outside its azimuth
  // half-power interval AND outside its elevation interval; a hit on either
  // axis drops it.
  AndExclude,
  // Keep when the direction is outside at least one interval; only a hit on
  // both axes drops it.
  OrExclude
};

struct NullRequest {
  double target_theta_deg = 0.0;
  double target_phi_deg = 0.0;
  double epsilon_db = -5.0;  // threshold algorithm only
  NullAlgorithm algorithm = NullAlgorithm::Threshold;
  HpbwLogic hpbw_logic = HpbwLogic::AndExclude;
  Reference reference = Reference::GlobalMax;
};

struct PmSubset {
  std::vector<size_t> retained;  // ascending codeword indices
  size_t universe = 0;           // codewords considered
  bool empty_warning = false;
  size_t undefined_hpbw = 0;  // kept because their width was undefined

  double fraction() const {
    return universe == 0
               ? 0.0
               : static_cast<double>(retained.size()) / universe;
  }
};

// EIRP of every codeword at one direction, shifted by the reference.
std::vector<double> relative_values_at(const PatternStack& stack,
                                       double theta_deg, double phi_deg,
                                       Reference reference,
                                       const RadiationPattern* mask = nullptr);

// Keep codewords whose EIRP at the protected direction stays below
// epsilon_db under the request's reference.
PmSubset threshold_select(const PatternStack& stack, const NullRequest& req,
                          const RadiationPattern* mask = nullptr);

// Keep codewords whose half-power intervals miss the protected direction.
// Codewords with undefined width are kept and counted.
PmSubset hpbw_select(const PatternStack& stack, const NullRequest& req,
                     const RadiationPattern* mask = nullptr);

PmSubset select(const PatternStack& stack, const NullRequest& req,
                const RadiationPattern* mask = nullptr);

PmSubset full_subset(const PatternStack& stack);

// Lower median EIRP of the subset at one direction. Throws on an empty
// subset.
double subset_median_at(const PatternStack& stack, const PmSubset& subset,
                        double theta_deg, double phi_deg, Reference reference,
                        const RadiationPattern* mask = nullptr);

}  // namespace beamnull

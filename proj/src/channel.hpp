// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

namespace beamnull {

enum class ChannelModel { TdlC, Awgn };

// Power-delay profile. Delays are absolute seconds, powers are dB weights
// whose linear sum is normalized to one.
struct DelayProfile {
  std::vector<double> delays_s;
  std::vector<double> powers_db;

  size_t num_taps() const { return delays_s.size(); }
  std::vector<double> linear_powers() const;  // normalized to unit sum
};

// TDL-C profile (24 Rayleigh taps) scaled to the given RMS delay spread.
DelayProfile tdl_c_profile(double delay_spread_s);

// Single deterministic tap at zero delay; realizations are all-ones.
DelayProfile awgn_profile();

// Tapped-delay-line realization: one n_rx x n_tx matrix per tap.
struct ChannelRealization {
  std::vector<arma::cx_mat> taps;
  std::vector<double> delays_s;
};

// Draw i.i.d. complex Gaussian tap matrices with per-tap variance equal to
// the normalized tap power. The AWGN profile yields all-ones instead.
ChannelRealization realize(const DelayProfile& profile, ChannelModel model,
                           int n_rx, int n_tx, std::uint64_t seed);

// Frequency response on a uniform subcarrier grid centered on the carrier:
// slice k holds H(f_k), f_k = (k - (n-1)/2) * spacing.
arma::cx_cube frequency_response(const ChannelRealization& channel,
                                 int n_subcarriers, double spacing_hz);

}  // namespace beamnull

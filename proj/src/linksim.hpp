// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "channel.hpp"
#include "codebook.hpp"
#include "nulling.hpp"

namespace beamnull {

// Gray-labelled square QAM, unit average symbol energy. Bit order follows
// the NR mapping: even-indexed bits drive the in-phase axis, odd-indexed
// bits the quadrature axis, first bit of each axis the sign.
class QamModem {
 public:
  explicit QamModem(int order);  // 16, 64 or 256

  int order() const { return order_; }
  int bits_per_symbol() const { return bits_per_symbol_; }
  std::complex<double> map(const std::uint8_t* bits) const;
  void demap(std::complex<double> symbol, std::uint8_t* bits) const;

 private:
  int order_;
  int bits_per_symbol_;
  int levels_;   // per axis
  double scale_;  // 1/sqrt(2(M-1)/3)
  std::vector<std::uint8_t> axis_bits_;  // level index -> axis bit pattern
  std::vector<int> axis_value_;          // axis bit pattern -> odd level
};

// Unbiased MMSE equalizer: z = (H^H H + nv I)^{-1} H^H y, rescaled per layer
// by 1 - nv [(H^H H + nv I)^{-1}]_{ll} so hard decisions see an undistorted
// constellation. y: n_rx x n_sc, h_eff: n_rx x layers x n_sc.
arma::cx_mat mmse_equalize(const arma::cx_mat& y, const arma::cx_cube& h_eff,
                           double noise_var);

// Subcarrier-averaged Gram matrix H^H H of a frequency response.
arma::cx_mat mean_gram(const arma::cx_cube& h);

// Wideband eigenbeam precoder: the n_layers dominant eigenvectors of the
// averaged Gram, scaled to unit Frobenius norm. Throws when the channel
// cannot carry that many layers.
arma::cx_mat svd_precoder(const arma::cx_cube& h, int n_layers);
arma::cx_mat svd_precoder_gram(const arma::cx_mat& gram, int n_layers);

// Best codeword among the candidates by the post-MMSE sum rate on the
// averaged Gram; ties resolve to the earliest candidate.
size_t pmi_select(const arma::cx_cube& h, const Codebook& cb,
                  const std::vector<size_t>& candidates, double noise_var);
size_t pmi_select_gram(const arma::cx_mat& gram, const Codebook& cb,
                       const std::vector<size_t>& candidates,
                       double noise_var);

// Least-squares pilot estimate smoothed over the subcarrier grid: each
// subcarrier averages the per-pilot estimates within a small frequency
// window, so denser pilots reduce estimation noise.
// y_pilots: n_rx x n_tx x n_pilots observations of per-port pilot passes,
// pilot_symbols: n_tx x n_pilots, pilot_positions ascending subcarriers.
arma::cx_cube ls_estimate(const arma::cx_cube& y_pilots,
                          const arma::cx_mat& pilot_symbols,
                          const std::vector<int>& pilot_positions,
                          int n_subcarriers);

enum class PrecoderPolicy { Svd, PmiFull, PmiSubset };
enum class CsiMode { Perfect, Estimated };

struct LinkConfig {
  int modulation_order = 16;
  int n_layers = 2;
  int n_tx = 32;
  int n_rx = 4;
  int n_subcarriers = 624;
  double scs_hz = 30e3;
  ChannelModel channel_model = ChannelModel::TdlC;
  double delay_spread_s = 300e-9;
  PrecoderPolicy policy = PrecoderPolicy::PmiFull;
  CsiMode csi = CsiMode::Perfect;
  int pilot_spacing = 4;
  int n_drops = 100;
  std::uint64_t seed = 1;
  int threads = 0;

  void validate(const Codebook* cb, const PmSubset* subset) const;
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  double ber = 0.0;
};

// Monte-Carlo uncoded BER. cb is required for the PMI policies, subset for
// PmiSubset. Every drop derives its own seeds from (seed, drop index), so
// results do not depend on the thread count. When per_drop_ber is given it
// receives n_drops * n_snr values, drop-major.
std::vector<BerPoint> run_ber(const LinkConfig& cfg,
                              const std::vector<double>& snr_db,
                              const Codebook* cb, const PmSubset* subset,
                              std::vector<double>* per_drop_ber = nullptr);

}  // namespace beamnull

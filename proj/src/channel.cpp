// SPDX-License-Identifier: Apache-2.0
#include "channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rng.hpp"

namespace beamnull {

std::vector<double> DelayProfile::linear_powers() const {
  std::vector<double> lin(powers_db.size());
  double sum = 0.0;
  for (size_t i = 0; i < powers_db.size(); ++i) {
    lin[i] = std::pow(10.0, powers_db[i] / 10.0);
    sum += lin[i];
  }
  for (double& p : lin) p /= sum;
  return lin;
}

DelayProfile tdl_c_profile(double delay_spread_s) {
  if (!(delay_spread_s > 0.0))
    throw std::invalid_argument("delay spread must be positive");
  // Normalized delays and tap powers of the 24-tap TDL-C table.
  static constexpr double kNormDelay[24] = {
      0.0000, 0.2099, 0.2219, 0.2329, 0.2176, 0.6366, 0.6448, 0.6560,
      0.6584, 0.7935, 0.8213, 0.9336, 1.2285, 1.3083, 2.1704, 2.7105,
      4.2589, 4.6003, 5.4902, 5.6077, 6.3065, 6.6374, 7.0427, 8.6523};
  static constexpr double kPowerDb[24] = {
      -4.4,  -1.2,  -3.5,  -5.2,  -2.5,  0.0,   -2.2,  -3.9,
      -7.4,  -7.1,  -10.7, -11.1, -5.1,  -6.8,  -8.7,  -13.2,
      -13.9, -13.9, -13.3, -15.8, -15.7, -21.6, -16.7, -18.1};
  DelayProfile p;
  p.delays_s.resize(24);
  p.powers_db.assign(kPowerDb, kPowerDb + 24);
  for (int i = 0; i < 24; ++i) p.delays_s[i] = kNormDelay[i] * delay_spread_s;
  return p;
}

DelayProfile awgn_profile() {
  DelayProfile p;
  p.delays_s = {0.0};
  p.powers_db = {0.0};
  return p;
}

ChannelRealization realize(const DelayProfile& profile, ChannelModel model,
                           int n_rx, int n_tx, std::uint64_t seed) {
  if (n_rx < 1 || n_tx < 1)
    throw std::invalid_argument("antenna counts must be at least 1");
  if (profile.num_taps() == 0)
    throw std::invalid_argument("delay profile has no taps");
  ChannelRealization ch;
  ch.delays_s = profile.delays_s;
  ch.taps.reserve(profile.num_taps());
  if (model == ChannelModel::Awgn) {
    for (size_t t = 0; t < profile.num_taps(); ++t)
      ch.taps.emplace_back(arma::cx_mat(n_rx, n_tx, arma::fill::ones));
    return ch;
  }
  const auto powers = profile.linear_powers();
  GaussianSource g(seed);
  for (size_t t = 0; t < profile.num_taps(); ++t) {
    arma::cx_mat tap(n_rx, n_tx);
    const double s = std::sqrt(powers[t] / 2.0);
    // Fixed fill order (tap, rx, tx) pins the realization to the seed.
    for (int r = 0; r < n_rx; ++r)
      for (int c = 0; c < n_tx; ++c) {
        const double re = g(), im = g();
        tap(r, c) = std::complex<double>(s * re, s * im);
      }
    ch.taps.push_back(std::move(tap));
  }
  return ch;
}

arma::cx_cube frequency_response(const ChannelRealization& channel,
                                 int n_subcarriers, double spacing_hz) {
  if (n_subcarriers < 1)
    throw std::invalid_argument("subcarrier count must be at least 1");
  if (!(spacing_hz > 0.0))
    throw std::invalid_argument("subcarrier spacing must be positive");
  if (channel.taps.empty())
    throw std::invalid_argument("channel realization has no taps");
  const arma::uword n_rx = channel.taps.front().n_rows;
  const arma::uword n_tx = channel.taps.front().n_cols;
  arma::cx_cube h(n_rx, n_tx, static_cast<arma::uword>(n_subcarriers),
                  arma::fill::zeros);
  const double f0 = -0.5 * (n_subcarriers - 1) * spacing_hz;
  for (size_t t = 0; t < channel.taps.size(); ++t) {
    const double tau = channel.delays_s[t];
    const auto& tap = channel.taps[t];
    for (int k = 0; k < n_subcarriers; ++k) {
      const double f = f0 + k * spacing_hz;
      const std::complex<double> rot =
          std::polar(1.0, -2.0 * std::numbers::pi * f * tau);
      h.slice(static_cast<arma::uword>(k)) += rot * tap;
    }
  }
  return h;
}

}  // namespace beamnull

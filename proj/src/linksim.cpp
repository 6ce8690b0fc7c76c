// SPDX-License-Identifier: Apache-2.0
#include "linksim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"
#include "threading.hpp"

namespace beamnull {

namespace {

constexpr double kPi = std::numbers::pi;

int exact_log2(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return (1 << k) == v ? k : -1;
}

// Uniform bits from a seeded generator, consumed LSB-first per 64-bit word.
class BitSource {
 public:
  explicit BitSource(std::uint64_t seed) : gen_(seed) {}

  std::uint8_t next() {
    if (avail_ == 0) {
      word_ = gen_();
      avail_ = 64;
    }
    const std::uint8_t b = static_cast<std::uint8_t>(word_ & 1u);
    word_ >>= 1;
    --avail_;
    return b;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  int avail_ = 0;
};

// Equalizes one subcarrier. he is column-major n_rx x n_layers; the output
// is rescaled by the per-layer response 1 - nv [(M + nv I)^{-1}]_{ll} so a
// hard slicer sees the transmitted constellation without MMSE shrinkage.
void mmse_solve(const std::complex<double>* he, int n_rx, int n_layers,
                const std::complex<double>* y, double noise_var,
                std::complex<double>* out) {
  using cd = std::complex<double>;
  if (n_layers == 1) {
    double m = 0.0;
    cd b = 0.0;
    for (int r = 0; r < n_rx; ++r) {
      m += std::norm(he[r]);
      b += std::conj(he[r]) * y[r];
    }
    const double inv = 1.0 / (m + noise_var);
    const double gain = m * inv;
    const cd z = b * inv;
    out[0] = gain > 1e-300 ? z / gain : z;
    return;
  }
  if (n_layers == 2) {
    const cd* h0 = he;
    const cd* h1 = he + n_rx;
    double m00 = 0.0, m11 = 0.0;
    cd m01 = 0.0, b0 = 0.0, b1 = 0.0;
    for (int r = 0; r < n_rx; ++r) {
      m00 += std::norm(h0[r]);
      m11 += std::norm(h1[r]);
      m01 += std::conj(h0[r]) * h1[r];
      b0 += std::conj(h0[r]) * y[r];
      b1 += std::conj(h1[r]) * y[r];
    }
    const double a = m00 + noise_var;
    const double d = m11 + noise_var;
    const double det = a * d - std::norm(m01);
    const cd z0 = (d * b0 - m01 * b1) / det;
    const cd z1 = (a * b1 - std::conj(m01) * b0) / det;
    const double g0 = 1.0 - noise_var * d / det;
    const double g1 = 1.0 - noise_var * a / det;
    out[0] = g0 > 1e-300 ? z0 / g0 : z0;
    out[1] = g1 > 1e-300 ? z1 / g1 : z1;
    return;
  }
  arma::cx_mat h(const_cast<cd*>(he), n_rx, n_layers, false, true);
  arma::cx_vec yv(const_cast<cd*>(y), n_rx, false, true);
  arma::cx_mat a = h.t() * h;
  arma::cx_vec b = h.t() * yv;
  a.diag() += noise_var;
  arma::cx_mat ainv = arma::inv_sympd(a);
  arma::cx_vec z = ainv * b;
  for (int l = 0; l < n_layers; ++l) {
    const double g = 1.0 - noise_var * ainv(l, l).real();
    out[l] = g > 1e-300 ? z(l) / g : z(l);
  }
}

// Sum-rate scorer over a fixed candidate list. Codewords stack a DFT beam
// over both polarization halves, so every quadratic form w^H G w reduces to
// beam-pair terms v_a^H G_ij v_b over the four half-size blocks of G; the
// terms are shared across co-phase variants and computed once per call.
class PmiEvaluator {
 public:
  PmiEvaluator(const Codebook& cb, const std::vector<size_t>& candidates) {
    if (candidates.empty())
      throw std::invalid_argument("candidate set is empty");
    const CodebookConfig& cfg = cb.config();
    rank_ = cfg.rank;
    half_ = cfg.n1 * cfg.n2;
    col_scale2_ = 1.0 / (cfg.num_ports() * rank_);

    std::map<std::pair<int, int>, int> beam_index;
    std::vector<std::pair<int, int>> beams;
    auto beam_of = [&](const BeamId& b) {
      const auto key = std::make_pair(b.l, b.m);
      auto it = beam_index.find(key);
      if (it != beam_index.end()) return it->second;
      const int idx = static_cast<int>(beams.size());
      beam_index.emplace(key, idx);
      beams.push_back(key);
      return idx;
    };
    std::map<std::pair<int, int>, int> pair_index;
    auto pair_of = [&](int a, int b) {
      const auto key = std::make_pair(a, b);
      auto it = pair_index.find(key);
      if (it != pair_index.end()) return it->second;
      const int idx = static_cast<int>(pairs_.size());
      pair_index.emplace(key, idx);
      pairs_.push_back({a, b});
      return idx;
    };

    cands_.reserve(candidates.size());
    for (const size_t ci : candidates) {
      if (ci >= cb.size())
        throw std::invalid_argument("candidate index outside the codebook");
      const PrecodingMatrix& e = cb[ci];
      Cand c;
      c.index = ci;
      c.phase = std::polar(1.0, kPi * e.i2 / 2.0);
      const int a = beam_of(e.column_beam[0]);
      c.paa = pair_of(a, a);
      if (rank_ == 2) {
        const int b = beam_of(e.column_beam[1]);
        c.pbb = pair_of(b, b);
        c.pab = pair_of(a, b);
      }
      cands_.push_back(c);
    }

    v_.set_size(half_, beams.size());
    for (size_t j = 0; j < beams.size(); ++j) {
      const auto vb = dft_beam(cfg.n1, cfg.n2, cfg.oversampling_1(),
                               cfg.oversampling_2(), beams[j].first,
                               beams[j].second);
      for (int r = 0; r < half_; ++r) v_(r, j) = vb[r];
    }
  }

  size_t best(const arma::cx_mat& gram, double noise_var) const {
    using cd = std::complex<double>;
    if (gram.n_rows != gram.n_cols ||
        gram.n_rows != static_cast<arma::uword>(2 * half_))
      throw std::invalid_argument("gram size does not match the codebook");
    const int h = half_;
    const arma::cx_mat z11 = gram.submat(0, 0, h - 1, h - 1) * v_;
    const arma::cx_mat z12 = gram.submat(0, h, h - 1, 2 * h - 1) * v_;
    const arma::cx_mat z21 = gram.submat(h, 0, 2 * h - 1, h - 1) * v_;
    const arma::cx_mat z22 = gram.submat(h, h, 2 * h - 1, 2 * h - 1) * v_;

    const size_t np = pairs_.size();
    std::vector<cd> t11(np), t12(np), t21(np), t22(np);
    for (size_t p = 0; p < np; ++p) {
      const int a = pairs_[p][0];
      const int b = pairs_[p][1];
      t11[p] = arma::cdot(v_.col(a), z11.col(b));
      t12[p] = arma::cdot(v_.col(a), z12.col(b));
      t21[p] = arma::cdot(v_.col(a), z21.col(b));
      t22[p] = arma::cdot(v_.col(a), z22.col(b));
    }

    double best_metric = -1.0;
    size_t best_index = cands_.front().index;
    for (const Cand& c : cands_) {
      const cd ph = c.phase;
      const cd phc = std::conj(ph);
      double metric;
      if (rank_ == 1) {
        const double m = col_scale2_ * std::real(t11[c.paa] + ph * t12[c.paa] +
                                                 phc * t21[c.paa] + t22[c.paa]);
        metric = std::log2(1.0 + std::max(m, 0.0) / noise_var);
      } else {
        const double m00 =
            col_scale2_ * std::real(t11[c.paa] + ph * t12[c.paa] +
                                    phc * t21[c.paa] + t22[c.paa]);
        const double m11 =
            col_scale2_ * std::real(t11[c.pbb] - ph * t12[c.pbb] -
                                    phc * t21[c.pbb] + t22[c.pbb]);
        const cd m01 = col_scale2_ * (t11[c.pab] - ph * t12[c.pab] +
                                      phc * t21[c.pab] - t22[c.pab]);
        const double a = m00 + noise_var;
        const double d = m11 + noise_var;
        const double det = a * d - std::norm(m01);
        const double s0 = det / (noise_var * d) - 1.0;
        const double s1 = det / (noise_var * a) - 1.0;
        metric = std::log2(1.0 + std::max(s0, 0.0)) +
                 std::log2(1.0 + std::max(s1, 0.0));
      }
      if (metric > best_metric) {
        best_metric = metric;
        best_index = c.index;
      }
    }
    return best_index;
  }

 private:
  struct Cand {
    size_t index = 0;
    int paa = -1, pbb = -1, pab = -1;
    std::complex<double> phase;
  };

  int rank_ = 0;
  int half_ = 0;
  double col_scale2_ = 0.0;
  arma::cx_mat v_;
  std::vector<std::array<int, 2>> pairs_;
  std::vector<Cand> cands_;
};

// Per-port pilot passes: port p sends unit QPSK pilots on the pilot grid
// while the rest stay silent, the LS estimate is smoothed in between.
arma::cx_cube estimate_channel(const arma::cx_cube& h,
                               const std::vector<int>& pilot_pos,
                               double noise_var, std::uint64_t seed) {
  const int n_rx = static_cast<int>(h.n_rows);
  const int n_tx = static_cast<int>(h.n_cols);
  const int n_sc = static_cast<int>(h.n_slices);
  const size_t np = pilot_pos.size();
  arma::cx_cube yp(n_rx, n_tx, np);
  arma::cx_mat xp(n_tx, np);
  GaussianSource g(seed);
  const double nsd = std::sqrt(noise_var / 2.0);
  for (int p = 0; p < n_tx; ++p) {
    for (size_t j = 0; j < np; ++j) {
      const double ang =
          kPi / 4.0 * (2.0 * ((p + static_cast<int>(j)) % 4) + 1.0);
      const std::complex<double> x = std::polar(1.0, ang);
      xp(p, j) = x;
      for (int r = 0; r < n_rx; ++r)
        yp(r, p, j) = h(r, p, pilot_pos[j]) * x +
                      std::complex<double>(g() * nsd, g() * nsd);
    }
  }
  return ls_estimate(yp, xp, pilot_pos, n_sc);
}

}  // namespace

QamModem::QamModem(int order) : order_(order) {
  if (order != 16 && order != 64 && order != 256)
    throw std::invalid_argument("modulation order must be 16, 64 or 256");
  bits_per_symbol_ = exact_log2(order);
  const int k = bits_per_symbol_ / 2;
  levels_ = 1 << k;
  scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  axis_bits_.assign(levels_, 0);
  axis_value_.assign(levels_, 0);
  for (int combo = 0; combo < levels_; ++combo) {
    // Nested Gray construction; bit j of combo is axis bit c_j, c_0 the sign.
    int val = 1;
    for (int i = k - 1; i >= 1; --i)
      val = (1 << (k - i)) - (1 - 2 * ((combo >> i) & 1)) * val;
    val *= 1 - 2 * (combo & 1);
    axis_value_[combo] = val;
    axis_bits_[(val + levels_ - 1) / 2] = static_cast<std::uint8_t>(combo);
  }
}

std::complex<double> QamModem::map(const std::uint8_t* bits) const {
  const int k = bits_per_symbol_ / 2;
  int ci = 0, cq = 0;
  for (int j = 0; j < k; ++j) {
    ci |= (bits[2 * j] & 1) << j;
    cq |= (bits[2 * j + 1] & 1) << j;
  }
  return {axis_value_[ci] * scale_, axis_value_[cq] * scale_};
}

void QamModem::demap(std::complex<double> symbol, std::uint8_t* bits) const {
  const int k = bits_per_symbol_ / 2;
  const auto level = [this](double x) {
    const long li = std::lround((x / scale_ + levels_ - 1) / 2.0);
    return static_cast<int>(std::clamp<long>(li, 0, levels_ - 1));
  };
  const int ci = axis_bits_[level(symbol.real())];
  const int cq = axis_bits_[level(symbol.imag())];
  for (int j = 0; j < k; ++j) {
    bits[2 * j] = static_cast<std::uint8_t>((ci >> j) & 1);
    bits[2 * j + 1] = static_cast<std::uint8_t>((cq >> j) & 1);
  }
}

arma::cx_mat mmse_equalize(const arma::cx_mat& y, const arma::cx_cube& h_eff,
                           double noise_var) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument("noise variance must be positive");
  if (h_eff.n_rows != y.n_rows || h_eff.n_slices != y.n_cols)
    throw std::invalid_argument("equalizer dimensions disagree");
  const int n_rx = static_cast<int>(y.n_rows);
  const int layers = static_cast<int>(h_eff.n_cols);
  arma::cx_mat out(layers, y.n_cols);
  for (arma::uword k = 0; k < y.n_cols; ++k)
    mmse_solve(h_eff.slice(k).memptr(), n_rx, layers, y.colptr(k), noise_var,
               out.colptr(k));
  return out;
}

arma::cx_mat mean_gram(const arma::cx_cube& h) {
  if (h.n_slices == 0) throw std::invalid_argument("empty frequency response");
  arma::cx_mat g(h.n_cols, h.n_cols, arma::fill::zeros);
  for (arma::uword k = 0; k < h.n_slices; ++k)
    g += h.slice(k).t() * h.slice(k);
  return g / static_cast<double>(h.n_slices);
}

arma::cx_mat svd_precoder_gram(const arma::cx_mat& gram, int n_layers) {
  if (gram.n_rows != gram.n_cols || gram.n_rows == 0)
    throw std::invalid_argument("gram matrix must be square");
  if (n_layers < 1 || static_cast<arma::uword>(n_layers) > gram.n_rows)
    throw std::invalid_argument("layer count exceeds the port count");
  arma::vec vals;
  arma::cx_mat vecs;
  const arma::cx_mat sym = (gram + gram.t()) / 2.0;
  if (!arma::eig_sym(vals, vecs, sym))
    throw std::runtime_error("eigendecomposition failed");
  const arma::uword n = vals.n_elem;
  const double lmax = vals(n - 1);
  if (!(lmax > 0.0) || vals(n - n_layers) <= lmax * 1e-12)
    throw std::runtime_error("channel rank is below the layer count");
  arma::cx_mat w(gram.n_rows, n_layers);
  const double s = 1.0 / std::sqrt(static_cast<double>(n_layers));
  for (int l = 0; l < n_layers; ++l) w.col(l) = vecs.col(n - 1 - l) * s;
  return w;
}

arma::cx_mat svd_precoder(const arma::cx_cube& h, int n_layers) {
  return svd_precoder_gram(mean_gram(h), n_layers);
}

size_t pmi_select_gram(const arma::cx_mat& gram, const Codebook& cb,
                       const std::vector<size_t>& candidates,
                       double noise_var) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument("noise variance must be positive");
  return PmiEvaluator(cb, candidates).best(gram, noise_var);
}

size_t pmi_select(const arma::cx_cube& h, const Codebook& cb,
                  const std::vector<size_t>& candidates, double noise_var) {
  return pmi_select_gram(mean_gram(h), cb, candidates, noise_var);
}

arma::cx_cube ls_estimate(const arma::cx_cube& y_pilots,
                          const arma::cx_mat& pilot_symbols,
                          const std::vector<int>& pilot_positions,
                          int n_subcarriers) {
  const size_t np = pilot_positions.size();
  if (np == 0) throw std::invalid_argument("no pilot positions");
  if (y_pilots.n_slices != np || pilot_symbols.n_cols != np ||
      pilot_symbols.n_rows != y_pilots.n_cols)
    throw std::invalid_argument("pilot dimensions disagree");
  for (size_t j = 0; j < np; ++j) {
    if (pilot_positions[j] < 0 || pilot_positions[j] >= n_subcarriers)
      throw std::invalid_argument("pilot position outside the grid");
    if (j > 0 && pilot_positions[j] <= pilot_positions[j - 1])
      throw std::invalid_argument("pilot positions must ascend");
  }
  const int n_rx = static_cast<int>(y_pilots.n_rows);
  const int n_tx = static_cast<int>(y_pilots.n_cols);

  arma::cx_cube at_pilots(n_rx, n_tx, np);
  for (size_t j = 0; j < np; ++j) {
    for (int p = 0; p < n_tx; ++p) {
      const std::complex<double> x = pilot_symbols(p, j);
      const double e = std::norm(x);
      if (!(e > 0.0))
        throw std::invalid_argument("pilot symbols must be nonzero");
      for (int r = 0; r < n_rx; ++r)
        at_pilots(r, p, j) = y_pilots(r, p, j) * std::conj(x) / e;
    }
  }

  // Box average over pilots near each subcarrier. The 4-subcarrier radius
  // stays well inside the coherence bandwidth of the supported profiles, so
  // denser pilot grids average down more estimation noise with little bias.
  // The radius widens to the nearest pilot so the window is never empty.
  constexpr int kSmoothRadius = 4;
  arma::cx_cube out(n_rx, n_tx, n_subcarriers);
  for (int k = 0; k < n_subcarriers; ++k) {
    int nearest = n_subcarriers;
    for (size_t j = 0; j < np; ++j)
      nearest = std::min(nearest, std::abs(pilot_positions[j] - k));
    const int radius = std::max(kSmoothRadius, nearest);
    arma::cx_mat acc(n_rx, n_tx, arma::fill::zeros);
    int hits = 0;
    for (size_t j = 0; j < np; ++j) {
      if (std::abs(pilot_positions[j] - k) > radius) continue;
      acc += at_pilots.slice(j);
      ++hits;
    }
    out.slice(k) = acc / static_cast<double>(hits);
  }
  return out;
}

void LinkConfig::validate(const Codebook* cb, const PmSubset* subset) const {
  if (modulation_order != 16 && modulation_order != 64 &&
      modulation_order != 256)
    throw ConfigError("modulation_order must be 16, 64 or 256");
  if (n_tx < 1 || n_rx < 1)
    throw ConfigError("antenna counts must be positive");
  if (n_layers < 1 || n_layers > std::min(n_tx, n_rx))
    throw ConfigError("n_layers must lie in [1, min(n_tx, n_rx)]");
  if (n_subcarriers < 1)
    throw ConfigError("n_subcarriers must be positive");
  if (!(scs_hz > 0.0))
    throw ConfigError("subcarrier spacing must be positive");
  if (channel_model == ChannelModel::TdlC && !(delay_spread_s > 0.0))
    throw ConfigError("delay spread must be positive");
  if (csi == CsiMode::Estimated && pilot_spacing < 1)
    throw ConfigError("pilot spacing must be positive");
  if (n_drops < 1) throw ConfigError("n_drops must be positive");
  if (policy != PrecoderPolicy::Svd) {
    if (cb == nullptr)
      throw ConfigError("PMI policies require a codebook");
    if (cb->num_ports() != n_tx)
      throw ConfigError("codebook ports differ from n_tx");
    if (cb->rank() != n_layers)
      throw ConfigError("codebook rank differs from n_layers");
    if (policy == PrecoderPolicy::PmiSubset) {
      if (subset == nullptr || subset->retained.empty())
        throw ConfigError(
            "subset policy requires a non-empty subset");
      for (const size_t i : subset->retained)
        if (i >= cb->size())
          throw ConfigError("subset index outside the codebook");
    }
  }
}

std::vector<BerPoint> run_ber(const LinkConfig& cfg,
                              const std::vector<double>& snr_db,
                              const Codebook* cb, const PmSubset* subset,
                              std::vector<double>* per_drop_ber) {
  cfg.validate(cb, subset);
  if (snr_db.empty()) throw std::invalid_argument("SNR grid is empty");

  const size_t n_snr = snr_db.size();
  const size_t n_drops = static_cast<size_t>(cfg.n_drops);
  const QamModem modem(cfg.modulation_order);
  const int q = modem.bits_per_symbol();
  const int layers = cfg.n_layers;
  const int n_rx = cfg.n_rx;
  const int n_tx = cfg.n_tx;
  const int n_sc = cfg.n_subcarriers;
  const std::uint64_t bits_per_drop =
      static_cast<std::uint64_t>(n_sc) * layers * q;

  const DelayProfile profile = cfg.channel_model == ChannelModel::TdlC
                                   ? tdl_c_profile(cfg.delay_spread_s)
                                   : awgn_profile();

  std::vector<size_t> candidates;
  if (cfg.policy == PrecoderPolicy::PmiFull) {
    candidates.resize(cb->size());
    std::iota(candidates.begin(), candidates.end(), size_t{0});
  } else if (cfg.policy == PrecoderPolicy::PmiSubset) {
    candidates = subset->retained;
  }
  std::unique_ptr<PmiEvaluator> eval;
  if (!candidates.empty())
    eval = std::make_unique<PmiEvaluator>(*cb, candidates);

  std::vector<int> pilot_pos;
  if (cfg.csi == CsiMode::Estimated)
    for (int k = 0; k < n_sc; k += cfg.pilot_spacing) pilot_pos.push_back(k);

  std::vector<std::uint64_t> errors(n_drops * n_snr, 0);
  if (per_drop_ber) per_drop_ber->assign(n_drops * n_snr, 0.0);

  parallel_chunks(n_drops, cfg.threads, [&](size_t d_begin, size_t d_end) {
    std::vector<std::uint8_t> tx_bits(bits_per_drop);
    std::vector<std::uint8_t> rx_bits(q);
    arma::cx_mat symbols(layers, n_sc);
    std::vector<std::complex<double>> he(static_cast<size_t>(n_rx) * layers);
    std::vector<std::complex<double>> he_hat(he.size());
    std::vector<std::complex<double>> yv(n_rx), shat(layers);
    arma::cx_mat w(n_tx, layers);

    for (size_t d = d_begin; d < d_end; ++d) {
      const std::uint64_t base = split_seed(cfg.seed, d);
      const ChannelRealization drop_ch =
          realize(profile, cfg.channel_model, n_rx, n_tx, split_seed(base, 0));
      const arma::cx_cube h = frequency_response(drop_ch, n_sc, cfg.scs_hz);
      arma::cx_mat gram_true;
      bool have_gram_true = false;

      for (size_t si = 0; si < n_snr; ++si) {
        const double nv = std::pow(10.0, -snr_db[si] / 10.0);

        arma::cx_cube h_est;
        const arma::cx_cube* h_known = &h;
        const arma::cx_mat* gram = nullptr;
        arma::cx_mat gram_est;
        if (cfg.csi == CsiMode::Estimated) {
          h_est =
              estimate_channel(h, pilot_pos, nv, split_seed(base, 1000 + si));
          h_known = &h_est;
          gram_est = mean_gram(h_est);
          gram = &gram_est;
        } else {
          if (!have_gram_true) {
            gram_true = mean_gram(h);
            have_gram_true = true;
          }
          gram = &gram_true;
        }

        if (cfg.policy == PrecoderPolicy::Svd) {
          w = svd_precoder_gram(*gram, layers);
        } else {
          const PrecodingMatrix& e = (*cb)[eval->best(*gram, nv)];
          for (int l = 0; l < layers; ++l)
            for (int p = 0; p < n_tx; ++p) w(p, l) = e.at(p, l);
        }

        BitSource bits(split_seed(base, 2000 + si));
        for (std::uint64_t i = 0; i < bits_per_drop; ++i)
          tx_bits[i] = bits.next();
        size_t bit_idx = 0;
        for (int k = 0; k < n_sc; ++k)
          for (int l = 0; l < layers; ++l) {
            symbols(l, k) = modem.map(&tx_bits[bit_idx]);
            bit_idx += q;
          }

        GaussianSource noise(split_seed(base, 2 + si));
        const double nsd = std::sqrt(nv / 2.0);
        std::uint64_t nerr = 0;
        bit_idx = 0;
        for (int k = 0; k < n_sc; ++k) {
          const arma::cx_mat& hk = h.slice(k);
          for (int l = 0; l < layers; ++l) {
            std::complex<double>* hcol = &he[static_cast<size_t>(l) * n_rx];
            for (int r = 0; r < n_rx; ++r) hcol[r] = 0.0;
            for (int t = 0; t < n_tx; ++t) {
              const std::complex<double> wv = w(t, l);
              const std::complex<double>* hc = hk.colptr(t);
              for (int r = 0; r < n_rx; ++r) hcol[r] += hc[r] * wv;
            }
          }
          const std::complex<double>* he_used = he.data();
          if (cfg.csi == CsiMode::Estimated) {
            const arma::cx_mat& hhk = h_known->slice(k);
            for (int l = 0; l < layers; ++l) {
              std::complex<double>* hcol =
                  &he_hat[static_cast<size_t>(l) * n_rx];
              for (int r = 0; r < n_rx; ++r) hcol[r] = 0.0;
              for (int t = 0; t < n_tx; ++t) {
                const std::complex<double> wv = w(t, l);
                const std::complex<double>* hc = hhk.colptr(t);
                for (int r = 0; r < n_rx; ++r) hcol[r] += hc[r] * wv;
              }
            }
            he_used = he_hat.data();
          }

          for (int r = 0; r < n_rx; ++r) {
            std::complex<double> acc = 0.0;
            for (int l = 0; l < layers; ++l)
              acc += he[static_cast<size_t>(l) * n_rx + r] * symbols(l, k);
            const double nre = noise() * nsd;
            const double nim = noise() * nsd;
            yv[r] = acc + std::complex<double>(nre, nim);
          }

          mmse_solve(he_used, n_rx, layers, yv.data(), nv, shat.data());
          for (int l = 0; l < layers; ++l) {
            modem.demap(shat[l], rx_bits.data());
            for (int j = 0; j < q; ++j)
              nerr += static_cast<std::uint64_t>(rx_bits[j] ^
                                                 tx_bits[bit_idx + j]);
            bit_idx += q;
          }
        }

        errors[d * n_snr + si] = nerr;
        if (per_drop_ber)
          (*per_drop_ber)[d * n_snr + si] =
              static_cast<double>(nerr) / static_cast<double>(bits_per_drop);
      }
    }
  });

  std::vector<BerPoint> out(n_snr);
  for (size_t si = 0; si < n_snr; ++si) {
    BerPoint p;
    p.snr_db = snr_db[si];
    for (size_t d = 0; d < n_drops; ++d) p.bit_errors += errors[d * n_snr + si];
    p.bits_total = bits_per_drop * n_drops;
    p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_total);
    out[si] = p;
  }
  return out;
}

}  // namespace beamnull

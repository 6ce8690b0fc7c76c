// SPDX-License-Identifier: Apache-2.0
#include "codebook.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "errors.hpp"

namespace beamnull {

void CodebookConfig::validate() const {
  if (n1 < 1 || n2 < 1)
    throw ConfigError("codebook port counts must be at least 1");
  if (rank != 1 && rank != 2)
    throw ConfigError("codebook rank must be 1 or 2");
  if (num_ports() < 2 * rank)
    throw ConfigError("too few ports for the requested rank");
}

std::vector<std::complex<double>> dft_beam(int n1, int n2, int o1, int o2,
                                           int l, int m) {
  if (n1 < 1 || n2 < 1 || o1 < 1 || o2 < 1)
    throw std::invalid_argument("beam dimensions must be at least 1");
  if (l < 0 || l >= n1 * o1 || m < 0 || m >= n2 * o2)
    throw std::invalid_argument("beam index outside the oversampled grid");
  std::vector<std::complex<double>> v(static_cast<size_t>(n1) * n2);
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) {
      const double phase =
          2.0 * std::numbers::pi *
          (static_cast<double>(l) * a / (o1 * n1) +
           static_cast<double>(m) * b / (o2 * n2));
      v[static_cast<size_t>(a) * n2 + b] = std::polar(1.0, phase);
    }
  }
  return v;
}

std::vector<std::pair<int, int>> Codebook::rank2_offsets(int n1, int n2,
                                                         int o1, int o2) {
  // Beam-pair spacings from the rank-2 single-panel tables.
  if (n1 == 1 && n2 == 1) return {{0, 0}};
  if (n2 == 1) {
    if (n1 == 2) return {{0, 0}, {o1, 0}};
    return {{0, 0}, {o1, 0}, {2 * o1, 0}, {3 * o1, 0}};
  }
  if (n1 == n2) return {{0, 0}, {o1, 0}, {0, o2}, {o1, o2}};
  if (n1 > n2) return {{0, 0}, {o1, 0}, {0, o2}, {2 * o1, 0}};
  throw UnsupportedError("rank-2 codebook requires n1 >= n2");
}

Codebook::Codebook(const CodebookConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n1 = cfg_.n1, n2 = cfg_.n2;
  const int o1 = cfg_.oversampling_1(), o2 = cfg_.oversampling_2();
  const int ports = cfg_.num_ports();
  const int half = ports / 2;
  const int rank = cfg_.rank;
  const int num_i2 = rank == 1 ? 4 : 2;
  const auto offsets =
      rank == 2 ? rank2_offsets(n1, n2, o1, o2)
                : std::vector<std::pair<int, int>>{{0, 0}};
  const double scale = 1.0 / std::sqrt(static_cast<double>(ports * rank));

  entries_.reserve(static_cast<size_t>(n1 * o1) * (n2 * o2) * offsets.size() *
                   num_i2);
  for (int i11 = 0; i11 < n1 * o1; ++i11) {
    for (int i12 = 0; i12 < n2 * o2; ++i12) {
      const auto v = dft_beam(n1, n2, o1, o2, i11, i12);
      for (int i13 = 0; i13 < static_cast<int>(offsets.size()); ++i13) {
        const int l2 = (i11 + offsets[i13].first) % (n1 * o1);
        const int m2 = (i12 + offsets[i13].second) % (n2 * o2);
        const auto v2 = dft_beam(n1, n2, o1, o2, l2, m2);
        for (int i2 = 0; i2 < num_i2; ++i2) {
          // Co-phasing between the polarizations: phi = exp(j pi i2 / 2).
          const std::complex<double> phi =
              std::polar(1.0, std::numbers::pi * i2 / 2.0);
          PrecodingMatrix pm;
          pm.i11 = i11;
          pm.i12 = i12;
          pm.i13 = i13;
          pm.i2 = i2;
          pm.ports = ports;
          pm.rank = rank;
          pm.column_beam[0] = BeamId{i11, i12};
          pm.w.resize(static_cast<size_t>(ports) * rank);
          for (int p = 0; p < half; ++p) {
            pm.w[p] = scale * v[p];
            pm.w[half + p] = scale * phi * v[p];
          }
          if (rank == 2) {
            pm.column_beam[1] = BeamId{l2, m2};
            for (int p = 0; p < half; ++p) {
              pm.w[ports + p] = scale * v2[p];
              pm.w[ports + half + p] = -scale * phi * v2[p];
            }
          }
          entries_.push_back(std::move(pm));
        }
      }
    }
  }
}

}  // namespace beamnull

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace beamnull {

// Type I single-panel codebook parameters for a dual-polarized port layout
// with n1 ports per polarization horizontally and n2 vertically.
struct CodebookConfig {
  int n1 = 4;
  int n2 = 4;
  int o1 = 0;  // <= 0 selects the standard default: 4 when n > 1, else 1
  int o2 = 0;
  int rank = 2;

  int oversampling_1() const { return o1 > 0 ? o1 : (n1 > 1 ? 4 : 1); }
  int oversampling_2() const { return o2 > 0 ? o2 : (n2 > 1 ? 4 : 1); }
  int num_ports() const { return 2 * n1 * n2; }
  void validate() const;
};

// Oversampled 2D DFT beam v_{l,m} of length n1*n2: entry (a*n2 + b) has
// phase 2pi (l*a/(o1*n1) + m*b/(o2*n2)).
std::vector<std::complex<double>> dft_beam(int n1, int n2, int o1, int o2,
                                           int l, int m);

struct BeamId {
  int l = 0;
  int m = 0;
};

// One codeword: ports x rank, column-major, unit Frobenius norm.
struct PrecodingMatrix {
  int i11 = 0, i12 = 0, i13 = 0, i2 = 0;
  int ports = 0;
  int rank = 0;
  std::vector<std::complex<double>> w;
  BeamId column_beam[2];  // DFT beam of each column, [rank] entries valid

  std::complex<double> at(int port, int layer) const {
    return w[static_cast<size_t>(layer) * ports + port];
  }
};

class Codebook {
 public:
  explicit Codebook(const CodebookConfig& cfg);

  const CodebookConfig& config() const { return cfg_; }
  size_t size() const { return entries_.size(); }
  int num_ports() const { return cfg_.num_ports(); }
  int rank() const { return cfg_.rank; }
  const PrecodingMatrix& operator[](size_t i) const { return entries_[i]; }
  const std::vector<PrecodingMatrix>& entries() const { return entries_; }

  // Beam-pair offsets (k1, k2) indexed by i13 for rank 2.
  static std::vector<std::pair<int, int>> rank2_offsets(int n1, int n2, int o1,
                                                        int o2);

 private:
  CodebookConfig cfg_;
  std::vector<PrecodingMatrix> entries_;
};

}  // namespace beamnull

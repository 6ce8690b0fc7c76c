// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "codebook.hpp"
#include "doctest.h"
#include "errors.hpp"

using namespace beamnull;

namespace {

Codebook make(int n1, int n2, int rank) {
  CodebookConfig cfg;
  cfg.n1 = n1;
  cfg.n2 = n2;
  cfg.rank = rank;
  return Codebook(cfg);
}

double frobenius(const PrecodingMatrix& pm) {
  double s = 0.0;
  for (const auto& c : pm.w) s += std::norm(c);
  return std::sqrt(s);
}

std::complex<double> column_dot(const PrecodingMatrix& pm) {
  std::complex<double> s = 0.0;
  for (int p = 0; p < pm.ports; ++p) s += std::conj(pm.at(p, 0)) * pm.at(p, 1);
  return s;
}

}  // namespace

TEST_CASE("codebook cardinality") {
  CHECK(make(4, 4, 2).size() == 2048);
  CHECK(make(2, 2, 2).size() == 512);
  CHECK(make(4, 4, 1).size() == 1024);
  CHECK(make(2, 2, 1).size() == 256);
}

TEST_CASE("cardinality follows the index ranges for generic shapes") {
  struct Shape {
    int n1, n2, rank;
  };
  for (const Shape s : {Shape{2, 1, 2}, Shape{4, 1, 2}, Shape{4, 2, 2},
                        Shape{3, 2, 2}, Shape{1, 1, 1}, Shape{4, 1, 1},
                        Shape{8, 1, 2}, Shape{3, 3, 2}}) {
    CodebookConfig cfg;
    cfg.n1 = s.n1;
    cfg.n2 = s.n2;
    cfg.rank = s.rank;
    const Codebook cb(cfg);
    const size_t beams = static_cast<size_t>(cfg.oversampling_1()) * s.n1 *
                         cfg.oversampling_2() * s.n2;
    const size_t pairs =
        s.rank == 2 ? Codebook::rank2_offsets(s.n1, s.n2, cfg.oversampling_1(),
                                              cfg.oversampling_2())
                          .size()
                    : 1;
    const size_t cophases = s.rank == 1 ? 4 : 2;
    CHECK(cb.size() == beams * pairs * cophases);
    CHECK(cb.num_ports() == 2 * s.n1 * s.n2);
  }
}

TEST_CASE("oversampling defaults collapse for singleton axes") {
  CodebookConfig cfg;
  cfg.n1 = 4;
  cfg.n2 = 1;
  CHECK(cfg.oversampling_1() == 4);
  CHECK(cfg.oversampling_2() == 1);
  cfg.o1 = 2;
  CHECK(cfg.oversampling_1() == 2);
}

TEST_CASE("every codeword has unit Frobenius norm") {
  for (const Codebook& cb : {make(4, 4, 2), make(2, 2, 1), make(4, 2, 2)}) {
    for (size_t i = 0; i < cb.size(); ++i)
      CHECK(std::abs(frobenius(cb[i]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("rank-2 columns are exactly orthogonal") {
  const Codebook cb = make(4, 4, 2);
  for (size_t i = 0; i < cb.size(); ++i)
    CHECK(std::abs(column_dot(cb[i])) <= 1e-12);
}

TEST_CASE("codewords are pairwise distinct") {
  const Codebook cb = make(2, 2, 2);
  double min_dist = 1e300;
  for (size_t i = 0; i < cb.size(); ++i) {
    for (size_t j = i + 1; j < cb.size(); ++j) {
      double d = 0.0;
      for (size_t k = 0; k < cb[i].w.size(); ++k)
        d += std::norm(cb[i].w[k] - cb[j].w[k]);
      min_dist = std::min(min_dist, d);
    }
  }
  CHECK(min_dist > 1e-12);
}

TEST_CASE("index tuples are lexicographically ordered and complete") {
  const Codebook cb = make(2, 2, 2);
  for (size_t i = 1; i < cb.size(); ++i) {
    const auto& a = cb[i - 1];
    const auto& b = cb[i];
    const auto ta = std::array<int, 4>{a.i11, a.i12, a.i13, a.i2};
    const auto tb = std::array<int, 4>{b.i11, b.i12, b.i13, b.i2};
    CHECK(ta < tb);
  }
  CHECK(cb[0].i11 == 0);
  CHECK(cb[cb.size() - 1].i11 == 7);
  CHECK(cb[cb.size() - 1].i2 == 1);
}

TEST_CASE("dft beam structure: modulus, separability, first entry") {
  const auto v = dft_beam(4, 4, 4, 4, 5, 9);
  REQUIRE(v.size() == 16);
  CHECK(std::abs(v[0] - 1.0) <= 1e-15);
  for (const auto& c : v) CHECK(std::abs(std::abs(c) - 1.0) <= 1e-15);
  const auto row = dft_beam(4, 1, 4, 1, 5, 0);   // horizontal factor
  const auto col = dft_beam(1, 4, 1, 4, 0, 9);   // vertical factor
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(std::abs(v[a * 4 + b] - row[a] * col[b]) <= 1e-12);
}

TEST_CASE("dft beam entries match the phase formula") {
  const int n1 = 3, n2 = 2, o1 = 4, o2 = 2, l = 7, m = 3;
  const auto v = dft_beam(n1, n2, o1, o2, l, m);
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) {
      const double phase = 2.0 * std::numbers::pi *
                           (double(l) * a / (o1 * n1) + double(m) * b / (o2 * n2));
      CHECK(std::abs(v[a * n2 + b] - std::polar(1.0, phase)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(dft_beam(4, 4, 4, 4, 16, 0), std::invalid_argument);
  CHECK_THROWS_AS(dft_beam(4, 4, 4, 4, 0, -1), std::invalid_argument);
  CHECK_THROWS_AS(dft_beam(0, 4, 4, 4, 0, 0), std::invalid_argument);
}

TEST_CASE("beam-pair offset tables") {
  using Offsets = std::vector<std::pair<int, int>>;
  CHECK(Codebook::rank2_offsets(1, 1, 1, 1) == Offsets{{0, 0}});
  CHECK(Codebook::rank2_offsets(2, 1, 4, 1) == Offsets{{0, 0}, {4, 0}});
  CHECK(Codebook::rank2_offsets(4, 1, 4, 1) ==
        Offsets{{0, 0}, {4, 0}, {8, 0}, {12, 0}});
  CHECK(Codebook::rank2_offsets(2, 2, 4, 4) ==
        Offsets{{0, 0}, {4, 0}, {0, 4}, {4, 4}});
  CHECK(Codebook::rank2_offsets(4, 4, 4, 4) ==
        Offsets{{0, 0}, {4, 0}, {0, 4}, {4, 4}});
  CHECK(Codebook::rank2_offsets(4, 2, 4, 4) ==
        Offsets{{0, 0}, {4, 0}, {0, 4}, {8, 0}});
  CHECK_THROWS_AS(Codebook::rank2_offsets(2, 4, 4, 4), UnsupportedError);
}

TEST_CASE("codewords reconstruct from beams and co-phasing") {
  const Codebook cb = make(4, 2, 2);
  const auto& cfg = cb.config();
  const int o1 = cfg.oversampling_1(), o2 = cfg.oversampling_2();
  const auto offsets = Codebook::rank2_offsets(cfg.n1, cfg.n2, o1, o2);
  const int half = cb.num_ports() / 2;
  const double scale = 1.0 / std::sqrt(double(cb.num_ports()) * 2.0);
  for (size_t i = 0; i < cb.size(); i += 17) {
    const auto& pm = cb[i];
    CHECK(pm.column_beam[0].l == pm.i11);
    CHECK(pm.column_beam[0].m == pm.i12);
    const int l2 = (pm.i11 + offsets[pm.i13].first) % (cfg.n1 * o1);
    const int m2 = (pm.i12 + offsets[pm.i13].second) % (cfg.n2 * o2);
    CHECK(pm.column_beam[1].l == l2);
    CHECK(pm.column_beam[1].m == m2);
    const auto v = dft_beam(cfg.n1, cfg.n2, o1, o2, pm.i11, pm.i12);
    const auto v2 = dft_beam(cfg.n1, cfg.n2, o1, o2, l2, m2);
    const auto phi = std::polar(1.0, std::numbers::pi * pm.i2 / 2.0);
    for (int p = 0; p < half; ++p) {
      CHECK(std::abs(pm.at(p, 0) - scale * v[p]) <= 1e-12);
      CHECK(std::abs(pm.at(half + p, 0) - scale * phi * v[p]) <= 1e-12);
      CHECK(std::abs(pm.at(p, 1) - scale * v2[p]) <= 1e-12);
      CHECK(std::abs(pm.at(half + p, 1) + scale * phi * v2[p]) <= 1e-12);
    }
  }
}

TEST_CASE("two-port rank-1 codebook collapses to co-phasing only") {
  const Codebook cb = make(1, 1, 1);
  REQUIRE(cb.size() == 4);
  const double s = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < 4; ++i) {
    const auto phi = std::polar(1.0, std::numbers::pi * double(i) / 2.0);
    CHECK(std::abs(cb[i].at(0, 0) - s) <= 1e-15);
    CHECK(std::abs(cb[i].at(1, 0) - s * phi) <= 1e-15);
  }
}

TEST_CASE("invalid codebook configurations are rejected") {
  CodebookConfig cfg;
  cfg.rank = 3;
  CHECK_THROWS_AS(Codebook{cfg}, ConfigError);
  cfg = CodebookConfig{};
  cfg.n1 = 0;
  CHECK_THROWS_AS(Codebook{cfg}, ConfigError);
  cfg = CodebookConfig{};
  cfg.n1 = cfg.n2 = 1;
  cfg.rank = 2;  // two ports cannot carry two orthogonal columns here
  CHECK_THROWS_AS(Codebook{cfg}, ConfigError);
  cfg = CodebookConfig{};
  cfg.n1 = 2;
  cfg.n2 = 4;
  CHECK_THROWS_AS(Codebook{cfg}, UnsupportedError);
}

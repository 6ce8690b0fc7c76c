// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "beamnull/beamnull.h"
#include "doctest.h"

namespace {

struct PanelGuard {
  bn_panel* p = nullptr;
  ~PanelGuard() { bn_panel_destroy(p); }
};
struct CodebookGuard {
  bn_codebook* p = nullptr;
  ~CodebookGuard() { bn_codebook_destroy(p); }
};
struct PatternGuard {
  bn_pattern* p = nullptr;
  ~PatternGuard() { bn_pattern_destroy(p); }
};
struct StackGuard {
  bn_stack* p = nullptr;
  ~StackGuard() { bn_stack_destroy(p); }
};
struct SubsetGuard {
  bn_subset* p = nullptr;
  ~SubsetGuard() { bn_subset_destroy(p); }
};

bn_grid_spec coarse_grid() {
  bn_grid_spec g;
  g.theta_min_deg = -90;
  g.theta_max_deg = 90;
  g.phi_min_deg = -180;
  g.phi_max_deg = 180;
  g.resolution_deg = 3.0;
  return g;
}

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::string(bn_version()) == BN_VERSION_STRING);
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  CHECK(pc.m1 == 2);
  CHECK(pc.m2 == 3);
  CHECK(pc.n1 == 4);
  CHECK(pc.n2 == 4);
  CHECK(pc.polarizations == 2);
  CHECK(pc.carrier_hz == doctest::Approx(3.75e9));
  CHECK(pc.element.max_gain_dbi == doctest::Approx(5.3));
  bn_grid_spec g;
  bn_grid_spec_default(&g);
  CHECK(g.resolution_deg == 1.0);
  CHECK(g.theta_min_deg == -90.0);
  bn_link_config lc;
  bn_link_config_default(&lc);
  CHECK(lc.modulation_order == 16);
  CHECK(lc.n_tx == 32);
  CHECK(lc.n_subcarriers == 624);
}

TEST_CASE("null arguments and destroy(NULL) are safe") {
  CHECK(bn_panel_create(nullptr, nullptr) == BN_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(bn_last_error()) > 0);
  bn_panel_destroy(nullptr);
  bn_codebook_destroy(nullptr);
  bn_pattern_destroy(nullptr);
  bn_stack_destroy(nullptr);
  bn_subset_destroy(nullptr);
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  CHECK(bn_panel_create(&pc, nullptr) == BN_ERR_INVALID_ARGUMENT);
  double g = 0;
  CHECK(bn_element_gain(nullptr, 0, 0, &g) == BN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("error taxonomy maps exception classes to codes") {
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  pc.polarizations = 5;
  bn_panel* panel = nullptr;
  CHECK(bn_panel_create(&pc, &panel) == BN_ERR_CONFIG);
  CHECK(panel == nullptr);

  bn_element_pattern e{5.3, 90, 65, 30, 30};
  double g = 0;
  CHECK(bn_element_gain(&e, 120.0, 0.0, &g) == BN_ERR_DOMAIN);

  bn_codebook_config cc{2, 4, 0, 0, 2};  // n1 < n2 is out of scope
  bn_codebook* cb = nullptr;
  CHECK(bn_codebook_create(&cc, &cb) == BN_ERR_UNSUPPORTED);
  cc = bn_codebook_config{0, 1, 0, 0, 1};
  CHECK(bn_codebook_create(&cc, &cb) == BN_ERR_CONFIG);
}

TEST_CASE("element gain matches the reference values") {
  bn_element_pattern e{5.3, 90, 65, 30, 30};
  double g = 0;
  REQUIRE(bn_element_gain(&e, 0, 0, &g) == BN_OK);
  CHECK(g == doctest::Approx(5.3));
  REQUIRE(bn_element_gain(&e, 0, 45, &g) == BN_OK);
  CHECK(g == doctest::Approx(2.3));
}

TEST_CASE("panel and codebook surfaces") {
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  PanelGuard panel;
  REQUIRE(bn_panel_create(&pc, &panel.p) == BN_OK);
  CHECK(bn_panel_num_ports(panel.p) == 32);
  CHECK(bn_panel_num_elements(panel.p) == 192);

  bn_codebook_config cc{4, 4, 0, 0, 2};
  CodebookGuard cb;
  REQUIRE(bn_codebook_create(&cc, &cb.p) == BN_OK);
  CHECK(bn_codebook_size(cb.p) == 2048);
  CHECK(bn_codebook_num_ports(cb.p) == 32);
  CHECK(bn_codebook_rank(cb.p) == 2);

  bn_pm_indices idx;
  std::vector<double> w(2 * 32 * 2);
  REQUIRE(bn_codebook_entry(cb.p, 0, &idx, w.data()) == BN_OK);
  CHECK(idx.i11 == 0);
  CHECK(idx.i12 == 0);
  double fro = 0;
  for (size_t i = 0; i + 1 < w.size(); i += 2)
    fro += w[i] * w[i] + w[i + 1] * w[i + 1];
  CHECK(fro == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bn_codebook_entry(cb.p, 4096, &idx, w.data()) ==
        BN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("patterns, stacks, nulling and statistics round-trip") {
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  pc.n1 = 2;
  pc.n2 = 2;
  PanelGuard panel;
  REQUIRE(bn_panel_create(&pc, &panel.p) == BN_OK);
  bn_codebook_config cc{2, 2, 0, 0, 2};
  CodebookGuard cb;
  REQUIRE(bn_codebook_create(&cc, &cb.p) == BN_OK);
  const bn_grid_spec grid = coarse_grid();

  PatternGuard pat;
  REQUIRE(bn_pattern_for_pm(panel.p, cb.p, 7, &grid, &pat.p) == BN_OK);
  const size_t nt = bn_pattern_num_theta(pat.p);
  const size_t np = bn_pattern_num_phi(pat.p);
  CHECK(nt == 61);
  CHECK(np == 121);
  std::vector<double> theta(nt), phi(np), values(nt * np);
  REQUIRE(bn_pattern_axes(pat.p, theta.data(), phi.data()) == BN_OK);
  CHECK(theta.front() == -90.0);
  CHECK(phi.back() == 180.0);
  REQUIRE(bn_pattern_values(pat.p, values.data()) == BN_OK);

  double pk_theta, pk_phi, pk_db;
  REQUIRE(bn_pattern_peak(pat.p, &pk_theta, &pk_phi, &pk_db) == BN_OK);
  double interp;
  REQUIRE(bn_pattern_eirp_at(pat.p, pk_theta, pk_phi, &interp) == BN_OK);
  CHECK(interp == doctest::Approx(pk_db));
  CHECK(bn_pattern_eirp_at(pat.p, 95.0, 0.0, &interp) == BN_ERR_DOMAIN);
  double wt, wp;
  REQUIRE(bn_pattern_hpbw(pat.p, &wt, &wp) == BN_OK);
  CHECK(wt > 0.0);
  CHECK(wp > 0.0);
  REQUIRE(bn_pattern_normalize(pat.p) == BN_OK);
  REQUIRE(bn_pattern_peak(pat.p, &pk_theta, &pk_phi, &pk_db) == BN_OK);
  CHECK(pk_db == doctest::Approx(0.0));

  // SSB beams, preset, average and mask.
  PatternGuard ssb;
  REQUIRE(bn_pattern_for_ssb(panel.p, 0.0, 0.5, &grid, &ssb.p) == BN_OK);
  size_t beam_count = 0;
  REQUIRE(bn_ssb_preset("ssb-332", nullptr, &beam_count) == BN_OK);
  REQUIRE(beam_count == 8);
  std::vector<double> angles(2 * beam_count);
  REQUIRE(bn_ssb_preset("ssb-332", angles.data(), &beam_count) == BN_OK);
  CHECK(angles[0] == 6.0);
  CHECK(angles[1] == -60.0);
  CHECK(bn_ssb_preset("nope", nullptr, &beam_count) ==
        BN_ERR_INVALID_ARGUMENT);
  const bn_pattern* two[] = {pat.p, ssb.p};
  PatternGuard avg;
  REQUIRE(bn_pattern_average(two, 2, &avg.p) == BN_OK);
  REQUIRE(bn_pattern_normalize(ssb.p) == BN_OK);
  PatternGuard masked;
  REQUIRE(bn_pattern_masked(avg.p, ssb.p, &masked.p) == BN_OK);

  // Stack, selection, medians, CDF, cuts.
  StackGuard stack;
  REQUIRE(bn_stack_compute(panel.p, cb.p, &grid, 2, &stack.p) == BN_OK);
  REQUIRE(bn_stack_size(stack.p) == 512);
  double gmax;
  REQUIRE(bn_stack_global_max(stack.p, nullptr, &gmax) == BN_OK);
  PatternGuard avg_all;
  REQUIRE(bn_stack_average(stack.p, nullptr, &avg_all.p) == BN_OK);
  PatternGuard one;
  REQUIRE(bn_stack_pattern(stack.p, 3, &one.p) == BN_OK);
  std::vector<double> at(512);
  REQUIRE(bn_stack_values_at(stack.p, nullptr, 6.0, -9.0, BN_REF_GLOBAL_MAX,
                             at.data()) == BN_OK);
  for (double v : at) CHECK(v <= 1e-12);
  double st, sp, sv;
  REQUIRE(bn_stack_peak(stack.p, 3, nullptr, &st, &sp, &sv) == BN_OK);
  CHECK(sv <= gmax + 1e-12);
  REQUIRE(bn_stack_hpbw(stack.p, 3, nullptr, &wt, &wp) == BN_OK);
  CHECK(wt > 0.0);

  bn_null_request req;
  req.target_theta_deg = 6.0;
  req.target_phi_deg = -9.0;
  req.epsilon_db = -5.0;
  req.algorithm = BN_NULL_THRESHOLD;
  req.hpbw_logic = BN_HPBW_AND_EXCLUDE;
  req.reference = BN_REF_GLOBAL_MAX;
  SubsetGuard sub;
  REQUIRE(bn_null_select(stack.p, nullptr, &req, &sub.p) == BN_OK);
  const size_t kept = bn_subset_size(sub.p);
  REQUIRE(kept > 0);
  REQUIRE(kept < 512);
  CHECK(bn_subset_fraction(sub.p) == doctest::Approx(kept / 512.0));
  CHECK(bn_subset_empty_warning(sub.p) == 0);
  std::vector<size_t> idx(kept);
  REQUIRE(bn_subset_indices(sub.p, idx.data()) == BN_OK);
  for (size_t i : idx) CHECK(at[i] < -5.0);

  SubsetGuard full;
  REQUIRE(bn_subset_full(stack.p, &full.p) == BN_OK);
  CHECK(bn_subset_size(full.p) == 512);
  double med_sub, med_full;
  REQUIRE(bn_subset_median_at(stack.p, sub.p, nullptr, 6.0, -9.0,
                              BN_REF_GLOBAL_MAX, &med_sub) == BN_OK);
  REQUIRE(bn_subset_median_at(stack.p, full.p, nullptr, 6.0, -9.0,
                              BN_REF_GLOBAL_MAX, &med_full) == BN_OK);
  CHECK(med_sub <= med_full);
  CHECK(med_sub < -5.0);

  std::vector<double> cdf_v(kept), cdf_p(kept);
  REQUIRE(bn_cdf_at(stack.p, sub.p, nullptr, 6.0, -9.0, BN_REF_GLOBAL_MAX,
                    cdf_v.data(), cdf_p.data()) == BN_OK);
  CHECK(cdf_p.back() == doctest::Approx(1.0));
  CHECK(cdf_v.back() < -5.0);
  CHECK(std::is_sorted(cdf_v.begin(), cdf_v.end()));

  std::vector<double> cut_a(121), cut_m(121);
  size_t cut_n = 0;
  REQUIRE(bn_median_cut(stack.p, sub.p, nullptr, BN_CUT_AZIMUTH, 6.0,
                        BN_REF_GLOBAL_MAX, cut_a.data(), cut_m.data(),
                        &cut_n) == BN_OK);
  CHECK(cut_n == 121);
  CHECK(cut_a.front() == -180.0);

  // Empty selection and no-crossing map to their dedicated codes.
  req.epsilon_db = -400.0;
  SubsetGuard none;
  REQUIRE(bn_null_select(stack.p, nullptr, &req, &none.p) == BN_OK);
  CHECK(bn_subset_empty_warning(none.p) == 1);
  double dummy;
  CHECK(bn_subset_median_at(stack.p, none.p, nullptr, 0, 0,
                            BN_REF_GLOBAL_MAX, &dummy) == BN_ERR_EMPTY);

  bn_grid_spec tiny = coarse_grid();
  tiny.theta_min_deg = -2;
  tiny.theta_max_deg = 2;
  tiny.phi_min_deg = -2;
  tiny.phi_max_deg = 2;
  tiny.resolution_deg = 1.0;
  StackGuard tiny_stack;
  REQUIRE(bn_stack_compute(panel.p, cb.p, &tiny, 1, &tiny_stack.p) == BN_OK);
  CHECK(bn_stack_hpbw(tiny_stack.p, 0, nullptr, &wt, &wp) ==
        BN_ERR_NO_CROSSING);

  bn_grid_spec bad = coarse_grid();
  bad.resolution_deg = 7.0;
  StackGuard bad_stack;
  CHECK(bn_stack_compute(panel.p, cb.p, &bad, 1, &bad_stack.p) ==
        BN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("tdl-c taps through the c api") {
  size_t count = 0;
  REQUIRE(bn_tdl_c_taps(300e-9, nullptr, nullptr, &count) == BN_OK);
  REQUIRE(count == 24);
  std::vector<double> delays(count), powers(count);
  REQUIRE(bn_tdl_c_taps(300e-9, delays.data(), powers.data(), &count) == BN_OK);
  CHECK(delays[0] == 0.0);
  CHECK(powers[5] == 0.0);
  CHECK(bn_tdl_c_taps(-1.0, nullptr, nullptr, &count) ==
        BN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("ber through the c api is deterministic") {
  bn_link_config cfg;
  bn_link_config_default(&cfg);
  cfg.modulation_order = 16;
  cfg.n_layers = 1;
  cfg.n_tx = 1;
  cfg.n_rx = 1;
  cfg.n_subcarriers = 48;
  cfg.channel_model = BN_CHANNEL_AWGN;
  cfg.policy = BN_PRECODER_SVD;
  cfg.n_drops = 20;
  cfg.seed = 9;
  const double snr[2] = {6.0, 12.0};
  bn_ber_point a[2], b[2];
  REQUIRE(bn_run_ber(&cfg, nullptr, nullptr, snr, 2, a) == BN_OK);
  cfg.threads = 3;
  REQUIRE(bn_run_ber(&cfg, nullptr, nullptr, snr, 2, b) == BN_OK);
  for (int i = 0; i < 2; ++i) {
    CHECK(a[i].bit_errors == b[i].bit_errors);
    CHECK(a[i].bits_total == 48ull * 4 * 20);
    CHECK(a[i].ber == doctest::Approx(double(a[i].bit_errors) /
                                      double(a[i].bits_total)));
  }
  CHECK(a[0].bit_errors > a[1].bit_errors);

  // Config errors surface as BN_ERR_CONFIG before any work happens.
  cfg.policy = BN_PRECODER_PMI_FULL;
  CHECK(bn_run_ber(&cfg, nullptr, nullptr, snr, 2, a) == BN_ERR_CONFIG);
  CHECK(bn_run_ber(&cfg, nullptr, nullptr, snr, 0, a) ==
        BN_ERR_INVALID_ARGUMENT);
}

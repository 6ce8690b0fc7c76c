// SPDX-License-Identifier: Apache-2.0
#include "beamnull/beamnull.h"

#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "codebook.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "linksim.hpp"
#include "nulling.hpp"
#include "radiation.hpp"
#include "statistics.hpp"

struct bn_panel {
  beamnull::PanelConfig cfg;
  beamnull::ElementLayout layout;
};

struct bn_codebook {
  beamnull::Codebook cb;
};

struct bn_pattern {
  beamnull::RadiationPattern p;
};

struct bn_stack {
  beamnull::PatternStack s;
};

struct bn_subset {
  beamnull::PmSubset s;
};

namespace {

thread_local std::string g_error;

bn_status fail(bn_status code, const char* msg) {
  g_error = msg;
  return code;
}

template <typename Fn>
bn_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const beamnull::ConfigError& e) {
    g_error = e.what();
    return BN_ERR_CONFIG;
  } catch (const beamnull::UnsupportedError& e) {
    g_error = e.what();
    return BN_ERR_UNSUPPORTED;
  } catch (const beamnull::EmptySetError& e) {
    g_error = e.what();
    return BN_ERR_EMPTY;
  } catch (const beamnull::NoCrossingError& e) {
    g_error = e.what();
    return BN_ERR_NO_CROSSING;
  } catch (const std::domain_error& e) {
    g_error = e.what();
    return BN_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    g_error = e.what();
    return BN_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return BN_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_error = e.what();
    return BN_ERR_RUNTIME;
  } catch (...) {
    g_error = "unknown failure";
    return BN_ERR_RUNTIME;
  }
}

beamnull::ElementPattern to_element(const bn_element_pattern& e) {
  beamnull::ElementPattern out;
  out.max_gain_dbi = e.max_gain_dbi;
  out.hpbw_az_deg = e.hpbw_az_deg;
  out.hpbw_el_deg = e.hpbw_el_deg;
  out.front_to_back_db = e.front_to_back_db;
  out.sla_db = e.sla_db;
  return out;
}

beamnull::PanelConfig to_panel_config(const bn_panel_config& c) {
  beamnull::PanelConfig out;
  out.m1 = c.m1;
  out.m2 = c.m2;
  out.n1 = c.n1;
  out.n2 = c.n2;
  out.polarizations = c.polarizations;
  out.d_el_v_m = c.d_el_v_m;
  out.d_el_h_m = c.d_el_h_m;
  out.d_su_v_m = c.d_su_v_m;
  out.d_su_h_m = c.d_su_h_m;
  out.carrier_hz = c.carrier_hz;
  out.downtilt_deg = c.downtilt_deg;
  out.element = to_element(c.element);
  return out;
}

beamnull::AngularGrid to_grid(const bn_grid_spec& g) {
  return beamnull::AngularGrid::make(g.theta_min_deg, g.theta_max_deg,
                                     g.phi_min_deg, g.phi_max_deg,
                                     g.resolution_deg);
}

bn_status check_reference(int ref) {
  if (ref < BN_REF_ABSOLUTE || ref > BN_REF_GLOBAL_MAX)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown reference");
  return BN_OK;
}

const beamnull::RadiationPattern* mask_of(const bn_pattern* mask) {
  return mask != nullptr ? &mask->p : nullptr;
}

}  // namespace

extern "C" {

const char* bn_version(void) { return BN_VERSION_STRING; }

const char* bn_last_error(void) { return g_error.c_str(); }

/* ------------------------------------------------------------------ panel */

void bn_panel_config_default(bn_panel_config* cfg) {
  if (cfg == nullptr) return;
  const beamnull::PanelConfig d;
  cfg->m1 = d.m1;
  cfg->m2 = d.m2;
  cfg->n1 = d.n1;
  cfg->n2 = d.n2;
  cfg->polarizations = d.polarizations;
  cfg->d_el_v_m = d.d_el_v_m;
  cfg->d_el_h_m = d.d_el_h_m;
  cfg->d_su_v_m = d.d_su_v_m;
  cfg->d_su_h_m = d.d_su_h_m;
  cfg->carrier_hz = d.carrier_hz;
  cfg->downtilt_deg = d.downtilt_deg;
  cfg->element.max_gain_dbi = d.element.max_gain_dbi;
  cfg->element.hpbw_az_deg = d.element.hpbw_az_deg;
  cfg->element.hpbw_el_deg = d.element.hpbw_el_deg;
  cfg->element.front_to_back_db = d.element.front_to_back_db;
  cfg->element.sla_db = d.element.sla_db;
}

bn_status bn_panel_create(const bn_panel_config* cfg, bn_panel** out) {
  if (cfg == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    const beamnull::PanelConfig pc = to_panel_config(*cfg);
    auto* panel = new bn_panel{pc, beamnull::build_layout(pc)};
    *out = panel;
    return BN_OK;
  });
}

void bn_panel_destroy(bn_panel* panel) { delete panel; }

int bn_panel_num_ports(const bn_panel* panel) {
  return panel != nullptr ? panel->layout.num_ports : 0;
}

int bn_panel_num_elements(const bn_panel* panel) {
  return panel != nullptr ? static_cast<int>(panel->layout.entries.size()) : 0;
}

bn_status bn_element_gain(const bn_element_pattern* e, double theta_deg,
                          double phi_deg, double* gain_dbi) {
  if (e == nullptr || gain_dbi == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const beamnull::ElementPattern ep = to_element(*e);
    ep.validate();
    *gain_dbi = beamnull::element_gain_dbi(ep, theta_deg, phi_deg);
    return BN_OK;
  });
}

/* --------------------------------------------------------------- codebook */

bn_status bn_codebook_create(const bn_codebook_config* cfg, bn_codebook** out) {
  if (cfg == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    beamnull::CodebookConfig cc;
    cc.n1 = cfg->n1;
    cc.n2 = cfg->n2;
    cc.o1 = cfg->o1;
    cc.o2 = cfg->o2;
    cc.rank = cfg->rank;
    *out = new bn_codebook{beamnull::Codebook(cc)};
    return BN_OK;
  });
}

void bn_codebook_destroy(bn_codebook* cb) { delete cb; }

size_t bn_codebook_size(const bn_codebook* cb) {
  return cb != nullptr ? cb->cb.size() : 0;
}

int bn_codebook_num_ports(const bn_codebook* cb) {
  return cb != nullptr ? cb->cb.num_ports() : 0;
}

int bn_codebook_rank(const bn_codebook* cb) {
  return cb != nullptr ? cb->cb.rank() : 0;
}

bn_status bn_codebook_entry(const bn_codebook* cb, size_t index,
                            bn_pm_indices* indices, double* w_reim) {
  if (cb == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL codebook");
  if (index >= cb->cb.size())
    return fail(BN_ERR_INVALID_ARGUMENT, "codeword index out of range");
  const beamnull::PrecodingMatrix& pm = cb->cb[index];
  if (indices != nullptr) {
    indices->i11 = pm.i11;
    indices->i12 = pm.i12;
    indices->i13 = pm.i13;
    indices->i2 = pm.i2;
  }
  if (w_reim != nullptr) {
    for (size_t i = 0; i < pm.w.size(); ++i) {
      w_reim[2 * i] = pm.w[i].real();
      w_reim[2 * i + 1] = pm.w[i].imag();
    }
  }
  return BN_OK;
}

/* --------------------------------------------------------------- patterns */

void bn_grid_spec_default(bn_grid_spec* g) {
  if (g == nullptr) return;
  g->theta_min_deg = -90.0;
  g->theta_max_deg = 90.0;
  g->phi_min_deg = -180.0;
  g->phi_max_deg = 180.0;
  g->resolution_deg = 1.0;
}

bn_status bn_pattern_for_pm(const bn_panel* panel, const bn_codebook* cb,
                            size_t pm_index, const bn_grid_spec* grid,
                            bn_pattern** out) {
  if (panel == nullptr || cb == nullptr || grid == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  if (pm_index >= cb->cb.size())
    return fail(BN_ERR_INVALID_ARGUMENT, "codeword index out of range");
  return guarded([&] {
    *out = new bn_pattern{beamnull::pattern_for_pm(
        panel->layout, cb->cb[pm_index], to_grid(*grid))};
    return BN_OK;
  });
}

bn_status bn_pattern_for_ssb(const bn_panel* panel, double steer_theta_deg,
                             double steer_phi_deg, const bn_grid_spec* grid,
                             bn_pattern** out) {
  if (panel == nullptr || grid == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_pattern{beamnull::pattern_for_ssb(
        panel->layout, steer_theta_deg, steer_phi_deg, to_grid(*grid))};
    return BN_OK;
  });
}

bn_status bn_ssb_preset(const char* name, double* angles_deg, size_t* count) {
  if (name == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL name");
  if (std::string(name) != "ssb-332")
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown SSB preset");
  const std::vector<beamnull::SsbBeam> beams = beamnull::ssb_preset_332();
  if (count != nullptr) *count = beams.size();
  if (angles_deg != nullptr) {
    for (size_t i = 0; i < beams.size(); ++i) {
      angles_deg[2 * i] = beams[i].theta_deg;
      angles_deg[2 * i + 1] = beams[i].phi_deg;
    }
  }
  return BN_OK;
}

void bn_pattern_destroy(bn_pattern* p) { delete p; }

size_t bn_pattern_num_theta(const bn_pattern* p) {
  return p != nullptr ? p->p.grid.num_theta() : 0;
}

size_t bn_pattern_num_phi(const bn_pattern* p) {
  return p != nullptr ? p->p.grid.num_phi() : 0;
}

bn_status bn_pattern_axes(const bn_pattern* p, double* theta_deg,
                          double* phi_deg) {
  if (p == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL pattern");
  if (theta_deg != nullptr)
    for (size_t i = 0; i < p->p.grid.num_theta(); ++i)
      theta_deg[i] = p->p.grid.theta_deg[i];
  if (phi_deg != nullptr)
    for (size_t i = 0; i < p->p.grid.num_phi(); ++i)
      phi_deg[i] = p->p.grid.phi_deg[i];
  return BN_OK;
}

bn_status bn_pattern_values(const bn_pattern* p, double* eirp_db) {
  if (p == nullptr || eirp_db == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  for (size_t i = 0; i < p->p.eirp_db.size(); ++i) eirp_db[i] = p->p.eirp_db[i];
  return BN_OK;
}

bn_status bn_pattern_eirp_at(const bn_pattern* p, double theta_deg,
                             double phi_deg, double* eirp_db) {
  if (p == nullptr || eirp_db == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *eirp_db = beamnull::eirp_at(p->p, theta_deg, phi_deg);
    return BN_OK;
  });
}

bn_status bn_pattern_peak(const bn_pattern* p, double* theta_deg,
                          double* phi_deg, double* peak_db) {
  if (p == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL pattern");
  return guarded([&] {
    const beamnull::Peak peak = beamnull::find_peak(p->p);
    if (theta_deg != nullptr) *theta_deg = peak.theta_deg;
    if (phi_deg != nullptr) *phi_deg = peak.phi_deg;
    if (peak_db != nullptr) *peak_db = peak.value_db;
    return BN_OK;
  });
}

bn_status bn_pattern_hpbw(const bn_pattern* p, double* theta_hpbw_deg,
                          double* phi_hpbw_deg) {
  if (p == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL pattern");
  return guarded([&] {
    const beamnull::Peak peak = beamnull::find_peak(p->p);
    const beamnull::Hpbw width = beamnull::hpbw_of(p->p, peak);
    if (theta_hpbw_deg != nullptr) *theta_hpbw_deg = width.theta_width_deg;
    if (phi_hpbw_deg != nullptr) *phi_hpbw_deg = width.phi_width_deg;
    return BN_OK;
  });
}

bn_status bn_pattern_normalize(bn_pattern* p) {
  if (p == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL pattern");
  return guarded([&] {
    beamnull::normalize_to_peak(p->p);
    return BN_OK;
  });
}

bn_status bn_pattern_average(const bn_pattern* const* patterns, size_t count,
                             bn_pattern** out) {
  if (patterns == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<const beamnull::RadiationPattern*> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (patterns[i] == nullptr)
        throw std::invalid_argument("NULL pattern in the average list");
      list.push_back(&patterns[i]->p);
    }
    *out = new bn_pattern{beamnull::average_pattern(list)};
    return BN_OK;
  });
}

bn_status bn_pattern_masked(const bn_pattern* base, const bn_pattern* mask,
                            bn_pattern** out) {
  if (base == nullptr || mask == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_pattern{beamnull::masked_pattern(base->p, mask->p)};
    return BN_OK;
  });
}

/* ---------------------------------------------------------- pattern stack */

bn_status bn_stack_compute(const bn_panel* panel, const bn_codebook* cb,
                           const bn_grid_spec* grid, int threads,
                           bn_stack** out) {
  if (panel == nullptr || cb == nullptr || grid == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_stack{beamnull::PatternStack(panel->layout, cb->cb,
                                               to_grid(*grid), threads)};
    return BN_OK;
  });
}

void bn_stack_destroy(bn_stack* s) { delete s; }

size_t bn_stack_size(const bn_stack* s) {
  return s != nullptr ? s->s.size() : 0;
}

bn_status bn_stack_global_max(const bn_stack* s, const bn_pattern* mask,
                              double* out_db) {
  if (s == nullptr || out_db == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out_db = s->s.global_max_db(mask_of(mask));
    return BN_OK;
  });
}

bn_status bn_stack_average(const bn_stack* s, const bn_pattern* mask,
                           bn_pattern** out) {
  if (s == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_pattern{s->s.average(mask_of(mask))};
    return BN_OK;
  });
}

bn_status bn_stack_pattern(const bn_stack* s, size_t pm_index,
                           bn_pattern** out) {
  if (s == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_pattern{s->s.pattern(pm_index)};
    return BN_OK;
  });
}

bn_status bn_stack_values_at(const bn_stack* s, const bn_pattern* mask,
                             double theta_deg, double phi_deg,
                             bn_reference ref, double* values) {
  if (s == nullptr || values == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  const bn_status rs = check_reference(ref);
  if (rs != BN_OK) return rs;
  return guarded([&] {
    const std::vector<double> v = beamnull::relative_values_at(
        s->s, theta_deg, phi_deg, static_cast<beamnull::Reference>(ref),
        mask_of(mask));
    for (size_t i = 0; i < v.size(); ++i) values[i] = v[i];
    return BN_OK;
  });
}

bn_status bn_stack_peak(const bn_stack* s, size_t pm_index,
                        const bn_pattern* mask, double* theta_deg,
                        double* phi_deg, double* peak_db) {
  if (s == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL stack");
  return guarded([&] {
    const beamnull::PmSummary sum = s->s.summary(pm_index, mask_of(mask));
    if (theta_deg != nullptr) *theta_deg = sum.peak_theta_deg;
    if (phi_deg != nullptr) *phi_deg = sum.peak_phi_deg;
    if (peak_db != nullptr) *peak_db = sum.peak_db;
    return BN_OK;
  });
}

bn_status bn_stack_hpbw(const bn_stack* s, size_t pm_index,
                        const bn_pattern* mask, double* theta_hpbw_deg,
                        double* phi_hpbw_deg) {
  if (s == nullptr) return fail(BN_ERR_INVALID_ARGUMENT, "NULL stack");
  return guarded([&] {
    const beamnull::PmSummary sum = s->s.summary(pm_index, mask_of(mask));
    if (!sum.hpbw.has_value())
      throw beamnull::NoCrossingError(
          "half-power width undefined: a principal cut never drops 3 dB");
    if (theta_hpbw_deg != nullptr) *theta_hpbw_deg = sum.hpbw->theta_width_deg;
    if (phi_hpbw_deg != nullptr) *phi_hpbw_deg = sum.hpbw->phi_width_deg;
    return BN_OK;
  });
}

/* ---------------------------------------------------------------- nulling */

bn_status bn_null_select(const bn_stack* s, const bn_pattern* mask,
                         const bn_null_request* req, bn_subset** out) {
  if (s == nullptr || req == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  if (req->algorithm != BN_NULL_THRESHOLD && req->algorithm != BN_NULL_HPBW)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown nulling algorithm");
  if (req->hpbw_logic != BN_HPBW_AND_EXCLUDE &&
      req->hpbw_logic != BN_HPBW_OR_EXCLUDE)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown half-power logic");
  const bn_status rs = check_reference(req->reference);
  if (rs != BN_OK) return rs;
  return guarded([&] {
    beamnull::NullRequest nr;
    nr.target_theta_deg = req->target_theta_deg;
    nr.target_phi_deg = req->target_phi_deg;
    nr.epsilon_db = req->epsilon_db;
    nr.algorithm = req->algorithm == BN_NULL_THRESHOLD
                       ? beamnull::NullAlgorithm::Threshold
                       : beamnull::NullAlgorithm::Hpbw;
    nr.hpbw_logic = req->hpbw_logic == BN_HPBW_AND_EXCLUDE
                        ? beamnull::HpbwLogic::AndExclude
                        : beamnull::HpbwLogic::OrExclude;
    nr.reference = static_cast<beamnull::Reference>(req->reference);
    *out = new bn_subset{beamnull::select(s->s, nr, mask_of(mask))};
    return BN_OK;
  });
}

bn_status bn_subset_full(const bn_stack* s, bn_subset** out) {
  if (s == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bn_subset{beamnull::full_subset(s->s)};
    return BN_OK;
  });
}

void bn_subset_destroy(bn_subset* sub) { delete sub; }

size_t bn_subset_size(const bn_subset* sub) {
  return sub != nullptr ? sub->s.retained.size() : 0;
}

double bn_subset_fraction(const bn_subset* sub) {
  return sub != nullptr ? sub->s.fraction() : 0.0;
}

int bn_subset_empty_warning(const bn_subset* sub) {
  return sub != nullptr && sub->s.empty_warning ? 1 : 0;
}

size_t bn_subset_undefined_hpbw(const bn_subset* sub) {
  return sub != nullptr ? sub->s.undefined_hpbw : 0;
}

bn_status bn_subset_indices(const bn_subset* sub, size_t* out) {
  if (sub == nullptr || out == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  for (size_t i = 0; i < sub->s.retained.size(); ++i)
    out[i] = sub->s.retained[i];
  return BN_OK;
}

bn_status bn_subset_median_at(const bn_stack* s, const bn_subset* sub,
                              const bn_pattern* mask, double theta_deg,
                              double phi_deg, bn_reference ref,
                              double* median_db) {
  if (s == nullptr || sub == nullptr || median_db == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  const bn_status rs = check_reference(ref);
  if (rs != BN_OK) return rs;
  return guarded([&] {
    *median_db = beamnull::subset_median_at(
        s->s, sub->s, theta_deg, phi_deg,
        static_cast<beamnull::Reference>(ref), mask_of(mask));
    return BN_OK;
  });
}

/* ------------------------------------------------------------- statistics */

bn_status bn_cdf_at(const bn_stack* s, const bn_subset* sub,
                    const bn_pattern* mask, double theta_deg, double phi_deg,
                    bn_reference ref, double* values_db, double* cum_prob) {
  if (s == nullptr || sub == nullptr || values_db == nullptr ||
      cum_prob == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  const bn_status rs = check_reference(ref);
  if (rs != BN_OK) return rs;
  return guarded([&] {
    const beamnull::EmpiricalCdf cdf = beamnull::cdf_at(
        s->s, sub->s, theta_deg, phi_deg,
        static_cast<beamnull::Reference>(ref), mask_of(mask));
    for (size_t i = 0; i < cdf.values.size(); ++i) {
      values_db[i] = cdf.values[i];
      cum_prob[i] = cdf.probabilities[i];
    }
    return BN_OK;
  });
}

bn_status bn_median_cut(const bn_stack* s, const bn_subset* sub,
                        const bn_pattern* mask, bn_cut_axis axis,
                        double fixed_angle_deg, bn_reference ref,
                        double* angles_deg, double* medians_db,
                        size_t* count) {
  if (s == nullptr || sub == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  if (axis != BN_CUT_ELEVATION && axis != BN_CUT_AZIMUTH)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown cut axis");
  const bn_status rs = check_reference(ref);
  if (rs != BN_OK) return rs;
  return guarded([&] {
    const beamnull::MedianCut cut = beamnull::median_cut(
        s->s, sub->s,
        axis == BN_CUT_ELEVATION ? beamnull::CutAxis::Elevation
                                 : beamnull::CutAxis::Azimuth,
        fixed_angle_deg, static_cast<beamnull::Reference>(ref), mask_of(mask));
    if (count != nullptr) *count = cut.angles_deg.size();
    if (angles_deg != nullptr)
      for (size_t i = 0; i < cut.angles_deg.size(); ++i)
        angles_deg[i] = cut.angles_deg[i];
    if (medians_db != nullptr)
      for (size_t i = 0; i < cut.medians_db.size(); ++i)
        medians_db[i] = cut.medians_db[i];
    return BN_OK;
  });
}

/* ---------------------------------------------------------------- channel */

bn_status bn_tdl_c_taps(double delay_spread_s, double* delays_s,
                        double* powers_db, size_t* count) {
  return guarded([&] {
    const beamnull::DelayProfile profile =
        beamnull::tdl_c_profile(delay_spread_s);
    if (count != nullptr) *count = profile.num_taps();
    if (delays_s != nullptr)
      for (size_t i = 0; i < profile.num_taps(); ++i)
        delays_s[i] = profile.delays_s[i];
    if (powers_db != nullptr)
      for (size_t i = 0; i < profile.num_taps(); ++i)
        powers_db[i] = profile.powers_db[i];
    return BN_OK;
  });
}

/* -------------------------------------------------------- link simulation */

void bn_link_config_default(bn_link_config* cfg) {
  if (cfg == nullptr) return;
  cfg->modulation_order = 16;
  cfg->n_layers = 2;
  cfg->n_tx = 32;
  cfg->n_rx = 4;
  cfg->n_subcarriers = 624;
  cfg->scs_hz = 30e3;
  cfg->channel_model = BN_CHANNEL_TDL_C;
  cfg->delay_spread_ns = 300.0;
  cfg->policy = BN_PRECODER_PMI_FULL;
  cfg->csi = BN_CSI_PERFECT;
  cfg->pilot_spacing = 4;
  cfg->n_drops = 100;
  cfg->seed = 1;
  cfg->threads = 0;
}

bn_status bn_run_ber(const bn_link_config* cfg, const bn_codebook* cb,
                     const bn_subset* subset, const double* snr_db,
                     size_t n_snr, bn_ber_point* out_points) {
  if (cfg == nullptr || snr_db == nullptr || out_points == nullptr)
    return fail(BN_ERR_INVALID_ARGUMENT, "NULL argument");
  if (n_snr == 0) return fail(BN_ERR_INVALID_ARGUMENT, "empty SNR grid");
  if (cfg->channel_model != BN_CHANNEL_TDL_C &&
      cfg->channel_model != BN_CHANNEL_AWGN)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown channel model");
  if (cfg->policy < BN_PRECODER_SVD || cfg->policy > BN_PRECODER_PMI_SUBSET)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown precoder policy");
  if (cfg->csi != BN_CSI_PERFECT && cfg->csi != BN_CSI_ESTIMATED)
    return fail(BN_ERR_INVALID_ARGUMENT, "unknown CSI mode");
  return guarded([&] {
    beamnull::LinkConfig lc;
    lc.modulation_order = cfg->modulation_order;
    lc.n_layers = cfg->n_layers;
    lc.n_tx = cfg->n_tx;
    lc.n_rx = cfg->n_rx;
    lc.n_subcarriers = cfg->n_subcarriers > 0 ? cfg->n_subcarriers : 624;
    lc.scs_hz = cfg->scs_hz > 0.0 ? cfg->scs_hz : 30e3;
    lc.channel_model = cfg->channel_model == BN_CHANNEL_AWGN
                           ? beamnull::ChannelModel::Awgn
                           : beamnull::ChannelModel::TdlC;
    lc.delay_spread_s =
        (cfg->delay_spread_ns > 0.0 ? cfg->delay_spread_ns : 300.0) * 1e-9;
    lc.policy = cfg->policy == BN_PRECODER_SVD
                    ? beamnull::PrecoderPolicy::Svd
                    : (cfg->policy == BN_PRECODER_PMI_FULL
                           ? beamnull::PrecoderPolicy::PmiFull
                           : beamnull::PrecoderPolicy::PmiSubset);
    lc.csi = cfg->csi == BN_CSI_ESTIMATED ? beamnull::CsiMode::Estimated
                                          : beamnull::CsiMode::Perfect;
    lc.pilot_spacing = cfg->pilot_spacing > 0 ? cfg->pilot_spacing : 4;
    lc.n_drops = cfg->n_drops;
    lc.seed = cfg->seed;
    lc.threads = cfg->threads;

    const std::vector<double> snr(snr_db, snr_db + n_snr);
    const std::vector<beamnull::BerPoint> points = beamnull::run_ber(
        lc, snr, cb != nullptr ? &cb->cb : nullptr,
        subset != nullptr ? &subset->s : nullptr);
    for (size_t i = 0; i < points.size(); ++i) {
      out_points[i].snr_db = points[i].snr_db;
      out_points[i].bit_errors = points[i].bit_errors;
      out_points[i].bits_total = points[i].bits_total;
      out_points[i].ber = points[i].ber;
    }
    return BN_OK;
  });
}

} /* extern "C" */

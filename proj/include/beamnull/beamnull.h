/* SPDX-License-Identifier: Apache-2.0 */
/*
 * beamnull - C API for antenna-array precoder patterns, beam nulling and
 * MIMO downlink bit-error-rate evaluation.
 *
 * All functions returning bn_status report BN_OK on success. On failure a
 * thread-local message is available through bn_last_error(). Objects are
 * created through bn_*_create/bn_*_compute and released with the matching
 * bn_*_destroy; destroy functions accept NULL.
 */
#ifndef BEAMNULL_H
#define BEAMNULL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BN_VERSION_STRING "0.1.0"

typedef enum bn_status {
  BN_OK = 0,
  BN_ERR_INVALID_ARGUMENT = 1, /* bad pointer, index, or parameter value */
  BN_ERR_DOMAIN = 2,           /* angle or value outside its documented domain */
  BN_ERR_CONFIG = 3,           /* inconsistent configuration */
  BN_ERR_UNSUPPORTED = 4,      /* valid request that this build does not support */
  BN_ERR_EMPTY = 5,            /* operation on an empty set */
  BN_ERR_NO_CROSSING = 6,      /* half-power width undefined for this pattern */
  BN_ERR_RUNTIME = 7
} bn_status;

const char *bn_version(void);
/* Message describing the most recent failure on the calling thread. */
const char *bn_last_error(void);

/* ---------------------------------------------------------------- panel -- */

typedef struct bn_element_pattern {
  double max_gain_dbi;
  double hpbw_az_deg;
  double hpbw_el_deg;
  double front_to_back_db;
  double sla_db;
} bn_element_pattern;

typedef struct bn_panel_config {
  int m1, m2;           /* element rows / columns per subarray */
  int n1, n2;           /* subarray columns / rows per panel */
  int polarizations;    /* 1 or 2 (dual slant) */
  double d_el_v_m, d_el_h_m; /* element pitch */
  double d_su_v_m, d_su_h_m; /* subarray pitch; <= 0 selects the contiguous grid */
  double carrier_hz;
  double downtilt_deg;
  bn_element_pattern element;
} bn_panel_config;

typedef struct bn_panel bn_panel;

/* Fill cfg with the 32-port reference panel (2x3 subarrays, 4x4 panel,
 * dual polarization, 3.75 GHz). */
void bn_panel_config_default(bn_panel_config *cfg);

bn_status bn_panel_create(const bn_panel_config *cfg, bn_panel **out);
void bn_panel_destroy(bn_panel *panel);
int bn_panel_num_ports(const bn_panel *panel);
int bn_panel_num_elements(const bn_panel *panel);

/* Directional element gain in dBi. theta in [-90,90] (up positive),
 * phi in [-180,180] (left positive), boresight at (0,0). */
bn_status bn_element_gain(const bn_element_pattern *e, double theta_deg,
                          double phi_deg, double *gain_dbi);

/* ------------------------------------------------------------- codebook -- */

typedef struct bn_codebook_config {
  int n1, n2; /* ports per polarization: horizontal x vertical */
  int o1, o2; /* oversampling; <= 0 selects the standard default */
  int rank;   /* 1 or 2 */
} bn_codebook_config;

typedef struct bn_codebook bn_codebook;

typedef struct bn_pm_indices {
  int i11, i12, i13, i2;
} bn_pm_indices;

bn_status bn_codebook_create(const bn_codebook_config *cfg, bn_codebook **out);
void bn_codebook_destroy(bn_codebook *cb);
size_t bn_codebook_size(const bn_codebook *cb);
int bn_codebook_num_ports(const bn_codebook *cb);
int bn_codebook_rank(const bn_codebook *cb);

/* Copy one codeword. indices may be NULL. w_reim, when non-NULL, receives
 * 2*ports*rank doubles: column-major layers, each entry as re,im. */
bn_status bn_codebook_entry(const bn_codebook *cb, size_t index,
                            bn_pm_indices *indices, double *w_reim);

/* ------------------------------------------------------------- patterns -- */

typedef struct bn_grid_spec {
  double theta_min_deg, theta_max_deg;
  double phi_min_deg, phi_max_deg;
  double resolution_deg;
} bn_grid_spec;

/* Full sphere at 1 degree: theta [-90,90], phi [-180,180]. */
void bn_grid_spec_default(bn_grid_spec *g);

typedef enum bn_reference {
  BN_REF_ABSOLUTE = 0,      /* dB values as synthesized */
  BN_REF_PATTERN_PEAK = 1,  /* each pattern relative to its own peak */
  BN_REF_GLOBAL_MAX = 2     /* relative to the strongest value in a stack */
} bn_reference;

typedef struct bn_pattern bn_pattern;

/* EIRP pattern of one codebook entry over the grid. */
bn_status bn_pattern_for_pm(const bn_panel *panel, const bn_codebook *cb,
                            size_t pm_index, const bn_grid_spec *grid,
                            bn_pattern **out);

/* Wide beam radiated by the first column of subarrays, steered at the
 * element level toward (steer_theta, steer_phi). */
bn_status bn_pattern_for_ssb(const bn_panel *panel, double steer_theta_deg,
                             double steer_phi_deg, const bn_grid_spec *grid,
                             bn_pattern **out);

/* Built-in SSB steering sets. "ssb-332" holds eight beams on three
 * elevation rings. angles_deg, when non-NULL, receives (theta, phi) pairs;
 * *count receives the beam count. */
bn_status bn_ssb_preset(const char *name, double *angles_deg, size_t *count);

void bn_pattern_destroy(bn_pattern *p);

size_t bn_pattern_num_theta(const bn_pattern *p);
size_t bn_pattern_num_phi(const bn_pattern *p);
bn_status bn_pattern_axes(const bn_pattern *p, double *theta_deg,
                          double *phi_deg);
/* Row-major theta x phi dB values. */
bn_status bn_pattern_values(const bn_pattern *p, double *eirp_db);
/* Bilinear interpolation on the dB grid. */
bn_status bn_pattern_eirp_at(const bn_pattern *p, double theta_deg,
                             double phi_deg, double *eirp_db);
bn_status bn_pattern_peak(const bn_pattern *p, double *theta_deg,
                          double *phi_deg, double *peak_db);
/* Half-power widths of the cuts through the peak. */
bn_status bn_pattern_hpbw(const bn_pattern *p, double *theta_hpbw_deg,
                          double *phi_hpbw_deg);
/* Shift so the peak sits at 0 dB. */
bn_status bn_pattern_normalize(bn_pattern *p);
/* Pointwise linear average of count patterns on a common grid. */
bn_status bn_pattern_average(const bn_pattern *const *patterns, size_t count,
                             bn_pattern **out);
/* Composite of a beam pattern with a 0 dB-peak mask (dB addition). */
bn_status bn_pattern_masked(const bn_pattern *base, const bn_pattern *mask,
                            bn_pattern **out);

/* -------------------------------------------------------- pattern stack -- */

typedef struct bn_stack bn_stack;

/* Patterns of every codeword in cb over the grid. threads <= 0 picks the
 * hardware concurrency; results do not depend on the thread count. */
bn_status bn_stack_compute(const bn_panel *panel, const bn_codebook *cb,
                           const bn_grid_spec *grid, int threads,
                           bn_stack **out);
void bn_stack_destroy(bn_stack *s);
size_t bn_stack_size(const bn_stack *s);

/* Strongest dB value over all codewords and directions (mask optional). */
bn_status bn_stack_global_max(const bn_stack *s, const bn_pattern *mask,
                              double *out_db);
/* Pointwise linear average over all codewords (absolute reference). */
bn_status bn_stack_average(const bn_stack *s, const bn_pattern *mask,
                           bn_pattern **out);
/* Reconstruct one codeword's pattern. */
bn_status bn_stack_pattern(const bn_stack *s, size_t pm_index,
                           bn_pattern **out);
/* EIRP of every codeword at one direction under the given reference;
 * values must hold bn_stack_size entries. */
bn_status bn_stack_values_at(const bn_stack *s, const bn_pattern *mask,
                             double theta_deg, double phi_deg,
                             bn_reference ref, double *values);
/* Peak of one codeword's pattern (cached inside the stack). */
bn_status bn_stack_peak(const bn_stack *s, size_t pm_index,
                        const bn_pattern *mask, double *theta_deg,
                        double *phi_deg, double *peak_db);
/* Half-power widths of one codeword's pattern; BN_ERR_NO_CROSSING when a
 * principal cut never drops 3 dB below the peak. */
bn_status bn_stack_hpbw(const bn_stack *s, size_t pm_index,
                        const bn_pattern *mask, double *theta_hpbw_deg,
                        double *phi_hpbw_deg);

/* -------------------------------------------------------------- nulling -- */

typedef enum bn_null_algorithm {
  BN_NULL_THRESHOLD = 0, /* keep codewords below an EIRP threshold */
  BN_NULL_HPBW = 1       /* keep codewords whose half-power box misses the target */
} bn_null_algorithm;

typedef enum bn_hpbw_logic {
  /* Keep when the target is outside the azimuth box AND outside the
   * elevation box (drop on either overlap). */
  BN_HPBW_AND_EXCLUDE = 0,
  /* Keep when the target is outside at least one box. */
  BN_HPBW_OR_EXCLUDE = 1
} bn_hpbw_logic;

typedef struct bn_null_request {
  double target_theta_deg, target_phi_deg;
  double epsilon_db;        /* threshold algorithm only */
  bn_null_algorithm algorithm;
  bn_hpbw_logic hpbw_logic; /* HPBW algorithm only */
  bn_reference reference;   /* reference for epsilon comparisons */
} bn_null_request;

typedef struct bn_subset bn_subset;

bn_status bn_null_select(const bn_stack *s, const bn_pattern *mask,
                         const bn_null_request *req, bn_subset **out);
/* Subset containing every codeword (baseline for comparisons). */
bn_status bn_subset_full(const bn_stack *s, bn_subset **out);
void bn_subset_destroy(bn_subset *sub);
size_t bn_subset_size(const bn_subset *sub);
double bn_subset_fraction(const bn_subset *sub);
/* 1 when the selection produced no codewords. */
int bn_subset_empty_warning(const bn_subset *sub);
/* Codewords whose half-power width was undefined (kept, counted here). */
size_t bn_subset_undefined_hpbw(const bn_subset *sub);
bn_status bn_subset_indices(const bn_subset *sub, size_t *out);

/* Lower median EIRP of the subset at one direction. */
bn_status bn_subset_median_at(const bn_stack *s, const bn_subset *sub,
                              const bn_pattern *mask, double theta_deg,
                              double phi_deg, bn_reference ref,
                              double *median_db);

/* ----------------------------------------------------------- statistics -- */

/* Empirical CDF of subset EIRP at one direction: sorted values and step
 * probabilities (i+1)/n. Arrays must hold bn_subset_size entries. */
bn_status bn_cdf_at(const bn_stack *s, const bn_subset *sub,
                    const bn_pattern *mask, double theta_deg, double phi_deg,
                    bn_reference ref, double *values_db, double *cum_prob);

typedef enum bn_cut_axis {
  BN_CUT_ELEVATION = 0, /* sweep theta at fixed phi */
  BN_CUT_AZIMUTH = 1    /* sweep phi at fixed theta */
} bn_cut_axis;

/* Per-direction median EIRP along a grid cut. angles/medians must hold
 * as many entries as the swept axis; *count receives that length. */
bn_status bn_median_cut(const bn_stack *s, const bn_subset *sub,
                        const bn_pattern *mask, bn_cut_axis axis,
                        double fixed_angle_deg, bn_reference ref,
                        double *angles_deg, double *medians_db, size_t *count);

/* -------------------------------------------------------------- channel -- */

/* TDL-C power-delay profile scaled to the given RMS delay spread.
 * delays_s/powers_db may be NULL; *count receives the tap count (24). */
bn_status bn_tdl_c_taps(double delay_spread_s, double *delays_s,
                        double *powers_db, size_t *count);

/* ------------------------------------------------------ link simulation -- */

typedef enum bn_precoder_policy {
  BN_PRECODER_SVD = 0,        /* wideband eigenbeams of the estimated channel */
  BN_PRECODER_PMI_FULL = 1,   /* best codeword from the full codebook */
  BN_PRECODER_PMI_SUBSET = 2  /* best codeword from a nulled subset */
} bn_precoder_policy;

typedef enum bn_csi_mode {
  BN_CSI_PERFECT = 0,
  BN_CSI_ESTIMATED = 1 /* least-squares pilot estimate at the operating SNR */
} bn_csi_mode;

typedef enum bn_channel_model {
  BN_CHANNEL_TDL_C = 0,
  BN_CHANNEL_AWGN = 1 /* deterministic unit tap, no fading */
} bn_channel_model;

typedef struct bn_link_config {
  int modulation_order;   /* 16, 64 or 256 */
  int n_layers;           /* 1 or 2 */
  int n_tx;               /* transmit ports */
  int n_rx;               /* receive antennas */
  int n_subcarriers;      /* <= 0: 624 (52 RB) */
  double scs_hz;          /* <= 0: 30 kHz */
  int channel_model;      /* bn_channel_model */
  double delay_spread_ns; /* <= 0: 300 */
  int policy;             /* bn_precoder_policy */
  int csi;                /* bn_csi_mode */
  int pilot_spacing;      /* pilot every k-th subcarrier; <= 0: 4 */
  int n_drops;
  uint64_t seed;
  int threads; /* <= 0 picks the hardware concurrency */
} bn_link_config;

void bn_link_config_default(bn_link_config *cfg);

typedef struct bn_ber_point {
  double snr_db;
  uint64_t bit_errors;
  uint64_t bits_total;
  double ber;
} bn_ber_point;

/* Monte-Carlo uncoded BER over n_snr SNR points. cb is required for the
 * PMI policies, subset for BN_PRECODER_PMI_SUBSET. Results are
 * deterministic in (config, seed) and independent of the thread count. */
bn_status bn_run_ber(const bn_link_config *cfg, const bn_codebook *cb,
                     const bn_subset *subset, const double *snr_db,
                     size_t n_snr, bn_ber_point *out_points);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BEAMNULL_H */

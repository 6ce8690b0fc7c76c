// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace beamnull {

// Directional gain model of a single radiating element: parabolic rolloff in
// dB on both principal cuts, clamped by the side-lobe floor (sla_db) in
// elevation and the front-to-back ratio on the combined pattern.
struct ElementPattern {
  double max_gain_dbi = 5.3;
  double hpbw_az_deg = 90.0;
  double hpbw_el_deg = 60.0;
  double front_to_back_db = 30.0;
  double sla_db = 30.0;

  void validate() const;
};

// theta in [-90,90] degrees, positive above the horizon; phi in [-180,180]
// degrees, positive to the left of boresight. Throws std::domain_error when
// the direction is outside those ranges.
double element_gain_dbi(const ElementPattern& e, double theta_deg,
                        double phi_deg);

enum class Polarization : std::uint8_t { PlusSlant45 = 0, MinusSlant45 = 1 };

// Rectangular panel of subarrays. Each subarray is an m1 x m2 block of
// elements (rows x columns) combined into one port per polarization; the
// panel holds n2 x n1 subarrays (rows x columns). By default the elements
// form one contiguous grid at the element pitch; an explicit subarray pitch
// (d_su_* > 0) overrides that and may not make distinct elements coincide.
struct PanelConfig {
  int m1 = 2;
  int m2 = 3;
  int n1 = 4;
  int n2 = 4;
  int polarizations = 2;
  double d_el_v_m = 0.058;
  double d_el_h_m = 0.044;
  double d_su_v_m = 0.0;
  double d_su_h_m = 0.0;
  double carrier_hz = 3.75e9;
  double downtilt_deg = 0.0;
  ElementPattern element;

  int num_ports() const { return polarizations * n1 * n2; }
  int num_elements() const { return polarizations * m1 * m2 * n1 * n2; }
  double wavelength_m() const;
  void validate() const;
};

struct LayoutEntry {
  std::array<double, 3> position_m;  // x toward boresight, y left, z up
  Polarization polarization;
  int subarray_row;  // 0 = top
  int subarray_col;  // 0 = left
  int port;
};

// Flattened element list of a panel. Port numbering: all +45 ports first,
// then the -45 ports; within a polarization, port = column * n2 + row with
// rows counted top to bottom.
struct ElementLayout {
  std::vector<LayoutEntry> entries;
  int num_ports = 0;
  int elements_per_port = 0;
  double wavelength_m = 0.0;
  double downtilt_deg = 0.0;
  ElementPattern element;
};

ElementLayout build_layout(const PanelConfig& cfg);

// Unit direction vector for (theta, phi) in the panel frame.
std::array<double, 3> unit_direction(double theta_deg, double phi_deg);

// Rotate an evaluation direction into the frame of a panel tilted down by
// downtilt_deg about the y axis.
std::array<double, 3> apply_downtilt(const std::array<double, 3>& u,
                                     double downtilt_deg);

// Per-element phase factors exp(+j 2pi/lambda r.u) toward (theta, phi),
// after the panel downtilt. Conjugate these to steer a beam there.
std::vector<std::complex<double>> steering_phases(const ElementLayout& layout,
                                                  double theta_deg,
                                                  double phi_deg);

}  // namespace beamnull

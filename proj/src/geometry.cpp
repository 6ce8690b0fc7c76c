// SPDX-License-Identifier: Apache-2.0
#include "geometry.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "errors.hpp"

namespace beamnull {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kSpeedOfLight = 299792458.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ElementPattern::validate() const {
  require(hpbw_az_deg > 0.0 && hpbw_el_deg > 0.0,
          "element half-power beamwidths must be positive");
  require(front_to_back_db >= 0.0 && sla_db >= 0.0,
          "element attenuation limits must be non-negative");
}

double element_gain_dbi(const ElementPattern& e, double theta_deg,
                        double phi_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
    throw std::domain_error("theta outside [-90, 90] degrees");
  if (!(phi_deg >= -180.0 && phi_deg <= 180.0))
    throw std::domain_error("phi outside [-180, 180] degrees");
  const double a_v =
      -std::min(12.0 * (theta_deg / e.hpbw_el_deg) * (theta_deg / e.hpbw_el_deg),
                e.sla_db);
  const double a_h =
      -std::min(12.0 * (phi_deg / e.hpbw_az_deg) * (phi_deg / e.hpbw_az_deg),
                e.front_to_back_db);
  return e.max_gain_dbi - std::min(-(a_v + a_h), e.front_to_back_db);
}

double PanelConfig::wavelength_m() const { return kSpeedOfLight / carrier_hz; }

void PanelConfig::validate() const {
  require(m1 >= 1 && m2 >= 1 && n1 >= 1 && n2 >= 1,
          "panel dimensions must be at least 1");
  require(polarizations == 1 || polarizations == 2,
          "polarizations must be 1 or 2");
  require(d_el_v_m > 0.0 && d_el_h_m > 0.0, "element pitch must be positive");
  require(carrier_hz > 0.0, "carrier frequency must be positive");
  require(downtilt_deg >= -90.0 && downtilt_deg <= 90.0,
          "downtilt outside [-90, 90] degrees");
  element.validate();
}

ElementLayout build_layout(const PanelConfig& cfg) {
  cfg.validate();

  const bool contiguous = cfg.d_su_v_m <= 0.0 && cfg.d_su_h_m <= 0.0;
  if (!contiguous && (cfg.d_su_v_m <= 0.0 || cfg.d_su_h_m <= 0.0))
    throw ConfigError("subarray pitch must be given on both axes or neither");

  ElementLayout layout;
  layout.num_ports = cfg.num_ports();
  layout.elements_per_port = cfg.m1 * cfg.m2;
  layout.wavelength_m = cfg.wavelength_m();
  layout.downtilt_deg = cfg.downtilt_deg;
  layout.element = cfg.element;
  layout.entries.reserve(static_cast<size_t>(cfg.num_elements()));

  const int rows = cfg.n2 * cfg.m1;  // element rows on the full panel
  const int cols = cfg.n1 * cfg.m2;
  const int ports_per_pol = cfg.n1 * cfg.n2;

  for (int pol = 0; pol < cfg.polarizations; ++pol) {
    for (int sub_col = 0; sub_col < cfg.n1; ++sub_col) {
      for (int sub_row = 0; sub_row < cfg.n2; ++sub_row) {
        const int port = pol * ports_per_pol + sub_col * cfg.n2 + sub_row;
        for (int er = 0; er < cfg.m1; ++er) {
          for (int ec = 0; ec < cfg.m2; ++ec) {
            double y, z;
            if (contiguous) {
              const int gr = sub_row * cfg.m1 + er;
              const int gc = sub_col * cfg.m2 + ec;
              y = (gc - 0.5 * (cols - 1)) * cfg.d_el_h_m;
              z = (0.5 * (rows - 1) - gr) * cfg.d_el_v_m;
            } else {
              const double yc = (sub_col - 0.5 * (cfg.n1 - 1)) * cfg.d_su_h_m;
              const double zc = (0.5 * (cfg.n2 - 1) - sub_row) * cfg.d_su_v_m;
              y = yc + (ec - 0.5 * (cfg.m2 - 1)) * cfg.d_el_h_m;
              z = zc + (0.5 * (cfg.m1 - 1) - er) * cfg.d_el_v_m;
            }
            layout.entries.push_back(LayoutEntry{
                {0.0, y, z},
                pol == 0 ? Polarization::PlusSlant45
                         : Polarization::MinusSlant45,
                sub_row, sub_col, port});
          }
        }
      }
    }
  }

  if (!contiguous) {
    // Distinct same-polarization elements sharing a position means the
    // subarray pitch makes subarrays overlap.
    std::map<std::tuple<int, long long, long long>, int> seen;
    for (const auto& entry : layout.entries) {
      auto key = std::make_tuple(
          static_cast<int>(entry.polarization),
          std::llround(entry.position_m[1] * 1e7),
          std::llround(entry.position_m[2] * 1e7));
      if (!seen.emplace(key, entry.port).second)
        throw ConfigError("subarray pitch makes distinct elements coincide");
    }
  }
  return layout;
}

std::array<double, 3> unit_direction(double theta_deg, double phi_deg) {
  const double th = theta_deg * kDegToRad;
  const double ph = phi_deg * kDegToRad;
  const double ct = std::cos(th);
  return {ct * std::cos(ph), ct * std::sin(ph), std::sin(th)};
}

std::array<double, 3> apply_downtilt(const std::array<double, 3>& u,
                                     double downtilt_deg) {
  if (downtilt_deg == 0.0) return u;
  // Rotation about y that maps the tilted boresight onto +x.
  const double a = downtilt_deg * kDegToRad;
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * u[0] - s * u[2], u[1], s * u[0] + c * u[2]};
}

std::vector<std::complex<double>> steering_phases(const ElementLayout& layout,
                                                  double theta_deg,
                                                  double phi_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
    throw std::domain_error("theta outside [-90, 90] degrees");
  if (!(phi_deg >= -180.0 && phi_deg <= 180.0))
    throw std::domain_error("phi outside [-180, 180] degrees");
  const auto u =
      apply_downtilt(unit_direction(theta_deg, phi_deg), layout.downtilt_deg);
  const double k = 2.0 * std::numbers::pi / layout.wavelength_m;
  std::vector<std::complex<double>> phases;
  phases.reserve(layout.entries.size());
  for (const auto& entry : layout.entries) {
    const double dot = entry.position_m[0] * u[0] + entry.position_m[1] * u[1] +
                       entry.position_m[2] * u[2];
    phases.push_back(std::polar(1.0, k * dot));
  }
  return phases;
}

}  // namespace beamnull

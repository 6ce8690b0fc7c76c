// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "codebook.hpp"
#include "geometry.hpp"

namespace beamnull {

// Powers below 10^(kEirpFloorDb/10) clamp to the floor so that nulls stay
// finite on dB grids.
inline constexpr double kEirpFloorDb = -100.0;

double db_from_linear(double power);

// Uniform rectangular angle grid. The resolution must evenly divide both
// spans; angles outside theta [-90,90] / phi [-180,180] are rejected.
struct AngularGrid {
  std::vector<double> theta_deg;
  std::vector<double> phi_deg;
  double resolution_deg = 0.0;

  static AngularGrid make(double theta_min_deg, double theta_max_deg,
                          double phi_min_deg, double phi_max_deg,
                          double resolution_deg);
  static AngularGrid full_sphere(double resolution_deg = 1.0);

  size_t num_theta() const { return theta_deg.size(); }
  size_t num_phi() const { return phi_deg.size(); }
  size_t size() const { return num_theta() * num_phi(); }
  bool matches(const AngularGrid& other) const;
  // Index of an angle that must lie on the grid (throws otherwise).
  size_t theta_index(double angle_deg) const;
  size_t phi_index(double angle_deg) const;
};

// EIRP samples over a grid, dB, theta-major storage.
struct RadiationPattern {
  AngularGrid grid;
  std::vector<double> eirp_db;

  double at(size_t theta_idx, size_t phi_idx) const {
    return eirp_db[theta_idx * grid.num_phi() + phi_idx];
  }
  double& at(size_t theta_idx, size_t phi_idx) {
    return eirp_db[theta_idx * grid.num_phi() + phi_idx];
  }
};

struct Peak {
  size_t theta_idx = 0, phi_idx = 0;
  double theta_deg = 0.0, phi_deg = 0.0;
  double value_db = 0.0;
};

struct Hpbw {
  double theta_width_deg = 0.0;
  double phi_width_deg = 0.0;
};

// EIRP pattern of one codeword: per layer and polarization the complex
// element fields add, polarization and layer powers add.
RadiationPattern pattern_for_pm(const ElementLayout& layout,
                                const PrecodingMatrix& pm,
                                const AngularGrid& grid);

// Wide beam from the first (leftmost) column of subarrays, both
// polarizations, steered element by element toward the given direction.
RadiationPattern pattern_for_ssb(const ElementLayout& layout,
                                 double steer_theta_deg, double steer_phi_deg,
                                 const AngularGrid& grid);

// Pointwise linear-power mean of patterns sharing one grid.
RadiationPattern average_pattern(
    const std::vector<const RadiationPattern*>& patterns);

// Grid argmax; ties resolve toward smaller |theta|, then smaller |phi|,
// then smaller index.
Peak find_peak(const RadiationPattern& pattern);

// Width of the contiguous -3 dB region around the peak along the two
// principal cuts. A cut whose samples never drop 3 dB below the peak has no
// width: throws std::runtime_error. A side that never crosses before the
// grid edge extends to that edge.
Hpbw hpbw_of(const RadiationPattern& pattern, const Peak& peak);

// Bilinear interpolation on the dB grid; throws std::domain_error outside
// the grid's angular coverage.
double eirp_at(const RadiationPattern& pattern, double theta_deg,
               double phi_deg);

// Shift so the peak sits at 0 dB.
void normalize_to_peak(RadiationPattern& pattern);

// Composite of a pattern with a normalized mask: dB addition, refloored.
RadiationPattern masked_pattern(const RadiationPattern& base,
                                const RadiationPattern& mask);

struct SsbBeam {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

// Eight wide beams on three elevation rings (3 + 3 + 2).
std::vector<SsbBeam> ssb_preset_332();

struct PmSummary {
  double peak_db = 0.0;
  double peak_theta_deg = 0.0, peak_phi_deg = 0.0;
  size_t peak_theta_idx = 0, peak_phi_idx = 0;
  std::optional<Hpbw> hpbw;  // empty when a cut never drops 3 dB
};

enum class CutAxis {
  Elevation,  // sweep theta at fixed phi
  Azimuth     // sweep phi at fixed theta
};

// EIRP patterns of a whole codebook over one grid. Codewords decompose into
// per-column DFT beams whose powers add (polarization co-phasing does not
// move power between polarizations), so the stack stores one power map per
// distinct beam instead of one grid per codeword.
class PatternStack {
 public:
  PatternStack(const ElementLayout& layout, const Codebook& codebook,
               const AngularGrid& grid, int threads = 0);

  size_t size() const { return pm_beams_.size(); }
  const AngularGrid& grid() const { return grid_; }

  // mask arguments accept nullptr (no mask) or a pattern on the same grid
  // whose dB values multiply in (SSB-PM composite).
  double global_max_db(const RadiationPattern* mask = nullptr) const;
  RadiationPattern average(const RadiationPattern* mask = nullptr) const;
  RadiationPattern pattern(size_t pm_index) const;
  // Absolute dB at one direction (bilinear).
  double value_at(size_t pm_index, double theta_deg, double phi_deg,
                  const RadiationPattern* mask = nullptr) const;
  PmSummary summary(size_t pm_index,
                    const RadiationPattern* mask = nullptr) const;
  // Summaries of every codeword; cheaper than per-index calls under a mask.
  std::vector<PmSummary> summaries(const RadiationPattern* mask = nullptr,
                                   int threads = 0) const;
  // dB values along a grid cut of one codeword's pattern.
  std::vector<double> cut_values(size_t pm_index, CutAxis axis,
                                 size_t fixed_index,
                                 const RadiationPattern* mask = nullptr) const;
  const std::vector<double>& cut_angles(CutAxis axis) const;

 private:
  double node_db(size_t pm_index, size_t dir,
                 const std::vector<double>* mask_db) const;
  PmSummary compute_summary(size_t pm_index,
                            const std::vector<double>* mask_linear,
                            const std::vector<double>* mask_db) const;
  const std::vector<double>* mask_values(const RadiationPattern* mask) const;

  AngularGrid grid_;
  double column_scale_ = 0.0;  // squared codeword entry magnitude, 1/(ports*rank)
  std::vector<std::array<int, 2>> pm_beams_;  // per codeword: beam map per column, -1 unused
  std::vector<std::vector<double>> beam_power_;  // linear, unscaled
  std::vector<PmSummary> summaries_;             // unmasked
  bool summaries_ready_ = false;
  double global_max_db_ = kEirpFloorDb;
  std::vector<double> average_linear_;
};

}  // namespace beamnull

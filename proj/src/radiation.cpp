// SPDX-License-Identifier: Apache-2.0
#include "radiation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "errors.hpp"
#include "threading.hpp"

namespace beamnull {

namespace {

constexpr double kFloorLinear = 1e-10;  // 10^(kEirpFloorDb / 10)
constexpr double kDegToRad = std::numbers::pi / 180.0;

double theta_of(const std::array<double, 3>& u) {
  return std::asin(std::clamp(u[2], -1.0, 1.0)) / kDegToRad;
}
double phi_of(const std::array<double, 3>& u) {
  return std::atan2(u[1], u[0]) / kDegToRad;
}

// Per-port complex responses with the element gain amplitude and the uniform
// in-phase subarray combining weight folded in. Phase factors are built once
// per distinct coordinate along each axis.
class PortResponse {
 public:
  explicit PortResponse(const ElementLayout& layout) : layout_(layout) {
    std::map<double, int> xs, ys, zs;
    for (const auto& e : layout.entries) {
      xs.emplace(e.position_m[0], 0);
      ys.emplace(e.position_m[1], 0);
      zs.emplace(e.position_m[2], 0);
    }
    auto number = [](std::map<double, int>& m, std::vector<double>& coords) {
      coords.reserve(m.size());
      for (auto& [coord, idx] : m) {
        idx = static_cast<int>(coords.size());
        coords.push_back(coord);
      }
    };
    number(xs, x_);
    number(ys, y_);
    number(zs, z_);
    elem_.reserve(layout.entries.size());
    for (const auto& e : layout.entries)
      elem_.push_back({xs[e.position_m[0]], ys[e.position_m[1]],
                       zs[e.position_m[2]], e.port});
    cx_.resize(x_.size());
    cy_.resize(y_.size());
    cz_.resize(z_.size());
    weight_ = 1.0 / std::sqrt(static_cast<double>(layout.elements_per_port));
    port_pol_.assign(layout.num_ports, 0);
    for (const auto& e : layout.entries)
      port_pol_[e.port] = static_cast<int>(e.polarization);
  }

  int port_polarization(int port) const { return port_pol_[port]; }

  void compute(double theta_deg, double phi_deg,
               std::complex<double>* resp) const {
    const auto u = apply_downtilt(unit_direction(theta_deg, phi_deg),
                                  layout_.downtilt_deg);
    double th = theta_deg, ph = phi_deg;
    if (layout_.downtilt_deg != 0.0) {
      th = theta_of(u);
      ph = phi_of(u);
    }
    const double gain_db = element_gain_dbi(layout_.element, th, ph);
    const double amp = weight_ * std::pow(10.0, gain_db / 20.0);
    const double k = 2.0 * std::numbers::pi / layout_.wavelength_m;
    for (size_t i = 0; i < x_.size(); ++i)
      cx_[i] = std::polar(amp, k * x_[i] * u[0]);
    for (size_t i = 0; i < y_.size(); ++i)
      cy_[i] = std::polar(1.0, k * y_[i] * u[1]);
    for (size_t i = 0; i < z_.size(); ++i)
      cz_[i] = std::polar(1.0, k * z_[i] * u[2]);
    std::fill(resp, resp + layout_.num_ports, std::complex<double>{});
    for (const auto& e : elem_)
      resp[e.port] += cx_[e.ix] * cy_[e.iy] * cz_[e.iz];
  }

 private:
  struct Elem {
    int ix, iy, iz, port;
  };
  const ElementLayout& layout_;
  std::vector<double> x_, y_, z_;
  std::vector<Elem> elem_;
  mutable std::vector<std::complex<double>> cx_, cy_, cz_;
  std::vector<int> port_pol_;
  double weight_ = 1.0;
};

double bilinear_db(const AngularGrid& grid, const std::vector<double>& values,
                   double theta_deg, double phi_deg) {
  const double res = grid.resolution_deg;
  const double eps = 1e-9 * res;
  if (theta_deg < grid.theta_deg.front() - eps ||
      theta_deg > grid.theta_deg.back() + eps ||
      phi_deg < grid.phi_deg.front() - eps ||
      phi_deg > grid.phi_deg.back() + eps)
    throw std::domain_error("query direction outside the pattern grid");
  auto cell = [&](const std::vector<double>& axis, double v) {
    const size_t n = axis.size();
    double t = (v - axis.front()) / res;
    size_t i0 = 0;
    if (t > 0.0 && n >= 2)
      i0 = std::min<size_t>(static_cast<size_t>(t), n - 2);
    const double f = std::clamp(t - static_cast<double>(i0), 0.0, 1.0);
    return std::pair<size_t, double>{i0, f};
  };
  const auto [it, ft] = cell(grid.theta_deg, theta_deg);
  const auto [ip, fp] = cell(grid.phi_deg, phi_deg);
  const size_t np = grid.num_phi();
  const size_t it1 = std::min(it + 1, grid.num_theta() - 1);
  const size_t ip1 = std::min(ip + 1, np - 1);
  const double v00 = values[it * np + ip], v01 = values[it * np + ip1];
  const double v10 = values[it1 * np + ip], v11 = values[it1 * np + ip1];
  return (v00 * (1 - fp) + v01 * fp) * (1 - ft) +
         (v10 * (1 - fp) + v11 * fp) * ft;
}

// Half-power width along one cut, or nullopt when no sample of the cut drops
// 3 dB below the peak. A side that never crosses extends to the grid edge.
std::optional<double> cut_width(const std::vector<double>& angles,
                                const std::vector<double>& values,
                                size_t peak_idx) {
  const double target = values[peak_idx] - 3.0;
  if (std::none_of(values.begin(), values.end(),
                   [&](double v) { return v < target; }))
    return std::nullopt;
  auto cross = [&](std::ptrdiff_t step) {
    const std::ptrdiff_t last =
        step > 0 ? static_cast<std::ptrdiff_t>(values.size()) - 1 : 0;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak_idx);
    while (i != last && values[i + step] >= target) i += step;
    if (i == last) return angles[last];
    return angles[i] + (angles[i + step] - angles[i]) * (values[i] - target) /
                           (values[i] - values[i + step]);
  };
  return cross(+1) - cross(-1);
}

}  // namespace

double db_from_linear(double power) {
  if (!(power > kFloorLinear)) return kEirpFloorDb;
  return 10.0 * std::log10(power);
}

AngularGrid AngularGrid::make(double theta_min_deg, double theta_max_deg,
                              double phi_min_deg, double phi_max_deg,
                              double resolution_deg) {
  if (!(resolution_deg > 0.0))
    throw std::invalid_argument("grid resolution must be positive");
  if (!(theta_min_deg < theta_max_deg) || !(phi_min_deg < phi_max_deg))
    throw std::invalid_argument("grid bounds must satisfy min < max");
  if (theta_min_deg < -90.0 || theta_max_deg > 90.0)
    throw std::domain_error("theta bounds outside [-90, 90] degrees");
  if (phi_min_deg < -180.0 || phi_max_deg > 180.0)
    throw std::domain_error("phi bounds outside [-180, 180] degrees");
  auto axis = [&](double lo, double hi) {
    const double steps = (hi - lo) / resolution_deg;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-6 * std::max(1.0, rounded))
      throw std::invalid_argument(
          "grid resolution must evenly divide the angular span");
    std::vector<double> v(static_cast<size_t>(rounded) + 1);
    for (size_t i = 0; i < v.size(); ++i) v[i] = lo + resolution_deg * i;
    v.back() = hi;
    return v;
  };
  AngularGrid g;
  g.resolution_deg = resolution_deg;
  g.theta_deg = axis(theta_min_deg, theta_max_deg);
  g.phi_deg = axis(phi_min_deg, phi_max_deg);
  return g;
}

AngularGrid AngularGrid::full_sphere(double resolution_deg) {
  return make(-90.0, 90.0, -180.0, 180.0, resolution_deg);
}

bool AngularGrid::matches(const AngularGrid& other) const {
  return theta_deg == other.theta_deg && phi_deg == other.phi_deg;
}

namespace {
size_t on_grid_index(const std::vector<double>& axis, double res,
                     double angle) {
  const double t = (angle - axis.front()) / res;
  const double r = std::round(t);
  if (r < 0.0 || r >= static_cast<double>(axis.size()) || std::abs(t - r) > 1e-6)
    throw std::invalid_argument("angle does not lie on the grid");
  return static_cast<size_t>(r);
}
}  // namespace

size_t AngularGrid::theta_index(double angle_deg) const {
  return on_grid_index(theta_deg, resolution_deg, angle_deg);
}

size_t AngularGrid::phi_index(double angle_deg) const {
  return on_grid_index(phi_deg, resolution_deg, angle_deg);
}

RadiationPattern pattern_for_pm(const ElementLayout& layout,
                                const PrecodingMatrix& pm,
                                const AngularGrid& grid) {
  if (pm.ports != layout.num_ports)
    throw std::invalid_argument("codeword port count does not match the panel");
  PortResponse pr(layout);
  RadiationPattern out;
  out.grid = grid;
  out.eirp_db.resize(grid.size());
  const size_t np = grid.num_phi();
  std::vector<std::complex<double>> resp(pm.ports);
  for (size_t it = 0; it < grid.num_theta(); ++it) {
    for (size_t ip = 0; ip < np; ++ip) {
      pr.compute(grid.theta_deg[it], grid.phi_deg[ip], resp.data());
      double eirp = 0.0;
      for (int layer = 0; layer < pm.rank; ++layer) {
        std::complex<double> f[2] = {};
        for (int p = 0; p < pm.ports; ++p)
          f[pr.port_polarization(p)] += resp[p] * pm.at(p, layer);
        eirp += std::norm(f[0]) + std::norm(f[1]);
      }
      out.eirp_db[it * np + ip] = db_from_linear(eirp);
    }
  }
  return out;
}

RadiationPattern pattern_for_ssb(const ElementLayout& layout,
                                 double steer_theta_deg, double steer_phi_deg,
                                 const AngularGrid& grid) {
  // Active aperture: every element of the leftmost subarray column.
  std::vector<size_t> active;
  for (size_t i = 0; i < layout.entries.size(); ++i)
    if (layout.entries[i].subarray_col == 0) active.push_back(i);
  if (active.empty()) throw std::invalid_argument("panel has no subarrays");

  const auto steer = steering_phases(layout, steer_theta_deg, steer_phi_deg);
  int per_pol[2] = {0, 0};
  for (size_t i : active)
    ++per_pol[static_cast<int>(layout.entries[i].polarization)];
  double scale[2];
  for (int pol = 0; pol < 2; ++pol)
    scale[pol] =
        per_pol[pol] > 0 ? 1.0 / std::sqrt(static_cast<double>(per_pol[pol]))
                         : 0.0;

  const double k = 2.0 * std::numbers::pi / layout.wavelength_m;
  RadiationPattern out;
  out.grid = grid;
  out.eirp_db.resize(grid.size());
  const size_t np = grid.num_phi();
  for (size_t it = 0; it < grid.num_theta(); ++it) {
    for (size_t ip = 0; ip < np; ++ip) {
      const auto u =
          apply_downtilt(unit_direction(grid.theta_deg[it], grid.phi_deg[ip]),
                         layout.downtilt_deg);
      double th = grid.theta_deg[it], ph = grid.phi_deg[ip];
      if (layout.downtilt_deg != 0.0) {
        th = theta_of(u);
        ph = phi_of(u);
      }
      const double amp =
          std::pow(10.0, element_gain_dbi(layout.element, th, ph) / 20.0);
      std::complex<double> f[2] = {};
      for (size_t i : active) {
        const auto& e = layout.entries[i];
        const double dot = e.position_m[0] * u[0] + e.position_m[1] * u[1] +
                           e.position_m[2] * u[2];
        const int pol = static_cast<int>(e.polarization);
        f[pol] += scale[pol] * std::conj(steer[i]) * std::polar(1.0, k * dot);
      }
      const double eirp = amp * amp * (std::norm(f[0]) + std::norm(f[1]));
      out.eirp_db[it * np + ip] = db_from_linear(eirp);
    }
  }
  return out;
}

RadiationPattern average_pattern(
    const std::vector<const RadiationPattern*>& patterns) {
  if (patterns.empty())
    throw std::invalid_argument("cannot average zero patterns");
  const AngularGrid& grid = patterns.front()->grid;
  for (const auto* p : patterns)
    if (!p->grid.matches(grid))
      throw std::invalid_argument("patterns do not share one grid");
  RadiationPattern out;
  out.grid = grid;
  out.eirp_db.resize(grid.size());
  const double inv = 1.0 / static_cast<double>(patterns.size());
  for (size_t d = 0; d < grid.size(); ++d) {
    double acc = 0.0;
    for (const auto* p : patterns) acc += std::pow(10.0, p->eirp_db[d] / 10.0);
    out.eirp_db[d] = db_from_linear(acc * inv);
  }
  return out;
}

Peak find_peak(const RadiationPattern& pattern) {
  const size_t np = pattern.grid.num_phi();
  Peak best;
  best.value_db = -std::numeric_limits<double>::infinity();
  for (size_t it = 0; it < pattern.grid.num_theta(); ++it) {
    for (size_t ip = 0; ip < np; ++ip) {
      const double v = pattern.eirp_db[it * np + ip];
      if (v < best.value_db) continue;
      const double th = pattern.grid.theta_deg[it];
      const double ph = pattern.grid.phi_deg[ip];
      if (v > best.value_db ||
          std::make_tuple(std::abs(th), std::abs(ph), it, ip) <
              std::make_tuple(std::abs(best.theta_deg), std::abs(best.phi_deg),
                              best.theta_idx, best.phi_idx))
        best = Peak{it, ip, th, ph, v};
    }
  }
  return best;
}

Hpbw hpbw_of(const RadiationPattern& pattern, const Peak& peak) {
  const size_t np = pattern.grid.num_phi();
  if (peak.theta_idx >= pattern.grid.num_theta() || peak.phi_idx >= np ||
      pattern.at(peak.theta_idx, peak.phi_idx) != peak.value_db)
    throw std::invalid_argument("peak does not belong to this pattern");

  std::vector<double> theta_cut(pattern.grid.num_theta());
  for (size_t it = 0; it < theta_cut.size(); ++it)
    theta_cut[it] = pattern.at(it, peak.phi_idx);
  std::vector<double> phi_cut(
      pattern.eirp_db.begin() + peak.theta_idx * np,
      pattern.eirp_db.begin() + (peak.theta_idx + 1) * np);

  const auto tw = cut_width(pattern.grid.theta_deg, theta_cut, peak.theta_idx);
  const auto pw = cut_width(pattern.grid.phi_deg, phi_cut, peak.phi_idx);
  if (!tw || !pw)
    throw NoCrossingError(
        "half-power width undefined: a principal cut never drops 3 dB");
  return Hpbw{*tw, *pw};
}

double eirp_at(const RadiationPattern& pattern, double theta_deg,
               double phi_deg) {
  return bilinear_db(pattern.grid, pattern.eirp_db, theta_deg, phi_deg);
}

void normalize_to_peak(RadiationPattern& pattern) {
  const Peak p = find_peak(pattern);
  for (double& v : pattern.eirp_db) v -= p.value_db;
}

RadiationPattern masked_pattern(const RadiationPattern& base,
                                const RadiationPattern& mask) {
  if (!base.grid.matches(mask.grid))
    throw std::invalid_argument("mask grid does not match the pattern grid");
  RadiationPattern out;
  out.grid = base.grid;
  out.eirp_db.resize(base.eirp_db.size());
  for (size_t d = 0; d < base.eirp_db.size(); ++d)
    out.eirp_db[d] = std::max(base.eirp_db[d] + mask.eirp_db[d], kEirpFloorDb);
  return out;
}

std::vector<SsbBeam> ssb_preset_332() {
  return {{6.0, -60.0}, {6.0, 0.5},    {6.0, 60.5}, {0.0, -60.0},
          {0.0, 0.5},   {0.0, 60.5},   {-3.0, -45.0}, {-3.0, 45.0}};
}

// ---------------------------------------------------------------------------
// PatternStack

PatternStack::PatternStack(const ElementLayout& layout,
                           const Codebook& codebook, const AngularGrid& grid,
                           int threads)
    : grid_(grid) {
  if (codebook.num_ports() != layout.num_ports)
    throw std::invalid_argument("codebook port count does not match the panel");
  const int rank = codebook.rank();
  const int ports = codebook.num_ports();
  const int half = ports / 2;
  column_scale_ = 1.0 / static_cast<double>(ports * rank);

  // Port index -> (polarization, horizontal a, vertical b) from the layout.
  std::vector<int> port_a(ports, -1), port_b(ports, -1), port_pol(ports, -1);
  int max_a = 0, max_b = 0;
  for (const auto& e : layout.entries) {
    port_a[e.port] = e.subarray_col;
    port_b[e.port] = e.subarray_row;
    port_pol[e.port] = static_cast<int>(e.polarization);
    max_a = std::max(max_a, e.subarray_col);
    max_b = std::max(max_b, e.subarray_row);
  }
  const int n1 = max_a + 1, n2 = max_b + 1;
  if (codebook.config().n1 != n1 || codebook.config().n2 != n2 ||
      n1 * n2 != half)
    throw std::invalid_argument(
        "codebook beam grid does not match the panel port layout");

  // Distinct DFT beams referenced by codeword columns.
  std::map<std::pair<int, int>, int> beam_index;
  pm_beams_.reserve(codebook.size());
  for (const auto& pm : codebook.entries()) {
    std::array<int, 2> ids = {-1, -1};
    for (int c = 0; c < pm.rank; ++c) {
      const auto key = std::make_pair(pm.column_beam[c].l, pm.column_beam[c].m);
      const auto [it, inserted] =
          beam_index.emplace(key, static_cast<int>(beam_index.size()));
      ids[c] = it->second;
    }
    pm_beams_.push_back(ids);
  }
  std::vector<std::pair<int, int>> beams(beam_index.size());
  for (const auto& [lm, idx] : beam_index) beams[static_cast<size_t>(idx)] = lm;

  const int o1 = codebook.config().oversampling_1();
  const int o2 = codebook.config().oversampling_2();
  const int mdim = n2 * o2;
  const size_t ndir = grid_.size();
  beam_power_.assign(beams.size(), std::vector<double>(ndir));

  // Phase tables of the separable beam transform; e_tab is laid out per b so
  // the inner accumulation walks contiguous memory.
  std::vector<std::complex<double>> h_tab(static_cast<size_t>(n1 * o1) * n1);
  for (int l = 0; l < n1 * o1; ++l)
    for (int a = 0; a < n1; ++a)
      h_tab[static_cast<size_t>(l) * n1 + a] = std::polar(
          1.0, 2.0 * std::numbers::pi * static_cast<double>(l) * a / (o1 * n1));
  std::vector<std::complex<double>> e_tab(static_cast<size_t>(n2) * mdim);
  for (int b = 0; b < n2; ++b)
    for (int m = 0; m < mdim; ++m)
      e_tab[static_cast<size_t>(b) * mdim + m] = std::polar(
          1.0, 2.0 * std::numbers::pi * static_cast<double>(m) * b / (o2 * n2));

  const size_t np = grid_.num_phi();
  parallel_chunks(grid_.num_theta(), threads, [&](size_t t0, size_t t1) {
    PortResponse pr(layout);
    std::vector<std::complex<double>> resp(ports);
    std::vector<std::complex<double>> T(static_cast<size_t>(2 * n1) * mdim);
    for (size_t it = t0; it < t1; ++it) {
      for (size_t ip = 0; ip < np; ++ip) {
        const size_t d = it * np + ip;
        pr.compute(grid_.theta_deg[it], grid_.phi_deg[ip], resp.data());
        std::fill(T.begin(), T.end(), std::complex<double>{});
        for (int p = 0; p < ports; ++p) {
          const std::complex<double> r = resp[p];
          std::complex<double>* row =
              &T[(static_cast<size_t>(port_pol[p]) * n1 + port_a[p]) * mdim];
          const std::complex<double>* e_row =
              &e_tab[static_cast<size_t>(port_b[p]) * mdim];
          for (int m = 0; m < mdim; ++m) row[m] += r * e_row[m];
        }
        for (size_t bi = 0; bi < beams.size(); ++bi) {
          const int l = beams[bi].first, m = beams[bi].second;
          double power = 0.0;
          for (int pol = 0; pol < 2; ++pol) {
            std::complex<double> f{};
            const std::complex<double>* h_row =
                &h_tab[static_cast<size_t>(l) * n1];
            for (int a = 0; a < n1; ++a)
              f += h_row[a] * T[(static_cast<size_t>(pol) * n1 + a) * mdim + m];
            power += std::norm(f);
          }
          beam_power_[bi][d] = power;
        }
      }
    }
  });

  // Per-codeword peak summaries; parallel over codewords, each summary a
  // pure function of its codeword.
  summaries_.resize(pm_beams_.size());
  parallel_chunks(pm_beams_.size(), threads, [&](size_t p0, size_t p1) {
    for (size_t pm = p0; pm < p1; ++pm)
      summaries_[pm] = compute_summary(pm, nullptr, nullptr);
  });
  summaries_ready_ = true;
  for (const auto& s : summaries_)
    global_max_db_ = std::max(global_max_db_, s.peak_db);

  // Average of the floored per-codeword patterns. Single accumulation pass
  // in codeword order so the result never depends on the thread count.
  average_linear_.assign(ndir, 0.0);
  for (size_t pm = 0; pm < pm_beams_.size(); ++pm) {
    const auto& ids = pm_beams_[pm];
    const double* pa = beam_power_[ids[0]].data();
    const double* pb = ids[1] >= 0 ? beam_power_[ids[1]].data() : nullptr;
    for (size_t d = 0; d < ndir; ++d) {
      double p = pa[d];
      if (pb != nullptr) p += pb[d];
      average_linear_[d] += std::max(p * column_scale_, kFloorLinear);
    }
  }
  const double inv = 1.0 / static_cast<double>(pm_beams_.size());
  for (double& v : average_linear_) v *= inv;
}

const std::vector<double>* PatternStack::mask_values(
    const RadiationPattern* mask) const {
  if (mask == nullptr) return nullptr;
  if (!mask->grid.matches(grid_))
    throw std::invalid_argument("mask grid does not match the stack grid");
  return &mask->eirp_db;
}

double PatternStack::node_db(size_t pm_index, size_t dir,
                             const std::vector<double>* mask_db) const {
  const auto& ids = pm_beams_[pm_index];
  double p = beam_power_[ids[0]][dir];
  if (ids[1] >= 0) p += beam_power_[ids[1]][dir];
  double v = db_from_linear(p * column_scale_);
  if (mask_db != nullptr) v = std::max(v + (*mask_db)[dir], kEirpFloorDb);
  return v;
}

PmSummary PatternStack::compute_summary(
    size_t pm_index, const std::vector<double>* mask_linear,
    const std::vector<double>* mask_db) const {
  const size_t np = grid_.num_phi();
  const auto& ids = pm_beams_[pm_index];
  const double* pa = beam_power_[ids[0]].data();
  const double* pb = ids[1] >= 0 ? beam_power_[ids[1]].data() : nullptr;

  // Arg-max scan in the linear domain; the floor and any mask are monotone
  // in dB, so the dB arg-max is identical.
  PmSummary s;
  double best = -1.0;
  for (size_t it = 0; it < grid_.num_theta(); ++it) {
    for (size_t ip = 0; ip < np; ++ip) {
      const size_t d = it * np + ip;
      double p = pa[d];
      if (pb != nullptr) p += pb[d];
      p = std::max(p * column_scale_, kFloorLinear);
      if (mask_linear != nullptr)
        p = std::max(p * (*mask_linear)[d], kFloorLinear);
      if (p < best) continue;
      const double th = grid_.theta_deg[it], ph = grid_.phi_deg[ip];
      if (p > best ||
          std::make_tuple(std::abs(th), std::abs(ph), it, ip) <
              std::make_tuple(std::abs(s.peak_theta_deg),
                              std::abs(s.peak_phi_deg), s.peak_theta_idx,
                              s.peak_phi_idx)) {
        best = p;
        s.peak_theta_deg = th;
        s.peak_phi_deg = ph;
        s.peak_theta_idx = it;
        s.peak_phi_idx = ip;
      }
    }
  }
  s.peak_db = node_db(pm_index, s.peak_theta_idx * np + s.peak_phi_idx,
                      mask_db);

  std::vector<double> theta_cut(grid_.num_theta());
  for (size_t it = 0; it < theta_cut.size(); ++it)
    theta_cut[it] = node_db(pm_index, it * np + s.peak_phi_idx, mask_db);
  std::vector<double> phi_cut(np);
  for (size_t ip = 0; ip < np; ++ip)
    phi_cut[ip] = node_db(pm_index, s.peak_theta_idx * np + ip, mask_db);
  const auto tw = cut_width(grid_.theta_deg, theta_cut, s.peak_theta_idx);
  const auto pw = cut_width(grid_.phi_deg, phi_cut, s.peak_phi_idx);
  if (tw && pw) s.hpbw = Hpbw{*tw, *pw};
  return s;
}

double PatternStack::global_max_db(const RadiationPattern* mask) const {
  const auto* mdb = mask_values(mask);
  if (mdb == nullptr) return global_max_db_;
  // max over codewords in linear power, masked per direction at the end.
  std::vector<double> max_lin(grid_.size(), 0.0);
  for (size_t pm = 0; pm < pm_beams_.size(); ++pm) {
    const auto& ids = pm_beams_[pm];
    const double* pa = beam_power_[ids[0]].data();
    const double* pb = ids[1] >= 0 ? beam_power_[ids[1]].data() : nullptr;
    for (size_t d = 0; d < max_lin.size(); ++d) {
      double p = pa[d];
      if (pb != nullptr) p += pb[d];
      if (p > max_lin[d]) max_lin[d] = p;
    }
  }
  double best = kEirpFloorDb;
  for (size_t d = 0; d < max_lin.size(); ++d) {
    const double v = std::max(
        db_from_linear(max_lin[d] * column_scale_) + (*mdb)[d], kEirpFloorDb);
    best = std::max(best, v);
  }
  return best;
}

RadiationPattern PatternStack::average(const RadiationPattern* mask) const {
  const auto* mdb = mask_values(mask);
  RadiationPattern out;
  out.grid = grid_;
  out.eirp_db.resize(grid_.size());
  if (mdb == nullptr) {
    for (size_t d = 0; d < grid_.size(); ++d)
      out.eirp_db[d] = db_from_linear(average_linear_[d]);
    return out;
  }
  // With a mask the per-codeword floor no longer factors out; average the
  // masked, floored patterns directly. Codeword order keeps it deterministic.
  std::vector<double> acc(grid_.size(), 0.0);
  std::vector<double> mask_lin(grid_.size());
  for (size_t d = 0; d < grid_.size(); ++d)
    mask_lin[d] = std::pow(10.0, (*mdb)[d] / 10.0);
  for (size_t pm = 0; pm < pm_beams_.size(); ++pm) {
    const auto& ids = pm_beams_[pm];
    const double* pa = beam_power_[ids[0]].data();
    const double* pb = ids[1] >= 0 ? beam_power_[ids[1]].data() : nullptr;
    for (size_t d = 0; d < acc.size(); ++d) {
      double p = pa[d];
      if (pb != nullptr) p += pb[d];
      p = std::max(p * column_scale_, kFloorLinear) * mask_lin[d];
      acc[d] += std::max(p, kFloorLinear);
    }
  }
  const double inv = 1.0 / static_cast<double>(pm_beams_.size());
  for (size_t d = 0; d < grid_.size(); ++d)
    out.eirp_db[d] = db_from_linear(acc[d] * inv);
  return out;
}

RadiationPattern PatternStack::pattern(size_t pm_index) const {
  if (pm_index >= pm_beams_.size())
    throw std::invalid_argument("codeword index out of range");
  RadiationPattern out;
  out.grid = grid_;
  out.eirp_db.resize(grid_.size());
  for (size_t d = 0; d < grid_.size(); ++d)
    out.eirp_db[d] = node_db(pm_index, d, nullptr);
  return out;
}

double PatternStack::value_at(size_t pm_index, double theta_deg,
                              double phi_deg,
                              const RadiationPattern* mask) const {
  if (pm_index >= pm_beams_.size())
    throw std::invalid_argument("codeword index out of range");
  const auto* mdb = mask_values(mask);
  const AngularGrid& g = grid_;
  const double eps = 1e-9 * g.resolution_deg;
  if (theta_deg < g.theta_deg.front() - eps ||
      theta_deg > g.theta_deg.back() + eps ||
      phi_deg < g.phi_deg.front() - eps || phi_deg > g.phi_deg.back() + eps)
    throw std::domain_error("query direction outside the pattern grid");
  auto cell = [&](const std::vector<double>& axis, double v) {
    const size_t n = axis.size();
    double t = (v - axis.front()) / g.resolution_deg;
    size_t i0 = 0;
    if (t > 0.0 && n >= 2)
      i0 = std::min<size_t>(static_cast<size_t>(t), n - 2);
    const double f = std::clamp(t - static_cast<double>(i0), 0.0, 1.0);
    return std::pair<size_t, double>{i0, f};
  };
  const auto [it, ft] = cell(g.theta_deg, theta_deg);
  const auto [ip, fp] = cell(g.phi_deg, phi_deg);
  const size_t np = g.num_phi();
  const size_t it1 = std::min(it + 1, g.num_theta() - 1);
  const size_t ip1 = std::min(ip + 1, np - 1);
  const double v00 = node_db(pm_index, it * np + ip, mdb);
  const double v01 = node_db(pm_index, it * np + ip1, mdb);
  const double v10 = node_db(pm_index, it1 * np + ip, mdb);
  const double v11 = node_db(pm_index, it1 * np + ip1, mdb);
  return (v00 * (1 - fp) + v01 * fp) * (1 - ft) +
         (v10 * (1 - fp) + v11 * fp) * ft;
}

PmSummary PatternStack::summary(size_t pm_index,
                                const RadiationPattern* mask) const {
  if (pm_index >= pm_beams_.size())
    throw std::invalid_argument("codeword index out of range");
  if (mask == nullptr && summaries_ready_) return summaries_[pm_index];
  const auto* mdb = mask_values(mask);
  if (mdb == nullptr) return compute_summary(pm_index, nullptr, nullptr);
  std::vector<double> mask_lin(mdb->size());
  for (size_t d = 0; d < mdb->size(); ++d)
    mask_lin[d] = std::pow(10.0, (*mdb)[d] / 10.0);
  return compute_summary(pm_index, &mask_lin, mdb);
}

std::vector<PmSummary> PatternStack::summaries(const RadiationPattern* mask,
                                               int threads) const {
  if (mask == nullptr && summaries_ready_) return summaries_;
  const auto* mdb = mask_values(mask);
  std::vector<double> mask_lin;
  if (mdb != nullptr) {
    mask_lin.resize(mdb->size());
    for (size_t d = 0; d < mdb->size(); ++d)
      mask_lin[d] = std::pow(10.0, (*mdb)[d] / 10.0);
  }
  std::vector<PmSummary> out(pm_beams_.size());
  parallel_chunks(pm_beams_.size(), threads, [&](size_t p0, size_t p1) {
    for (size_t pm = p0; pm < p1; ++pm)
      out[pm] = compute_summary(pm, mdb != nullptr ? &mask_lin : nullptr, mdb);
  });
  return out;
}

std::vector<double> PatternStack::cut_values(
    size_t pm_index, CutAxis axis, size_t fixed_index,
    const RadiationPattern* mask) const {
  if (pm_index >= pm_beams_.size())
    throw std::invalid_argument("codeword index out of range");
  const auto* mdb = mask_values(mask);
  const size_t np = grid_.num_phi();
  if (axis == CutAxis::Elevation) {
    if (fixed_index >= np) throw std::invalid_argument("cut index out of range");
    std::vector<double> v(grid_.num_theta());
    for (size_t it = 0; it < v.size(); ++it)
      v[it] = node_db(pm_index, it * np + fixed_index, mdb);
    return v;
  }
  if (fixed_index >= grid_.num_theta())
    throw std::invalid_argument("cut index out of range");
  std::vector<double> v(np);
  for (size_t ip = 0; ip < np; ++ip)
    v[ip] = node_db(pm_index, fixed_index * np + ip, mdb);
  return v;
}

const std::vector<double>& PatternStack::cut_angles(CutAxis axis) const {
  return axis == CutAxis::Elevation ? grid_.theta_deg : grid_.phi_deg;
}

}  // namespace beamnull

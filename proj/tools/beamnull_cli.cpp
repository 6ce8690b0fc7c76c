// SPDX-License-Identifier: Apache-2.0
//
// beamnull command line: loads a sectioned key=value config file, drives the
// C library, and writes CSV/JSON artifacts. Every run also writes a
// provenance JSON (no timestamps, so identical runs are byte-identical).
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beamnull/beamnull.h"
#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- errors --

struct CliError {
  int exit_code;  // 2 config, 3 runtime
  std::string message;
};

[[noreturn]] void die_config(const std::string& msg) {
  throw CliError{2, msg};
}

[[noreturn]] void die_runtime(const std::string& msg) {
  throw CliError{3, msg};
}

// Library failures during argument/config handling are config errors;
// failures of a valid computation are runtime errors.
void check(bn_status st, const std::string& what) {
  if (st == BN_OK) return;
  const std::string msg = what + ": " + bn_last_error();
  switch (st) {
    case BN_ERR_INVALID_ARGUMENT:
    case BN_ERR_DOMAIN:
    case BN_ERR_CONFIG:
    case BN_ERR_UNSUPPORTED:
      die_config(msg);
    default:
      die_runtime(msg);
  }
}

// ------------------------------------------------------------ formatting --

std::string fmt_db(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

// --------------------------------------------------------------- config ---

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct ConfigFile {
  std::string path;
  std::string raw;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections;

  bool has(const std::string& section) const {
    return sections.count(section) != 0;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"panel",
       {"m1", "m2", "n1", "n2", "polarizations", "d_el_v_m", "d_el_h_m",
        "d_su_v_m", "d_su_h_m", "carrier_hz", "downtilt_deg",
        "element.gain_dbi", "element.hpbw_az_deg", "element.hpbw_el_deg",
        "element.front_to_back_db", "element.sla_db"}},
      {"codebook", {"n1", "n2", "o1", "o2", "rank"}},
      {"grid",
       {"theta_min_deg", "theta_max_deg", "phi_min_deg", "phi_max_deg",
        "resolution_deg"}},
      {"ssb", {"preset", "angles"}},
      {"nulling",
       {"target_theta_deg", "target_phi_deg", "epsilon_db", "algorithm",
        "hpbw_logic", "reference"}},
      {"channel", {"model", "delay_spread_ns", "doppler_hz", "correlation"}},
      {"link",
       {"modulation", "n_layers", "n_tx", "n_rx", "n_subcarriers", "scs_hz",
        "snr_db", "n_drops", "policy", "csi", "pilot_spacing", "seed"}},
  };
  return schema;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die_config("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  ConfigFile cfg;
  cfg.path = path;
  cfg.raw = buf.str();

  const auto& schema = config_schema();
  std::istringstream lines(cfg.raw);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string at = path + ":" + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') die_config(at + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (schema.count(section) == 0)
        die_config(at + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) die_config(at + "expected key = value");
    if (section.empty()) die_config(at + "key outside any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) die_config(at + "empty key");
    if (schema.at(section).count(key) == 0)
      die_config(at + "unknown key '" + key + "' in [" + section + "]");
    auto& sec = cfg.sections[section];
    if (sec.count(key))
      die_config(at + "duplicate key '" + key + "' (first at line " +
                 std::to_string(sec[key].line) + ")");
    sec[key] = ConfigEntry{value, lineno};
  }
  return cfg;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class SectionReader {
 public:
  SectionReader(const ConfigFile& f, std::string name)
      : file_(&f), name_(std::move(name)) {
    auto it = f.sections.find(name_);
    kv_ = it != f.sections.end() ? &it->second : nullptr;
  }

  bool present() const { return kv_ != nullptr; }
  bool has(const std::string& key) const {
    return kv_ != nullptr && kv_->count(key) != 0;
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    if (!has(key)) return fallback;
    return kv_->at(key).value;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(kv_->at(key));
  }

  long long get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = kv_->at(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0')
      die_config(where(e) + "expected an integer, got '" + e.value + "'");
    return v;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const ConfigEntry& e = kv_->at(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0')
      die_config(where(e) + "expected an unsigned integer, got '" + e.value +
                 "'");
    return v;
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const ConfigEntry& e = kv_->at(key);
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) die_config(where(e) + "empty entry in list");
      out.push_back(parse_double(ConfigEntry{t, e.line}));
    }
    if (out.empty()) die_config(where(e) + "empty list");
    return out;
  }

  std::string where(const std::string& key) const {
    return has(key) ? where(kv_->at(key)) : file_->path + ": ";
  }

 private:
  std::string where(const ConfigEntry& e) const {
    return file_->path + ":" + std::to_string(e.line) + ": ";
  }

  double parse_double(const ConfigEntry& e) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (errno != 0 || end == e.value.c_str() || *end != '\0')
      die_config(where(e) + "expected a number, got '" + e.value + "'");
    return v;
  }

  const ConfigFile* file_;
  std::string name_;
  const std::map<std::string, ConfigEntry>* kv_;
};

// ----------------------------------------------------------- C API RAII ---

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      reset();
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  ~Handle() { reset(); }
  void reset() {
    if (ptr != nullptr) Destroy(ptr);
    ptr = nullptr;
  }
  T* get() const { return ptr; }
  T** out() {
    reset();
    return &ptr;
  }
};

using PanelHandle = Handle<bn_panel, bn_panel_destroy>;
using CodebookHandle = Handle<bn_codebook, bn_codebook_destroy>;
using PatternHandle = Handle<bn_pattern, bn_pattern_destroy>;
using StackHandle = Handle<bn_stack, bn_stack_destroy>;
using SubsetHandle = Handle<bn_subset, bn_subset_destroy>;

std::vector<double> pattern_values(const bn_pattern* p) {
  std::vector<double> v(bn_pattern_num_theta(p) * bn_pattern_num_phi(p));
  check(bn_pattern_values(p, v.data()), "pattern values");
  return v;
}

void pattern_axes(const bn_pattern* p, std::vector<double>& theta,
                  std::vector<double>& phi) {
  theta.resize(bn_pattern_num_theta(p));
  phi.resize(bn_pattern_num_phi(p));
  check(bn_pattern_axes(p, theta.data(), phi.data()), "pattern axes");
}

// ------------------------------------------------------------- settings ---

bn_panel_config make_panel_config(const ConfigFile& f) {
  bn_panel_config pc;
  bn_panel_config_default(&pc);
  SectionReader s(f, "panel");
  pc.m1 = static_cast<int>(s.get_int("m1", pc.m1));
  pc.m2 = static_cast<int>(s.get_int("m2", pc.m2));
  pc.n1 = static_cast<int>(s.get_int("n1", pc.n1));
  pc.n2 = static_cast<int>(s.get_int("n2", pc.n2));
  pc.polarizations =
      static_cast<int>(s.get_int("polarizations", pc.polarizations));
  pc.d_el_v_m = s.get_double("d_el_v_m", pc.d_el_v_m);
  pc.d_el_h_m = s.get_double("d_el_h_m", pc.d_el_h_m);
  pc.d_su_v_m = s.get_double("d_su_v_m", pc.d_su_v_m);
  pc.d_su_h_m = s.get_double("d_su_h_m", pc.d_su_h_m);
  pc.carrier_hz = s.get_double("carrier_hz", pc.carrier_hz);
  pc.downtilt_deg = s.get_double("downtilt_deg", pc.downtilt_deg);
  pc.element.max_gain_dbi =
      s.get_double("element.gain_dbi", pc.element.max_gain_dbi);
  pc.element.hpbw_az_deg =
      s.get_double("element.hpbw_az_deg", pc.element.hpbw_az_deg);
  pc.element.hpbw_el_deg =
      s.get_double("element.hpbw_el_deg", pc.element.hpbw_el_deg);
  pc.element.front_to_back_db =
      s.get_double("element.front_to_back_db", pc.element.front_to_back_db);
  pc.element.sla_db = s.get_double("element.sla_db", pc.element.sla_db);
  return pc;
}

bn_codebook_config make_codebook_config(const ConfigFile& f) {
  bn_codebook_config cc{4, 4, 0, 0, 2};
  SectionReader s(f, "codebook");
  cc.n1 = static_cast<int>(s.get_int("n1", cc.n1));
  cc.n2 = static_cast<int>(s.get_int("n2", cc.n2));
  cc.o1 = static_cast<int>(s.get_int("o1", cc.o1));
  cc.o2 = static_cast<int>(s.get_int("o2", cc.o2));
  cc.rank = static_cast<int>(s.get_int("rank", cc.rank));
  return cc;
}

bn_grid_spec make_grid_spec(const ConfigFile& f) {
  bn_grid_spec g;
  bn_grid_spec_default(&g);
  SectionReader s(f, "grid");
  g.theta_min_deg = s.get_double("theta_min_deg", g.theta_min_deg);
  g.theta_max_deg = s.get_double("theta_max_deg", g.theta_max_deg);
  g.phi_min_deg = s.get_double("phi_min_deg", g.phi_min_deg);
  g.phi_max_deg = s.get_double("phi_max_deg", g.phi_max_deg);
  g.resolution_deg = s.get_double("resolution_deg", g.resolution_deg);
  return g;
}

struct NullingSettings {
  bool present = false;
  std::optional<double> target_theta;
  std::optional<double> target_phi;
  double epsilon_db = -5.0;
  std::string algorithm = "threshold";
  std::string hpbw_logic = "and-exclude";
  std::string reference = "global-max";
};

NullingSettings make_nulling_settings(const ConfigFile& f) {
  NullingSettings n;
  SectionReader s(f, "nulling");
  n.present = s.present();
  if (s.has("target_theta_deg"))
    n.target_theta = s.get_double("target_theta_deg", 0.0);
  if (s.has("target_phi_deg"))
    n.target_phi = s.get_double("target_phi_deg", 0.0);
  n.epsilon_db = s.get_double("epsilon_db", n.epsilon_db);
  n.algorithm = s.get_string("algorithm", n.algorithm);
  n.hpbw_logic = s.get_string("hpbw_logic", n.hpbw_logic);
  n.reference = s.get_string("reference", n.reference);
  return n;
}

bn_reference parse_reference(const std::string& v, const std::string& at) {
  if (v == "absolute") return BN_REF_ABSOLUTE;
  if (v == "pattern-peak") return BN_REF_PATTERN_PEAK;
  if (v == "global-max") return BN_REF_GLOBAL_MAX;
  die_config(at + "reference must be absolute, pattern-peak or global-max");
}

bn_null_request make_null_request(const NullingSettings& n,
                                  const std::string& at) {
  if (!n.target_theta || !n.target_phi)
    die_config(at +
               "[nulling] needs target_theta_deg and target_phi_deg (or "
               "--target-el/--target-az)");
  bn_null_request req;
  req.target_theta_deg = *n.target_theta;
  req.target_phi_deg = *n.target_phi;
  req.epsilon_db = n.epsilon_db;
  if (n.algorithm == "threshold") {
    req.algorithm = BN_NULL_THRESHOLD;
  } else if (n.algorithm == "hpbw") {
    req.algorithm = BN_NULL_HPBW;
  } else {
    die_config(at + "algorithm must be threshold or hpbw");
  }
  if (n.hpbw_logic == "and-exclude") {
    req.hpbw_logic = BN_HPBW_AND_EXCLUDE;
  } else if (n.hpbw_logic == "or-exclude") {
    req.hpbw_logic = BN_HPBW_OR_EXCLUDE;
  } else {
    die_config(at + "hpbw_logic must be and-exclude or or-exclude");
  }
  req.reference = parse_reference(n.reference, at);
  return req;
}

std::string subset_label(const bn_null_request& req) {
  if (req.algorithm == BN_NULL_THRESHOLD)
    return "threshold_" + fmt_g6(req.epsilon_db) + "dB";
  return req.hpbw_logic == BN_HPBW_AND_EXCLUDE ? "hpbw_and-exclude"
                                               : "hpbw_or-exclude";
}

std::vector<std::pair<double, double>> make_ssb_beams(const ConfigFile& f) {
  SectionReader s(f, "ssb");
  if (!s.present()) return {};
  const bool has_preset = s.has("preset");
  const bool has_angles = s.has("angles");
  if (has_preset == has_angles)
    die_config(s.where(has_preset ? "preset" : "angles") +
               "[ssb] needs exactly one of preset or angles");
  std::vector<std::pair<double, double>> beams;
  if (has_preset) {
    const std::string name = s.get_string("preset", "");
    size_t count = 0;
    check(bn_ssb_preset(name.c_str(), nullptr, &count), "SSB preset");
    std::vector<double> angles(2 * count);
    check(bn_ssb_preset(name.c_str(), angles.data(), &count), "SSB preset");
    for (size_t i = 0; i < count; ++i)
      beams.emplace_back(angles[2 * i], angles[2 * i + 1]);
    return beams;
  }
  const std::string raw = s.get_string("angles", "");
  std::stringstream ss(raw);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    const std::string t = trim(pair);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos)
      die_config(s.where("angles") + "angles entries must be 'theta,phi'");
    char* end = nullptr;
    const std::string a = trim(t.substr(0, comma));
    const std::string b = trim(t.substr(comma + 1));
    const double th = std::strtod(a.c_str(), &end);
    if (end == a.c_str() || *end != '\0')
      die_config(s.where("angles") + "bad angle '" + a + "'");
    const double ph = std::strtod(b.c_str(), &end);
    if (end == b.c_str() || *end != '\0')
      die_config(s.where("angles") + "bad angle '" + b + "'");
    beams.emplace_back(th, ph);
  }
  if (beams.empty()) die_config(s.where("angles") + "no SSB beams given");
  return beams;
}

struct ChannelSettings {
  int model = BN_CHANNEL_TDL_C;
  double delay_spread_ns = 300.0;
};

ChannelSettings make_channel_settings(const ConfigFile& f) {
  ChannelSettings c;
  SectionReader s(f, "channel");
  const std::string model = s.get_string("model", "tdl-c");
  if (model == "tdl-c") {
    c.model = BN_CHANNEL_TDL_C;
  } else if (model == "awgn") {
    c.model = BN_CHANNEL_AWGN;
  } else {
    die_config(s.where("model") + "model must be tdl-c or awgn");
  }
  c.delay_spread_ns = s.get_double("delay_spread_ns", c.delay_spread_ns);
  const double doppler = s.get_double("doppler_hz", 0.0);
  if (doppler != 0.0)
    die_config(s.where("doppler_hz") +
               "only 0 Hz Doppler is supported (static channel per drop)");
  const std::string corr = s.get_string("correlation", "none");
  if (corr != "none")
    die_config(s.where("correlation") + "correlation must be none");
  return c;
}

struct LinkSettings {
  bn_link_config cfg;
  std::vector<double> snr_db;
  std::string policy_name = "pmi-full";
  std::string csi_name = "perfect";
};

LinkSettings make_link_settings(const ConfigFile& f, int default_n_tx,
                                int threads) {
  LinkSettings ls;
  bn_link_config_default(&ls.cfg);
  ls.cfg.n_tx = default_n_tx;
  SectionReader s(f, "link");
  const std::string mod = s.get_string("modulation", "16qam");
  if (mod == "16" || mod == "16qam") {
    ls.cfg.modulation_order = 16;
  } else if (mod == "64" || mod == "64qam") {
    ls.cfg.modulation_order = 64;
  } else if (mod == "256" || mod == "256qam") {
    ls.cfg.modulation_order = 256;
  } else {
    die_config(s.where("modulation") +
               "modulation must be 16qam, 64qam or 256qam");
  }
  ls.cfg.n_layers = static_cast<int>(s.get_int("n_layers", ls.cfg.n_layers));
  ls.cfg.n_tx = static_cast<int>(s.get_int("n_tx", ls.cfg.n_tx));
  ls.cfg.n_rx = static_cast<int>(s.get_int("n_rx", ls.cfg.n_rx));
  ls.cfg.n_subcarriers =
      static_cast<int>(s.get_int("n_subcarriers", ls.cfg.n_subcarriers));
  ls.cfg.scs_hz = s.get_double("scs_hz", ls.cfg.scs_hz);
  ls.cfg.pilot_spacing =
      static_cast<int>(s.get_int("pilot_spacing", ls.cfg.pilot_spacing));
  ls.cfg.n_drops = static_cast<int>(s.get_int("n_drops", ls.cfg.n_drops));
  ls.cfg.seed = s.get_u64("seed", ls.cfg.seed);
  ls.cfg.threads = threads;
  ls.policy_name = s.get_string("policy", ls.policy_name);
  if (ls.policy_name == "svd") {
    ls.cfg.policy = BN_PRECODER_SVD;
  } else if (ls.policy_name == "pmi-full") {
    ls.cfg.policy = BN_PRECODER_PMI_FULL;
  } else if (ls.policy_name == "pmi-subset") {
    ls.cfg.policy = BN_PRECODER_PMI_SUBSET;
  } else {
    die_config(s.where("policy") + "policy must be svd, pmi-full or pmi-subset");
  }
  ls.csi_name = s.get_string("csi", ls.csi_name);
  if (ls.csi_name == "perfect") {
    ls.cfg.csi = BN_CSI_PERFECT;
  } else if (ls.csi_name == "estimated") {
    ls.cfg.csi = BN_CSI_ESTIMATED;
  } else {
    die_config(s.where("csi") + "csi must be perfect or estimated");
  }
  ls.snr_db = s.get_double_list("snr_db");
  if (ls.snr_db.empty())
    die_config(s.where("snr_db") + "[link] needs an snr_db list");
  return ls;
}

// -------------------------------------------------------------- outputs ---

// Artifacts written by a failed run are removed so no partial files remain.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) die_runtime("cannot create output directory: " + dir_.string());
  }

  ~OutputSet() {
    if (committed_) return;
    for (const fs::path& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) die_runtime("cannot write " + p.string());
    written_.push_back(p);
    names_.push_back(name);
    return out;
  }

  const std::vector<std::string>& names() const { return names_; }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

struct Ctx {
  ConfigFile config;
  fs::path out_dir;
  int threads = 0;
  ordered_json options;  // subcommand flags for the provenance record
};

void write_provenance(Ctx& ctx, OutputSet& outputs,
                      const std::string& subcommand) {
  ordered_json j;
  j["tool"] = "beamnull";
  j["version"] = bn_version();
  j["subcommand"] = subcommand;
  j["config_file"] = ctx.config.path;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(ctx.config.raw)));
  j["config_fnv1a64"] = hash;
  j["threads"] = ctx.threads;
  j["options"] = ctx.options;
  j["outputs"] = outputs.names();
  std::ofstream out = outputs.open(subcommand + ".provenance.json");
  out << j.dump(2) << "\n";
  if (!out.good()) die_runtime("failed writing provenance");
}

void write_pattern_csv(std::ofstream& out, const bn_pattern* p) {
  std::vector<double> theta, phi;
  pattern_axes(p, theta, phi);
  const std::vector<double> values = pattern_values(p);
  out << "theta_deg,phi_deg,eirp_db\n";
  for (size_t it = 0; it < theta.size(); ++it)
    for (size_t ip = 0; ip < phi.size(); ++ip)
      out << fmt_g6(theta[it]) << ',' << fmt_g6(phi[ip]) << ','
          << fmt_db(values[it * phi.size() + ip]) << '\n';
  if (!out.good()) die_runtime("failed writing pattern CSV");
}

// ------------------------------------------------------- shared builders --

PanelHandle build_panel(const Ctx& ctx) {
  const bn_panel_config pc = make_panel_config(ctx.config);
  PanelHandle panel;
  check(bn_panel_create(&pc, panel.out()), "panel");
  return panel;
}

CodebookHandle build_codebook(const Ctx& ctx) {
  const bn_codebook_config cc = make_codebook_config(ctx.config);
  CodebookHandle cb;
  check(bn_codebook_create(&cc, cb.out()), "codebook");
  return cb;
}

StackHandle build_stack(const Ctx& ctx, const PanelHandle& panel,
                        const CodebookHandle& cb) {
  const bn_grid_spec grid = make_grid_spec(ctx.config);
  StackHandle stack;
  check(bn_stack_compute(panel.get(), cb.get(), &grid, ctx.threads,
                         stack.out()),
        "pattern stack");
  return stack;
}

// Normalized SSB masks over the configured grid.
std::vector<PatternHandle> build_ssb_masks(
    const Ctx& ctx, const PanelHandle& panel,
    const std::vector<std::pair<double, double>>& beams) {
  const bn_grid_spec grid = make_grid_spec(ctx.config);
  std::vector<PatternHandle> masks;
  masks.reserve(beams.size());
  for (const auto& [th, ph] : beams) {
    PatternHandle p;
    check(bn_pattern_for_ssb(panel.get(), th, ph, &grid, p.out()),
          "SSB pattern");
    check(bn_pattern_normalize(p.get()), "SSB normalization");
    masks.push_back(std::move(p));
  }
  return masks;
}

std::vector<size_t> subset_indices(const bn_subset* sub) {
  std::vector<size_t> idx(bn_subset_size(sub));
  if (!idx.empty())
    check(bn_subset_indices(sub, idx.data()), "subset indices");
  return idx;
}

// --------------------------------------------------------- subcommands ----

int cmd_codebook(Ctx& ctx) {
  CodebookHandle cb = build_codebook(ctx);
  const size_t n = bn_codebook_size(cb.get());
  const size_t ports = static_cast<size_t>(bn_codebook_num_ports(cb.get()));
  const size_t rank = static_cast<size_t>(bn_codebook_rank(cb.get()));

  OutputSet outputs(ctx.out_dir);
  std::ofstream out = outputs.open("codebook.jsonl");
  std::vector<double> w(2 * ports * rank);
  for (size_t i = 0; i < n; ++i) {
    bn_pm_indices idx;
    check(bn_codebook_entry(cb.get(), i, &idx, w.data()), "codebook entry");
    ordered_json j;
    j["index"] = i;
    j["i11"] = idx.i11;
    j["i12"] = idx.i12;
    j["i13"] = idx.i13;
    j["i2"] = idx.i2;
    j["ports"] = ports;
    j["rank"] = rank;
    j["w_reim"] = w;
    out << j.dump() << '\n';
  }
  if (!out.good()) die_runtime("failed writing codebook manifest");
  write_provenance(ctx, outputs, "codebook");
  outputs.commit();
  std::fprintf(stderr, "codebook: %zu codewords\n", n);
  return 0;
}

int cmd_pattern(Ctx& ctx, long long pm_index, std::optional<double> ssb_theta,
                std::optional<double> ssb_phi, bool normalize) {
  const bool want_pm = pm_index >= 0;
  const bool want_ssb = ssb_theta.has_value() || ssb_phi.has_value();
  if (want_pm == want_ssb)
    die_config("pattern needs exactly one of --pm-index or --ssb-theta/--ssb-phi");
  if (want_ssb && (!ssb_theta.has_value() || !ssb_phi.has_value()))
    die_config("SSB patterns need both --ssb-theta and --ssb-phi");

  PanelHandle panel = build_panel(ctx);
  const bn_grid_spec grid = make_grid_spec(ctx.config);
  PatternHandle pattern;
  if (want_pm) {
    CodebookHandle cb = build_codebook(ctx);
    check(bn_pattern_for_pm(panel.get(), cb.get(),
                            static_cast<size_t>(pm_index), &grid,
                            pattern.out()),
          "pattern");
  } else {
    check(bn_pattern_for_ssb(panel.get(), *ssb_theta, *ssb_phi, &grid,
                             pattern.out()),
          "SSB pattern");
  }
  if (normalize) check(bn_pattern_normalize(pattern.get()), "normalize");

  OutputSet outputs(ctx.out_dir);
  std::ofstream out = outputs.open("pattern.csv");
  write_pattern_csv(out, pattern.get());
  write_provenance(ctx, outputs, "pattern");
  outputs.commit();
  return 0;
}

int cmd_average_map(Ctx& ctx, bool ssb_associate) {
  PanelHandle panel = build_panel(ctx);
  CodebookHandle cb = build_codebook(ctx);
  StackHandle stack = build_stack(ctx, panel, cb);
  const auto beams = make_ssb_beams(ctx.config);
  if (ssb_associate && beams.empty())
    die_config("--ssb-associate needs an [ssb] section");

  OutputSet outputs(ctx.out_dir);
  std::ofstream out = outputs.open("average_map.csv");

  if (beams.empty()) {
    PatternHandle avg;
    check(bn_stack_average(stack.get(), nullptr, avg.out()), "average map");
    write_pattern_csv(out, avg.get());
  } else {
    std::vector<PatternHandle> masks = build_ssb_masks(ctx, panel, beams);
    std::vector<double> theta, phi;
    std::vector<double> acc;
    size_t groups = 0;
    for (const PatternHandle& mask : masks) {
      std::vector<double> vals;
      if (ssb_associate) {
        // Alternative composition: average only the codewords whose
        // (unmasked) peak falls inside this SSB's half-power box.
        double pth = 0, pph = 0, tw = 0, pw = 0;
        check(bn_pattern_peak(mask.get(), &pth, &pph, nullptr), "SSB peak");
        check(bn_pattern_hpbw(mask.get(), &tw, &pw), "SSB half-power width");
        std::vector<size_t> members;
        for (size_t i = 0; i < bn_stack_size(stack.get()); ++i) {
          double bt = 0, bp = 0;
          check(bn_stack_peak(stack.get(), i, nullptr, &bt, &bp, nullptr),
                "codeword peak");
          if (std::abs(bt - pth) <= tw / 2.0 && std::abs(bp - pph) <= pw / 2.0)
            members.push_back(i);
        }
        if (members.empty())
          die_runtime("an SSB beam associates no codewords; widen the grid "
                      "or use masking");
        std::vector<double> lin;
        for (const size_t i : members) {
          PatternHandle p;
          check(bn_stack_pattern(stack.get(), i, p.out()), "stack pattern");
          const std::vector<double> v = pattern_values(p.get());
          if (lin.empty()) {
            lin.assign(v.size(), 0.0);
            pattern_axes(p.get(), theta, phi);
          }
          for (size_t k = 0; k < v.size(); ++k)
            lin[k] += std::pow(10.0, v[k] / 10.0);
        }
        vals.resize(lin.size());
        for (size_t k = 0; k < lin.size(); ++k)
          vals[k] = std::max(
              10.0 * std::log10(lin[k] / static_cast<double>(members.size())),
              -100.0);
      } else {
        PatternHandle avg;
        check(bn_stack_average(stack.get(), mask.get(), avg.out()),
              "masked average");
        vals = pattern_values(avg.get());
        if (theta.empty()) pattern_axes(avg.get(), theta, phi);
      }
      if (acc.empty()) acc.assign(vals.size(), 0.0);
      for (size_t k = 0; k < vals.size(); ++k)
        acc[k] += std::pow(10.0, vals[k] / 10.0);
      ++groups;
    }
    out << "theta_deg,phi_deg,eirp_db\n";
    for (size_t it = 0; it < theta.size(); ++it)
      for (size_t ip = 0; ip < phi.size(); ++ip) {
        const double lin = acc[it * phi.size() + ip] / groups;
        out << fmt_g6(theta[it]) << ',' << fmt_g6(phi[ip]) << ','
            << fmt_db(std::max(10.0 * std::log10(lin), -100.0)) << '\n';
      }
    if (!out.good()) die_runtime("failed writing average map");
  }
  write_provenance(ctx, outputs, "average-map");
  outputs.commit();
  return 0;
}

void write_cdf_csv(std::ofstream& out, const std::vector<double>& values,
                   const std::vector<double>& probs) {
  out << "eirp_db,cum_prob\n";
  for (size_t i = 0; i < values.size(); ++i)
    out << fmt_db(values[i]) << ',' << fmt_g6(probs[i]) << '\n';
  if (!out.good()) die_runtime("failed writing CDF");
}

int cmd_cdf(Ctx& ctx) {
  PanelHandle panel = build_panel(ctx);
  CodebookHandle cb = build_codebook(ctx);
  StackHandle stack = build_stack(ctx, panel, cb);
  const NullingSettings ns = make_nulling_settings(ctx.config);
  const bn_null_request req = make_null_request(ns, ctx.config.path + ": ");
  const double th = req.target_theta_deg;
  const double ph = req.target_phi_deg;

  OutputSet outputs(ctx.out_dir);

  SubsetHandle full;
  check(bn_subset_full(stack.get(), full.out()), "full subset");
  const size_t n = bn_subset_size(full.get());
  std::vector<double> values(n), probs(n);
  check(bn_cdf_at(stack.get(), full.get(), nullptr, th, ph, req.reference,
                  values.data(), probs.data()),
        "full-set CDF");
  {
    std::ofstream out = outputs.open("cdf_full.csv");
    write_cdf_csv(out, values, probs);
  }

  SubsetHandle nulled;
  check(bn_null_select(stack.get(), nullptr, &req, nulled.out()), "selection");
  {
    std::ofstream out = outputs.open("cdf_nulled.csv");
    const size_t m = bn_subset_size(nulled.get());
    if (m == 0) {
      out << "eirp_db,cum_prob\n";
      if (!out.good()) die_runtime("failed writing CDF");
      std::fprintf(stderr, "warning: selection retained no codewords\n");
    } else {
      std::vector<double> v(m), p(m);
      check(bn_cdf_at(stack.get(), nulled.get(), nullptr, th, ph,
                      req.reference, v.data(), p.data()),
            "subset CDF");
      write_cdf_csv(out, v, p);
    }
  }

  const auto beams = make_ssb_beams(ctx.config);
  if (!beams.empty()) {
    // One population over all (SSB, codeword) pairs. Under the global-max
    // reference all values share the composite maximum.
    std::vector<PatternHandle> masks = build_ssb_masks(ctx, panel, beams);
    double gmax = -1e30;
    if (req.reference == BN_REF_GLOBAL_MAX) {
      for (const PatternHandle& mask : masks) {
        double g = 0;
        check(bn_stack_global_max(stack.get(), mask.get(), &g),
              "masked global max");
        gmax = std::max(gmax, g);
      }
    }
    std::vector<double> all;
    all.reserve(masks.size() * n);
    std::vector<double> v(n);
    for (const PatternHandle& mask : masks) {
      const bn_reference r = req.reference == BN_REF_GLOBAL_MAX
                                 ? BN_REF_ABSOLUTE
                                 : req.reference;
      check(bn_stack_values_at(stack.get(), mask.get(), th, ph, r, v.data()),
            "masked values");
      for (double x : v)
        all.push_back(req.reference == BN_REF_GLOBAL_MAX ? x - gmax : x);
    }
    std::sort(all.begin(), all.end());
    std::vector<double> p(all.size());
    for (size_t i = 0; i < all.size(); ++i)
      p[i] = static_cast<double>(i + 1) / static_cast<double>(all.size());
    std::ofstream out = outputs.open("cdf_ssb.csv");
    write_cdf_csv(out, all, p);
  }

  write_provenance(ctx, outputs, "cdf");
  outputs.commit();
  return 0;
}

int cmd_null(Ctx& ctx, const NullingSettings& ns) {
  PanelHandle panel = build_panel(ctx);
  CodebookHandle cb = build_codebook(ctx);
  StackHandle stack = build_stack(ctx, panel, cb);
  const bn_null_request req = make_null_request(ns, ctx.config.path + ": ");

  SubsetHandle sub;
  check(bn_null_select(stack.get(), nullptr, &req, sub.out()), "selection");
  SubsetHandle full;
  check(bn_subset_full(stack.get(), full.out()), "full subset");

  double median_full = 0;
  check(bn_subset_median_at(stack.get(), full.get(), nullptr,
                            req.target_theta_deg, req.target_phi_deg,
                            req.reference, &median_full),
        "full-set median");
  const size_t kept = bn_subset_size(sub.get());
  double median_subset = 0;
  if (kept > 0)
    check(bn_subset_median_at(stack.get(), sub.get(), nullptr,
                              req.target_theta_deg, req.target_phi_deg,
                              req.reference, &median_subset),
          "subset median");

  OutputSet outputs(ctx.out_dir);
  {
    ordered_json j;
    j["algorithm"] =
        req.algorithm == BN_NULL_THRESHOLD ? "threshold" : "hpbw";
    j["target_theta_deg"] = req.target_theta_deg;
    j["target_phi_deg"] = req.target_phi_deg;
    if (req.algorithm == BN_NULL_THRESHOLD) j["epsilon_db"] = req.epsilon_db;
    if (req.algorithm == BN_NULL_HPBW)
      j["hpbw_logic"] = req.hpbw_logic == BN_HPBW_AND_EXCLUDE ? "and-exclude"
                                                              : "or-exclude";
    j["reference"] = ns.reference;
    j["universe"] = bn_stack_size(stack.get());
    j["retained_count"] = kept;
    j["fraction"] = bn_subset_fraction(sub.get());
    j["empty_warning"] = bn_subset_empty_warning(sub.get()) != 0;
    if (req.algorithm == BN_NULL_HPBW)
      j["undefined_hpbw"] = bn_subset_undefined_hpbw(sub.get());
    j["retained"] = subset_indices(sub.get());
    std::ofstream out = outputs.open("subset.json");
    out << j.dump(2) << "\n";
    if (!out.good()) die_runtime("failed writing subset manifest");
  }
  {
    ordered_json j;
    j["fraction"] = bn_subset_fraction(sub.get());
    j["median_full_db"] = median_full;
    if (kept > 0) {
      j["median_subset_db"] = median_subset;
      j["reduction_db"] = median_full - median_subset;
    } else {
      j["median_subset_db"] = nullptr;
      j["reduction_db"] = nullptr;
    }
    j["empty_warning"] = bn_subset_empty_warning(sub.get()) != 0;
    std::ofstream out = outputs.open("null_summary.json");
    out << j.dump(2) << "\n";
    if (!out.good()) die_runtime("failed writing summary");
  }
  write_provenance(ctx, outputs, "null");
  outputs.commit();
  if (bn_subset_empty_warning(sub.get()))
    std::fprintf(stderr, "warning: selection retained no codewords\n");
  else
    std::fprintf(stderr, "null: retained %zu of %zu codewords\n", kept,
                 bn_stack_size(stack.get()));
  return 0;
}

int cmd_median_cut(Ctx& ctx, const std::string& axis_name,
                   std::optional<double> fixed_angle) {
  PanelHandle panel = build_panel(ctx);
  CodebookHandle cb = build_codebook(ctx);
  StackHandle stack = build_stack(ctx, panel, cb);
  const NullingSettings ns = make_nulling_settings(ctx.config);
  const bn_null_request req = make_null_request(ns, ctx.config.path + ": ");

  bn_cut_axis axis;
  if (axis_name == "elevation") {
    axis = BN_CUT_ELEVATION;
  } else if (axis_name == "azimuth") {
    axis = BN_CUT_AZIMUTH;
  } else {
    die_config("--axis must be elevation or azimuth");
  }
  const double fixed = fixed_angle.value_or(
      axis == BN_CUT_ELEVATION ? req.target_phi_deg : req.target_theta_deg);

  SubsetHandle full;
  check(bn_subset_full(stack.get(), full.out()), "full subset");
  const bn_grid_spec gs = make_grid_spec(ctx.config);
  const size_t axis_len =
      axis == BN_CUT_ELEVATION
          ? static_cast<size_t>(std::llround((gs.theta_max_deg -
                                              gs.theta_min_deg) /
                                             gs.resolution_deg)) + 1
          : static_cast<size_t>(std::llround((gs.phi_max_deg -
                                              gs.phi_min_deg) /
                                             gs.resolution_deg)) + 1;
  std::vector<double> angles(axis_len), medians(axis_len);
  size_t count = 0;
  check(bn_median_cut(stack.get(), full.get(), nullptr, axis, fixed,
                      req.reference, angles.data(), medians.data(), &count),
        "median cut");
  angles.resize(count);
  medians.resize(count);

  OutputSet outputs(ctx.out_dir);
  std::ofstream out = outputs.open("median_cut.csv");
  out << "angle_deg,median_db,scenario_label\n";
  for (size_t i = 0; i < count; ++i)
    out << fmt_g6(angles[i]) << ',' << fmt_db(medians[i]) << ",full\n";

  SubsetHandle sub;
  check(bn_null_select(stack.get(), nullptr, &req, sub.out()), "selection");
  if (bn_subset_size(sub.get()) > 0) {
    std::vector<double> m2(count);
    check(bn_median_cut(stack.get(), sub.get(), nullptr, axis, fixed,
                        req.reference, angles.data(), m2.data(), &count),
          "subset median cut");
    const std::string label = subset_label(req);
    for (size_t i = 0; i < count; ++i)
      out << fmt_g6(angles[i]) << ',' << fmt_db(m2[i]) << ',' << label << '\n';
  } else {
    std::fprintf(stderr, "warning: selection retained no codewords\n");
  }

  const auto beams = make_ssb_beams(ctx.config);
  if (!beams.empty()) {
    // Median over all (SSB, codeword) pairs at each cut angle.
    std::vector<PatternHandle> masks = build_ssb_masks(ctx, panel, beams);
    double gmax = -1e30;
    if (req.reference == BN_REF_GLOBAL_MAX) {
      for (const PatternHandle& mask : masks) {
        double g = 0;
        check(bn_stack_global_max(stack.get(), mask.get(), &g),
              "masked global max");
        gmax = std::max(gmax, g);
      }
    }
    const size_t n = bn_stack_size(stack.get());
    std::vector<double> v(n);
    std::vector<double> pool;
    pool.reserve(masks.size() * n);
    for (size_t i = 0; i < count; ++i) {
      const double th = axis == BN_CUT_ELEVATION ? angles[i] : fixed;
      const double ph = axis == BN_CUT_ELEVATION ? fixed : angles[i];
      pool.clear();
      for (const PatternHandle& mask : masks) {
        const bn_reference r = req.reference == BN_REF_GLOBAL_MAX
                                   ? BN_REF_ABSOLUTE
                                   : req.reference;
        check(
            bn_stack_values_at(stack.get(), mask.get(), th, ph, r, v.data()),
            "masked values");
        for (double x : v)
          pool.push_back(req.reference == BN_REF_GLOBAL_MAX ? x - gmax : x);
      }
      const size_t k = (pool.size() - 1) / 2;
      std::nth_element(pool.begin(), pool.begin() + k, pool.end());
      out << fmt_g6(angles[i]) << ',' << fmt_db(pool[k]) << ",ssb-pm\n";
    }
  }
  if (!out.good()) die_runtime("failed writing median cut");
  write_provenance(ctx, outputs, "median-cut");
  outputs.commit();
  return 0;
}

int cmd_ber(Ctx& ctx) {
  const ChannelSettings cs = make_channel_settings(ctx.config);
  CodebookHandle cb;
  SubsetHandle sub;
  int default_n_tx = 32;
  const SectionReader link_probe(ctx.config, "link");
  const std::string policy = link_probe.get_string("policy", "pmi-full");
  if (policy != "svd") {
    cb = build_codebook(ctx);
    default_n_tx = bn_codebook_num_ports(cb.get());
  }
  if (policy == "pmi-subset") {
    PanelHandle panel = build_panel(ctx);
    StackHandle stack = build_stack(ctx, panel, cb);
    const NullingSettings ns = make_nulling_settings(ctx.config);
    const bn_null_request req = make_null_request(ns, ctx.config.path + ": ");
    check(bn_null_select(stack.get(), nullptr, &req, sub.out()), "selection");
    if (bn_subset_size(sub.get()) == 0)
      die_runtime("selection retained no codewords; nothing to simulate");
    std::fprintf(stderr, "ber: subset retains %zu of %zu codewords\n",
                 bn_subset_size(sub.get()), bn_stack_size(stack.get()));
  }

  LinkSettings ls = make_link_settings(ctx.config, default_n_tx, ctx.threads);
  ls.cfg.channel_model = cs.model;
  ls.cfg.delay_spread_ns = cs.delay_spread_ns;

  std::vector<bn_ber_point> points(ls.snr_db.size());
  check(bn_run_ber(&ls.cfg, cb.get(), sub.get(), ls.snr_db.data(),
                   ls.snr_db.size(), points.data()),
        "BER simulation");

  OutputSet outputs(ctx.out_dir);
  std::ofstream out = outputs.open("ber.csv");
  out << "snr_db,ber,bit_errors,bits_total,policy,csi\n";
  for (const bn_ber_point& p : points)
    out << fmt_db(p.snr_db) << ',' << fmt_g6(p.ber) << ','
        << static_cast<unsigned long long>(p.bit_errors) << ','
        << static_cast<unsigned long long>(p.bits_total) << ','
        << ls.policy_name << ',' << ls.csi_name << '\n';
  if (!out.good()) die_runtime("failed writing BER CSV");
  write_provenance(ctx, outputs, "ber");
  outputs.commit();
  return 0;
}

// ------------------------------------------------------------------ main --

std::string default_out_dir() {
  const char* env = std::getenv("BEAMNULL_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antenna-array precoder patterns, beam nulling and downlink "
               "BER evaluation"};
  app.require_subcommand(1);

  struct Common {
    std::string config_path;
    std::string out_dir = default_out_dir();
    int threads = 0;
  };
  std::map<std::string, Common> common;
  auto add_common = [&](CLI::App* sub) {
    Common& c = common[sub->get_name()];
    sub->add_option("-c,--config", c.config_path, "config file")->required();
    sub->add_option("-o,--out", c.out_dir,
                    "output directory (default: BEAMNULL_OUT_DIR or .)");
    sub->add_option("--threads", c.threads,
                    "worker threads; <= 0 uses all cores (results do not "
                    "depend on this)");
  };

  CLI::App* sc_codebook =
      app.add_subcommand("codebook", "emit the codebook manifest");
  add_common(sc_codebook);

  CLI::App* sc_pattern =
      app.add_subcommand("pattern", "emit one codeword or SSB pattern");
  add_common(sc_pattern);
  long long pm_index = -1;
  double ssb_theta = 0, ssb_phi = 0;
  bool normalize = false;
  sc_pattern->add_option("--pm-index", pm_index, "codeword index");
  CLI::Option* opt_ssb_theta =
      sc_pattern->add_option("--ssb-theta", ssb_theta, "SSB steer elevation");
  CLI::Option* opt_ssb_phi =
      sc_pattern->add_option("--ssb-phi", ssb_phi, "SSB steer azimuth");
  sc_pattern->add_flag("--normalize", normalize, "peak at 0 dB");

  CLI::App* sc_average =
      app.add_subcommand("average-map", "average EIRP over the codebook");
  add_common(sc_average);
  bool ssb_associate = false;
  sc_average->add_flag(
      "--ssb-associate", ssb_associate,
      "associate codewords to SSBs by peak-in-half-power-box instead of "
      "masking");

  CLI::App* sc_cdf = app.add_subcommand(
      "cdf", "EIRP CDFs at the protected direction (full and nulled)");
  add_common(sc_cdf);

  CLI::App* sc_null =
      app.add_subcommand("null", "select a codeword subset away from a "
                                 "protected direction");
  add_common(sc_null);
  double f_target_el = 0, f_target_az = 0, f_eps = 0;
  std::string f_algorithm, f_logic;
  CLI::Option* opt_el =
      sc_null->add_option("--target-el", f_target_el, "protected elevation");
  CLI::Option* opt_az =
      sc_null->add_option("--target-az", f_target_az, "protected azimuth");
  CLI::Option* opt_eps =
      sc_null->add_option("--epsilon-db", f_eps, "threshold in dB");
  CLI::Option* opt_alg = sc_null->add_option("--algorithm", f_algorithm,
                                             "threshold or hpbw");
  CLI::Option* opt_logic = sc_null->add_option("--hpbw-logic", f_logic,
                                               "and-exclude or or-exclude");

  CLI::App* sc_cut = app.add_subcommand(
      "median-cut", "median EIRP along a grid cut for each scenario");
  add_common(sc_cut);
  std::string axis_name = "elevation";
  double fixed_angle = 0;
  sc_cut->add_option("--axis", axis_name, "elevation or azimuth");
  CLI::Option* opt_fixed = sc_cut->add_option(
      "--fixed-angle", fixed_angle,
      "fixed angle of the cut (default: the nulling target)");

  CLI::App* sc_ber =
      app.add_subcommand("ber", "Monte-Carlo uncoded BER over an SNR grid");
  add_common(sc_ber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Common& c = common[sub->get_name()];
  try {
    Ctx ctx{load_config(c.config_path), fs::path(c.out_dir), c.threads,
            ordered_json::object()};
    ctx.options["config"] = c.config_path;
    ctx.options["out"] = c.out_dir;

    if (sub == sc_codebook) return cmd_codebook(ctx);
    if (sub == sc_pattern) {
      ctx.options["pm_index"] = pm_index;
      if (opt_ssb_theta->count()) ctx.options["ssb_theta"] = ssb_theta;
      if (opt_ssb_phi->count()) ctx.options["ssb_phi"] = ssb_phi;
      ctx.options["normalize"] = normalize;
      return cmd_pattern(ctx, pm_index,
                         opt_ssb_theta->count()
                             ? std::optional<double>(ssb_theta)
                             : std::nullopt,
                         opt_ssb_phi->count() ? std::optional<double>(ssb_phi)
                                              : std::nullopt,
                         normalize);
    }
    if (sub == sc_average) {
      ctx.options["ssb_associate"] = ssb_associate;
      return cmd_average_map(ctx, ssb_associate);
    }
    if (sub == sc_cdf) return cmd_cdf(ctx);
    if (sub == sc_null) {
      NullingSettings ns = make_nulling_settings(ctx.config);
      if (opt_el->count()) ns.target_theta = f_target_el;
      if (opt_az->count()) ns.target_phi = f_target_az;
      if (opt_eps->count()) ns.epsilon_db = f_eps;
      if (opt_alg->count()) ns.algorithm = f_algorithm;
      if (opt_logic->count()) ns.hpbw_logic = f_logic;
      if (ns.target_theta) ctx.options["target_el"] = *ns.target_theta;
      if (ns.target_phi) ctx.options["target_az"] = *ns.target_phi;
      ctx.options["epsilon_db"] = ns.epsilon_db;
      ctx.options["algorithm"] = ns.algorithm;
      ctx.options["hpbw_logic"] = ns.hpbw_logic;
      ctx.options["reference"] = ns.reference;
      return cmd_null(ctx, ns);
    }
    if (sub == sc_cut) {
      ctx.options["axis"] = axis_name;
      if (opt_fixed->count()) ctx.options["fixed_angle"] = fixed_angle;
      return cmd_median_cut(ctx, axis_name,
                            opt_fixed->count()
                                ? std::optional<double>(fixed_angle)
                                : std::nullopt);
    }
    if (sub == sc_ber) return cmd_ber(ctx);
    die_config("unknown subcommand");
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

#include "muxlink/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "muxlink/errors.hpp"

namespace muxlink::io {

using nlohmann::json;

namespace {

template <std::size_t N>
double mean_of(const std::array<double, N>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(N);
}

// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

std::uint64_t get_count(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(path, "expected a non-negative integer");
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

std::vector<double> get_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Scalar broadcasts to all m sources, a list must have exactly m entries.
std::vector<double> per_source(const json& v, std::size_t m, const std::string& path) {
  if (v.is_number()) return std::vector<double>(m, get_number(v, path));
  std::vector<double> out = get_numbers(v, path);
  if (out.size() != m)
    throw ConfigError(path, "expected " + std::to_string(m) + " entries, got " + std::to_string(out.size()));
  return out;
}

json compact(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return json(v);
  return json(v.front());
}

template <class T>
T wrap_domain(const std::string& path, T (*parse)(const std::string&), const std::string& text) {
  try {
    return parse(text);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

PolarizationBasis parse_basis_str(const std::string& s) { return quantum::parse_basis(s); }

DepletionModel parse_depletion(const std::string& s) {
  if (s == "average") return DepletionModel::kAverage;
  if (s == "sequential") return DepletionModel::kSequential;
  throw DomainError("expected 'average' or 'sequential'");
}

std::string to_string(DepletionModel d) { return d == DepletionModel::kAverage ? "average" : "sequential"; }

detection::AccidentalModel parse_accidentals(const std::string& s) {
  if (s == "per_trial") return detection::AccidentalModel::kPerTrial;
  if (s == "none") return detection::AccidentalModel::kNone;
  throw DomainError("expected 'per_trial' or 'none'");
}

std::string to_string(detection::AccidentalModel a) {
  return a == detection::AccidentalModel::kPerTrial ? "per_trial" : "none";
}

void load_interface(const json& j, InterfaceParams& ip) {
  const std::string path = "interface";
  check_keys(j, path,
             {"m", "rate", "accidentals", "theta_deg", "theta_rad", "chi", "gamma", "eta_s", "eta_t", "eta_rc",
              "background", "crosstalk"});
  std::size_t m = ip.m();
  if (j.contains("m")) {
    m = get_count(j["m"], "interface.m");
    if (m == 0) throw ConfigError("interface.m", "must be >= 1");
    ip = default_interface(m);
  }
  if (j.contains("rate")) ip.rate = get_number(j["rate"], "interface.rate");
  if (j.contains("accidentals"))
    ip.accidentals = wrap_domain("interface.accidentals", parse_accidentals, get_string(j["accidentals"], "interface.accidentals"));
  if (j.contains("theta_deg") && j.contains("theta_rad"))
    throw ConfigError("interface.theta_deg", "give theta_deg or theta_rad, not both");

  auto apply = [&](const char* key, double detection::SourceParams::*field, double scale = 1.0) {
    if (!j.contains(key)) return;
    const auto values = per_source(j[key], m, join(path, key));
    for (std::size_t i = 0; i < m; ++i) ip.sources[i].*field = values[i] * scale;
  };
  apply("theta_deg", &detection::SourceParams::theta, quantum::kPi / 180.0);
  apply("theta_rad", &detection::SourceParams::theta);
  apply("chi", &detection::SourceParams::chi);
  apply("gamma", &detection::SourceParams::gamma);
  apply("eta_s", &detection::SourceParams::eta_s);
  apply("eta_t", &detection::SourceParams::eta_t);
  apply("eta_rc", &detection::SourceParams::eta_rc);
  apply("background", &detection::SourceParams::background);

  if (j.contains("crosstalk")) {
    const json& x = j["crosstalk"];
    check_keys(x, "interface.crosstalk", {"HV", "DA", "RL"});
    for (const auto basis : quantum::kAllBases) {
      const std::string key(quantum::to_string(basis));
      if (!x.contains(key)) continue;
      const std::string p = "interface.crosstalk." + key;
      const json& v = x[key];
      std::vector<std::array<double, 2>> pairs;
      auto pair_of = [&](const json& e, const std::string& pp) {
        const auto nums = get_numbers(e, pp);
        if (nums.size() != 2) throw ConfigError(pp, "expected [a, b]");
        return std::array<double, 2>{nums[0], nums[1]};
      };
      if (v.is_array() && !v.empty() && v[0].is_array()) {
        if (v.size() != m) throw ConfigError(p, "expected " + std::to_string(m) + " [a, b] pairs");
        for (std::size_t i = 0; i < m; ++i) pairs.push_back(pair_of(v[i], p + "[" + std::to_string(i) + "]"));
      } else {
        pairs.assign(m, pair_of(v, p));
      }
      for (std::size_t i = 0; i < m; ++i) ip.sources[i].crosstalk_for(basis) = {pairs[i][0], pairs[i][1]};
    }
  }
}

json emit_interface(const InterfaceParams& ip) {
  auto column = [&](double detection::SourceParams::*field) {
    std::vector<double> v;
    for (const auto& s : ip.sources) v.push_back(s.*field);
    return compact(v);
  };
  json x = json::object();
  for (const auto basis : quantum::kAllBases) {
    std::vector<std::array<double, 2>> pairs;
    bool same = true;
    for (const auto& s : ip.sources) {
      const auto c = s.crosstalk_for(basis);
      pairs.push_back({c.stokes, c.antistokes});
      same = same && pairs.back() == pairs.front();
    }
    x[std::string(quantum::to_string(basis))] = same ? json(pairs.front()) : json(pairs);
  }
  return json{{"m", ip.m()},
              {"rate", ip.rate},
              {"accidentals", to_string(ip.accidentals)},
              {"theta_rad", column(&detection::SourceParams::theta)},
              {"chi", column(&detection::SourceParams::chi)},
              {"gamma", column(&detection::SourceParams::gamma)},
              {"eta_s", column(&detection::SourceParams::eta_s)},
              {"eta_t", column(&detection::SourceParams::eta_t)},
              {"eta_rc", column(&detection::SourceParams::eta_rc)},
              {"background", column(&detection::SourceParams::background)},
              {"crosstalk", x}};
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return get_number(j[key], join(path, key));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::size_t> get_counts(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected a list of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_count(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

InterfaceParams default_interface(std::size_t m) {
  if (m == 0) throw DomainError("m must be >= 1");
  InterfaceParams ip;
  ip.sources.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = ip.sources[i];
    s.chi = kDefaultChi;
    if (m == 6) {
      s.eta_rc = SourceTables::eta_rc[i];
      s.eta_s = SourceTables::eta_s[i];
      s.eta_t = SourceTables::eta_t[i];
      s.gamma = SourceTables::gamma[i];
    } else {
      s.eta_rc = mean_of(SourceTables::eta_rc);
      s.eta_s = mean_of(SourceTables::eta_s);
      s.eta_t = mean_of(SourceTables::eta_t);
      s.gamma = mean_of(SourceTables::gamma);
    }
  }
  return ip;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kAnalytic: return "analytic";
    case Mode::kMonteCarlo: return "mc";
    case Mode::kBoth: return "both";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "analytic") return Mode::kAnalytic;
  if (text == "mc" || text == "montecarlo") return Mode::kMonteCarlo;
  if (text == "both") return Mode::kBoth;
  throw DomainError("mode must be analytic, mc or both");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kChi: return "chi";
    case SweepAxis::kStokes: return "p_s";
    case SweepAxis::kStorage: return "storage_us";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& text) {
  if (text == "chi") return SweepAxis::kChi;
  if (text == "p_s") return SweepAxis::kStokes;
  if (text == "storage_us") return SweepAxis::kStorage;
  throw DomainError("sweep axis must be chi, p_s or storage_us");
}

bool CalibrationSpec::operator==(const CalibrationSpec& o) const {
  if (table.size() != o.table.size()) return false;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i].p_s != o.table[i].p_s || table[i].bell != o.table[i].bell || table[i].fidelity != o.table[i].fidelity)
      return false;
  return basis_targets.p_s == o.basis_targets.p_s && basis_targets.visibility == o.basis_targets.visibility;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  auto law_eq = [](const std::optional<detection::LinearLaw>& a, const std::optional<detection::LinearLaw>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->deficit == b->deficit && a->slope == b->slope && a->background == b->background &&
           a->gamma_ref == b->gamma_ref;
  };
  return interface == o.interface && timing == o.timing && bases == o.bases && depletion == o.depletion &&
         sweep == o.sweep && mode == o.mode && cycles == o.cycles && seed == o.seed && output == o.output &&
         calibrate == o.calibrate && law_eq(bell_law, o.bell_law) && repeater == o.repeater &&
         calibration == o.calibration && tomography == o.tomography;
}

void validate(const ScenarioConfig& cfg) {
  // Field-level checks first so the error names the key; the engine checks below are the backstop.
  using Field = double detection::SourceParams::*;
  const std::pair<const char*, Field> unit_fields[] = {
      {"chi", &detection::SourceParams::chi},       {"gamma", &detection::SourceParams::gamma},
      {"eta_s", &detection::SourceParams::eta_s},   {"eta_t", &detection::SourceParams::eta_t},
      {"eta_rc", &detection::SourceParams::eta_rc}, {"background", &detection::SourceParams::background}};
  for (const auto& s : cfg.interface.sources) {
    for (const auto& [key, field] : unit_fields)
      if (!(s.*field >= 0.0 && s.*field <= 1.0)) throw ConfigError(std::string("interface.") + key, "must lie in [0, 1]");
    for (auto b : quantum::kAllBases) {
      const auto& x = s.crosstalk_for(b);
      if (!(x.stokes >= 0.0 && x.stokes < 0.5 && x.antistokes >= 0.0 && x.antistokes < 0.5))
        throw ConfigError("interface.crosstalk." + std::string(quantum::to_string(b)), "a and b must lie in [0, 0.5)");
    }
  }
  if (!(cfg.interface.rate > 0.0) || !std::isfinite(cfg.interface.rate))
    throw ConfigError("interface.rate", "must be positive");
  if (cfg.timing.max_trials == 0) throw ConfigError("timing.max_trials", "must be >= 1");
  if (!(cfg.timing.storage_us >= 0.0) || !std::isfinite(cfg.timing.storage_us))
    throw ConfigError("timing.storage_us", "must be >= 0");
  if (!(cfg.timing.lifetime_us > 0.0) || !std::isfinite(cfg.timing.lifetime_us))
    throw ConfigError("timing.lifetime_us", "must be positive");
  try {
    cfg.interface.validate();
  } catch (const DomainError& e) {
    throw ConfigError("interface", e.what());
  }
  try {
    sim::TimingConfig t = cfg.timing;
    t.rate = cfg.interface.rate;
    t.validate();
  } catch (const DomainError& e) {
    throw ConfigError("timing", e.what());
  }
  if (cfg.bases.empty()) throw ConfigError("bases", "at least one basis required");
  if (cfg.sweep.values.empty()) throw ConfigError("sweep.values", "at least one value required");
  for (double v : cfg.sweep.values) {
    const bool ok = cfg.sweep.axis == SweepAxis::kStorage ? v >= 0.0 : (v >= 0.0 && v <= 1.0);
    if (!ok) throw ConfigError("sweep.values", "value " + std::to_string(v) + " out of range for axis");
  }
  if (cfg.sweep.p_s && !(*cfg.sweep.p_s > 0.0 && *cfg.sweep.p_s < 1.0))
    throw ConfigError("sweep.p_s", "must lie in (0, 1)");
  if (cfg.cycles == 0) throw ConfigError("cycles", "must be >= 1");
  const auto& r = cfg.repeater;
  if (!(r.elementary_km > 0.0)) throw ConfigError("repeater.elementary_km", "must be positive");
  if (!(r.attenuation_km > 0.0)) throw ConfigError("repeater.attenuation_km", "must be positive");
  if (!(r.eta_dc > 0.0 && r.eta_dc <= 1.0)) throw ConfigError("repeater.eta_dc", "must lie in (0, 1]");
  if (!(r.fiber_speed_km_s > 0.0)) throw ConfigError("repeater.fiber_speed_km_s", "must be positive");
  if (!(r.zeta >= 0.0 && r.zeta <= 1.0)) throw ConfigError("repeater.zeta", "must lie in [0, 1]");
  if (r.modes.empty()) throw ConfigError("repeater.modes", "at least one m required");
  for (auto m : r.modes)
    if (m == 0) throw ConfigError("repeater.modes", "m must be >= 1");
  if (r.nesting.empty()) throw ConfigError("repeater.nesting", "at least one level required");
  for (auto n : r.nesting)
    if (n > 64) throw ConfigError("repeater.nesting", "nesting level above 64");
  for (const auto& [key, v] : {std::pair{"repeater.eta_rc_bar", r.eta_rc_bar}, std::pair{"repeater.swap_success", r.swap_success},
                               std::pair{"repeater.p_s", r.p_s}})
    if (v && !(*v > 0.0 && *v <= 1.0)) throw ConfigError(key, "must lie in (0, 1]");
  if (cfg.calibration.table.size() < 2) throw ConfigError("calibration.table", "need at least two rows");
  for (double v : cfg.calibration.basis_targets.visibility)
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("calibration.basis_visibilities", "must lie in (0, 1)");
  if (!(cfg.tomography.theta_deg >= 0.0 && cfg.tomography.theta_deg <= 90.0))
    throw ConfigError("tomography.theta_deg", "must lie in [0, 90]");
  for (double v : cfg.tomography.visibilities)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("tomography.visibilities", "must lie in [0, 1]");
  if (cfg.bell_law && !(cfg.bell_law->gamma_ref > 0.0)) throw ConfigError("bell_law.gamma_ref", "must be positive");
}

ScenarioConfig load_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "parse error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  check_keys(root, "",
             {"interface", "timing", "bases", "depletion", "sweep", "mode", "cycles", "seed", "output", "calibrate",
              "bell_law", "repeater", "calibration", "tomography"});

  ScenarioConfig cfg;
  if (root.contains("interface")) load_interface(root["interface"], cfg.interface);

  if (root.contains("timing")) {
    const json& t = root["timing"];
    check_keys(t, "timing", {"max_trials", "storage_us", "lifetime_us"});
    if (t.contains("max_trials")) cfg.timing.max_trials = get_count(t["max_trials"], "timing.max_trials");
    if (t.contains("storage_us")) cfg.timing.storage_us = get_number(t["storage_us"], "timing.storage_us");
    if (t.contains("lifetime_us")) cfg.timing.lifetime_us = get_number(t["lifetime_us"], "timing.lifetime_us");
  }
  cfg.timing.rate = cfg.interface.rate;

  if (root.contains("bases")) {
    const json& b = root["bases"];
    if (!b.is_array()) throw ConfigError("bases", "expected a list such as [\"HV\", \"DA\"]");
    cfg.bases.clear();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string p = "bases[" + std::to_string(i) + "]";
      cfg.bases.push_back(wrap_domain(p, parse_basis_str, get_string(b[i], p)));
    }
  }
  if (root.contains("depletion"))
    cfg.depletion = wrap_domain("depletion", parse_depletion, get_string(root["depletion"], "depletion"));

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    check_keys(s, "sweep", {"axis", "values", "p_s"});
    if (s.contains("axis")) cfg.sweep.axis = wrap_domain("sweep.axis", parse_axis, get_string(s["axis"], "sweep.axis"));
    if (s.contains("values")) cfg.sweep.values = get_numbers(s["values"], "sweep.values");
    cfg.sweep.p_s = optional_number(s, "p_s", "sweep");
  }
  if (root.contains("mode")) cfg.mode = wrap_domain("mode", parse_mode, get_string(root["mode"], "mode"));
  if (root.contains("cycles")) cfg.cycles = get_count(root["cycles"], "cycles");
  if (root.contains("seed")) cfg.seed = get_count(root["seed"], "seed");
  if (root.contains("output")) cfg.output = get_string(root["output"], "output");
  if (root.contains("calibrate")) cfg.calibrate = get_bool(root["calibrate"], "calibrate");

  if (root.contains("bell_law") && !root["bell_law"].is_null()) {
    const json& l = root["bell_law"];
    check_keys(l, "bell_law", {"deficit", "slope", "background", "gamma_ref"});
    detection::LinearLaw law;
    if (l.contains("deficit")) law.deficit = get_number(l["deficit"], "bell_law.deficit");
    if (l.contains("slope")) law.slope = get_number(l["slope"], "bell_law.slope");
    if (l.contains("background")) law.background = get_number(l["background"], "bell_law.background");
    if (l.contains("gamma_ref")) law.gamma_ref = get_number(l["gamma_ref"], "bell_law.gamma_ref");
    cfg.bell_law = law;
  }

  if (root.contains("repeater")) {
    const json& r = root["repeater"];
    check_keys(r, "repeater",
               {"elementary_km", "nesting", "modes", "attenuation_km", "eta_dc", "fiber_speed_km_s", "zeta",
                "eta_rc_bar", "swap_success", "p_s"});
    auto& rs = cfg.repeater;
    if (r.contains("elementary_km")) rs.elementary_km = get_number(r["elementary_km"], "repeater.elementary_km");
    if (r.contains("nesting")) rs.nesting = get_counts(r["nesting"], "repeater.nesting");
    if (r.contains("modes")) rs.modes = get_counts(r["modes"], "repeater.modes");
    if (r.contains("attenuation_km")) rs.attenuation_km = get_number(r["attenuation_km"], "repeater.attenuation_km");
    if (r.contains("eta_dc")) rs.eta_dc = get_number(r["eta_dc"], "repeater.eta_dc");
    if (r.contains("fiber_speed_km_s"))
      rs.fiber_speed_km_s = get_number(r["fiber_speed_km_s"], "repeater.fiber_speed_km_s");
    if (r.contains("zeta")) rs.zeta = get_number(r["zeta"], "repeater.zeta");
    rs.eta_rc_bar = optional_number(r, "eta_rc_bar", "repeater");
    rs.swap_success = optional_number(r, "swap_success", "repeater");
    rs.p_s = optional_number(r, "p_s", "repeater");
  }

  if (root.contains("calibration")) {
    const json& c = root["calibration"];
    check_keys(c, "calibration", {"table", "basis_visibilities"});
    if (c.contains("table")) {
      const json& t = c["table"];
      if (!t.is_array()) throw ConfigError("calibration.table", "expected a list of [p_s, S, F] rows");
      cfg.calibration.table.clear();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string p = "calibration.table[" + std::to_string(i) + "]";
        const auto row = get_numbers(t[i], p);
        if (row.size() != 3) throw ConfigError(p, "expected [p_s, S, F]");
        cfg.calibration.table.push_back({row[0], row[1], row[2]});
      }
    }
    if (c.contains("basis_visibilities")) {
      const json& b = c["basis_visibilities"];
      check_keys(b, "calibration.basis_visibilities", {"p_s", "HV", "DA", "RL"});
      auto& bt = cfg.calibration.basis_targets;
      if (b.contains("p_s")) bt.p_s = get_number(b["p_s"], "calibration.basis_visibilities.p_s");
      for (std::size_t k = 0; k < 3; ++k) {
        const std::string key(quantum::to_string(quantum::kAllBases[k]));
        if (b.contains(key)) bt.visibility[k] = get_number(b[key], "calibration.basis_visibilities." + key);
      }
    }
  }

  if (root.contains("tomography")) {
    const json& t = root["tomography"];
    check_keys(t, "tomography", {"theta_deg", "visibilities", "shots"});
    if (t.contains("theta_deg")) cfg.tomography.theta_deg = get_number(t["theta_deg"], "tomography.theta_deg");
    if (t.contains("visibilities"))
      cfg.tomography.visibilities = get_numbers(t["visibilities"], "tomography.visibilities");
    if (t.contains("shots")) cfg.tomography.shots = get_count(t["shots"], "tomography.shots");
  }

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string emit_scenario(const ScenarioConfig& cfg) {
  json root;
  root["interface"] = emit_interface(cfg.interface);
  root["timing"] = {{"max_trials", cfg.timing.max_trials},
                    {"storage_us", cfg.timing.storage_us},
                    {"lifetime_us", cfg.timing.lifetime_us}};
  json bases = json::array();
  for (auto b : cfg.bases) bases.push_back(std::string(quantum::to_string(b)));
  root["bases"] = bases;
  root["depletion"] = to_string(cfg.depletion);
  root["sweep"] = {{"axis", to_string(cfg.sweep.axis)}, {"values", cfg.sweep.values}, {"p_s", optional_json(cfg.sweep.p_s)}};
  root["mode"] = to_string(cfg.mode);
  root["cycles"] = cfg.cycles;
  root["seed"] = cfg.seed;
  root["output"] = cfg.output;
  root["calibrate"] = cfg.calibrate;
  if (cfg.bell_law)
    root["bell_law"] = {{"deficit", cfg.bell_law->deficit},
                        {"slope", cfg.bell_law->slope},
                        {"background", cfg.bell_law->background},
                        {"gamma_ref", cfg.bell_law->gamma_ref}};
  else
    root["bell_law"] = nullptr;
  const auto& r = cfg.repeater;
  root["repeater"] = {{"elementary_km", r.elementary_km},
                      {"nesting", r.nesting},
                      {"modes", r.modes},
                      {"attenuation_km", r.attenuation_km},
                      {"eta_dc", r.eta_dc},
                      {"fiber_speed_km_s", r.fiber_speed_km_s},
                      {"zeta", r.zeta},
                      {"eta_rc_bar", optional_json(r.eta_rc_bar)},
                      {"swap_success", optional_json(r.swap_success)},
                      {"p_s", optional_json(r.p_s)}};
  json table = json::array();
  for (const auto& row : cfg.calibration.table) table.push_back({row.p_s, row.bell, row.fidelity});
  const auto& bt = cfg.calibration.basis_targets;
  root["calibration"] = {
      {"table", table},
      {"basis_visibilities", {{"p_s", bt.p_s}, {"HV", bt.visibility[0]}, {"DA", bt.visibility[1]}, {"RL", bt.visibility[2]}}}};
  root["tomography"] = {{"theta_deg", cfg.tomography.theta_deg},
                        {"visibilities", cfg.tomography.visibilities},
                        {"shots", cfg.tomography.shots}};
  return root.dump(2) + "\n";
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string canonical = emit_scenario(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace muxlink::io

#include "rmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rmc {
namespace {

namespace pt = boost::property_tree;

constexpr double kDeg = std::numbers::pi / 180.0;

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"plant", {"name", "a1", "a2", "a3", "a4", "coriolis_variant"}},
      {"reference", {"name", "amplitude", "offset", "value", "omega", "rate", "units"}},
      {"gains", {"alpha", "kp", "kd", "K", "C"}},
      {"initial", {"units", "state"}},
      {"simulation", {"T", "dt", "decimation"}},
      {"analysis", {"enabled", "safety", "gamma1", "gamma2"}},
  };
  return schema;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& field) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw ValidationError(field + ": '" + s + "' is not a number");
  }
  return v;
}

std::size_t parse_count(const std::string& raw, const std::string& field) {
  const double v = parse_double(raw, field);
  if (v < 1.0 || v != std::floor(v) || v > 1e12) {
    throw ValidationError(field + ": must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& raw, const std::string& field) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    return false;
  }
  throw ValidationError(field + ": expected true or false");
}

double unit_scale(const std::string& units, const std::string& field) {
  if (units == "rad") {
    return 1.0;
  }
  if (units == "deg") {
    return kDeg;
  }
  throw ValidationError(field + ": units must be deg or rad, got '" + units + "'");
}

// 1-based line of `key` inside `[section]` (or of the section header when key is
// empty); 0 when not found. Only used to point error messages at the file.
std::size_t locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  std::string current;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') {
      continue;
    }
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) {
        return no;
      }
      continue;
    }
    const auto eq = t.find('=');
    if (!key.empty() && current == section && eq != std::string::npos && trim(t.substr(0, eq)) == key) {
      return no;
    }
  }
  return 0;
}

// Reads the INI text with boost and rejects anything outside the schema.
pt::ptree read_ini(const std::string& text, const std::map<std::string, std::set<std::string>>& schema) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError(err.message(), err.line());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      if (body.empty()) {
        throw ConfigError("unknown key '" + section + "' outside any section", locate(text, "", section));
      }
      throw ConfigError("unknown section '[" + section + "]'", locate(text, section, ""));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]", locate(text, section, key));
      }
    }
  }
  return tree;
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& section, const std::string& key) {
  const auto sec = tree.get_child_optional(section);
  if (!sec) {
    return std::nullopt;
  }
  const auto v = sec->get_optional<std::string>(key);
  if (!v) {
    return std::nullopt;
  }
  return trim(*v);
}

}  // namespace

Vec parse_vector(const std::string& text, const std::string& field) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    vals.push_back(parse_double(item, field));
  }
  if (vals.empty()) {
    throw ValidationError(field + ": empty list");
  }
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_vector(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += format_double(v(i));
  }
  return out;
}

void ScenarioConfig::validate() const {
  if (plant != "two_link" && plant != "scalar_toy") {
    throw ValidationError("plant.name: unknown plant '" + plant + "'");
  }
  const Eigen::Index m = plant == "two_link" ? 2 : 1;
  const Eigen::Index n = plant == "two_link" ? 2 : 1;
  if (plant == "scalar_toy" && (reference == "benchmark")) {
    throw ValidationError("reference.name: benchmark reference is two-dimensional");
  }
  if (reference == "sine" || reference == "smooth_start_sine") {
    if (ref_amplitude.size() != m) {
      throw ValidationError("reference.amplitude: expected " + std::to_string(m) + " entries");
    }
    if (reference == "sine" && ref_offset.size() != m) {
      throw ValidationError("reference.offset: expected " + std::to_string(m) + " entries");
    }
  } else if (reference == "constant") {
    if (ref_value.size() != m) {
      throw ValidationError("reference.value: expected " + std::to_string(m) + " entries");
    }
  } else if (reference != "benchmark") {
    throw ValidationError("reference.name: unknown reference '" + reference + "'");
  }
  if (alpha.size() != m) {
    throw ValidationError("gains.alpha: expected " + std::to_string(m) + " entries");
  }
  if (!(alpha.array() > 0.0).all()) {
    throw ValidationError("gains.alpha: entries must be positive");
  }
  if (!(kp > 0.0)) {
    throw ValidationError("gains.kp: must be positive");
  }
  if (kd.size() != m - 1) {
    throw ValidationError("gains.kd: expected " + std::to_string(m - 1) + " entries");
  }
  if (!(kd.array() > 0.0).all()) {
    throw ValidationError("gains.kd: entries must be positive");
  }
  if (C.size() != m) {
    throw ValidationError("gains.C: expected " + std::to_string(m) + " entries");
  }
  if (!(C.array() > 0.0).all()) {
    throw ValidationError("gains.C: entries must be positive");
  }
  if (initial_state.size() != m * n) {
    throw ValidationError("initial.state: expected " + std::to_string(m * n) + " entries");
  }
  if (units != "deg" && units != "rad") {
    throw ValidationError("initial.units: must be deg or rad");
  }
  if (!(T > 0.0)) {
    throw ValidationError("simulation.T: must be positive");
  }
  if (!(dt > 0.0)) {
    throw ValidationError("simulation.dt: must be positive");
  }
  if (decimation < 1) {
    throw ValidationError("simulation.decimation: must be at least 1");
  }
  if (!(safety >= 0.0)) {
    throw ValidationError("analysis.safety: must be non-negative");
  }
  if ((gamma1 && !(*gamma1 >= 0.0)) || (gamma2 && !(*gamma2 >= 0.0))) {
    throw ValidationError("analysis.gamma1/gamma2: must be non-negative");
  }
  if (plant == "two_link") {
    for (const double a : {two_link.a1, two_link.a2, two_link.a3, two_link.a4}) {
      if (!std::isfinite(a)) {
        throw ValidationError("plant.a1..a4: must be finite");
      }
    }
  }
}

ScenarioConfig parse_config(const std::string& text) {
  const pt::ptree tree = read_ini(text, config_schema());
  ScenarioConfig cfg;

  if (auto v = get(tree, "plant", "name")) cfg.plant = *v;
  if (auto v = get(tree, "plant", "a1")) cfg.two_link.a1 = parse_double(*v, "plant.a1");
  if (auto v = get(tree, "plant", "a2")) cfg.two_link.a2 = parse_double(*v, "plant.a2");
  if (auto v = get(tree, "plant", "a3")) cfg.two_link.a3 = parse_double(*v, "plant.a3");
  if (auto v = get(tree, "plant", "a4")) cfg.two_link.a4 = parse_double(*v, "plant.a4");
  if (auto v = get(tree, "plant", "coriolis_variant")) {
    if (*v == "paper") {
      cfg.two_link.coriolis = CoriolisVariant::Paper;
    } else if (*v == "corrected") {
      cfg.two_link.coriolis = CoriolisVariant::Corrected;
    } else {
      throw ValidationError("plant.coriolis_variant: expected paper or corrected");
    }
  }

  const double ref_scale = unit_scale(get(tree, "reference", "units").value_or("rad"), "reference.units");
  if (auto v = get(tree, "reference", "name")) cfg.reference = *v;
  if (auto v = get(tree, "reference", "amplitude")) cfg.ref_amplitude = ref_scale * parse_vector(*v, "reference.amplitude");
  if (auto v = get(tree, "reference", "offset")) cfg.ref_offset = ref_scale * parse_vector(*v, "reference.offset");
  if (auto v = get(tree, "reference", "value")) cfg.ref_value = ref_scale * parse_vector(*v, "reference.value");
  if (auto v = get(tree, "reference", "omega")) cfg.ref_omega = parse_double(*v, "reference.omega");
  if (auto v = get(tree, "reference", "rate")) cfg.ref_rate = parse_double(*v, "reference.rate");

  if (auto v = get(tree, "gains", "alpha")) cfg.alpha = parse_vector(*v, "gains.alpha");
  const auto K = get(tree, "gains", "K");
  const auto kp = get(tree, "gains", "kp");
  const auto kd = get(tree, "gains", "kd");
  if (K && (kp || kd)) {
    throw ValidationError("gains.K: give either K or kp/kd, not both");
  }
  if (K) {
    // Unique split of K = (1 + kp) I + diag(kd, 0).
    const Vec k = parse_vector(*K, "gains.K");
    cfg.kp = k(k.size() - 1) - 1.0;
    cfg.kd = (k.head(k.size() - 1).array() - k(k.size() - 1)).matrix();
  } else {
    if (kp) cfg.kp = parse_double(*kp, "gains.kp");
    cfg.kd = kd ? parse_vector(*kd, "gains.kd") : Vec(0);
  }
  if (auto v = get(tree, "gains", "C")) cfg.C = parse_vector(*v, "gains.C");

  cfg.units = get(tree, "initial", "units").value_or("rad");
  const double x_scale = unit_scale(cfg.units, "initial.units");
  if (auto v = get(tree, "initial", "state")) cfg.initial_state = x_scale * parse_vector(*v, "initial.state");

  if (auto v = get(tree, "simulation", "T")) cfg.T = parse_double(*v, "simulation.T");
  if (auto v = get(tree, "simulation", "dt")) cfg.dt = parse_double(*v, "simulation.dt");
  if (auto v = get(tree, "simulation", "decimation")) cfg.decimation = parse_count(*v, "simulation.decimation");

  if (auto v = get(tree, "analysis", "enabled")) cfg.analysis_enabled = parse_bool(*v, "analysis.enabled");
  if (auto v = get(tree, "analysis", "safety")) cfg.safety = parse_double(*v, "analysis.safety");
  if (auto v = get(tree, "analysis", "gamma1")) cfg.gamma1 = parse_double(*v, "analysis.gamma1");
  if (auto v = get(tree, "analysis", "gamma2")) cfg.gamma2 = parse_double(*v, "analysis.gamma2");

  cfg.validate();
  return cfg;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[plant]\n"
     << "name = " << cfg.plant << "\n"
     << "a1 = " << format_double(cfg.two_link.a1) << "\n"
     << "a2 = " << format_double(cfg.two_link.a2) << "\n"
     << "a3 = " << format_double(cfg.two_link.a3) << "\n"
     << "a4 = " << format_double(cfg.two_link.a4) << "\n"
     << "coriolis_variant = " << (cfg.two_link.coriolis == CoriolisVariant::Paper ? "paper" : "corrected")
     << "\n\n[reference]\n"
     << "name = " << cfg.reference << "\n"
     << "units = rad\n";
  if (cfg.ref_amplitude.size() > 0) os << "amplitude = " << format_vector(cfg.ref_amplitude) << "\n";
  if (cfg.ref_offset.size() > 0) os << "offset = " << format_vector(cfg.ref_offset) << "\n";
  if (cfg.ref_value.size() > 0) os << "value = " << format_vector(cfg.ref_value) << "\n";
  os << "omega = " << format_double(cfg.ref_omega) << "\n"
     << "rate = " << format_double(cfg.ref_rate) << "\n\n[gains]\n"
     << "alpha = " << format_vector(cfg.alpha) << "\n"
     << "kp = " << format_double(cfg.kp) << "\n";
  if (cfg.kd.size() > 0) os << "kd = " << format_vector(cfg.kd) << "\n";
  os << "C = " << format_vector(cfg.C) << "\n\n[initial]\n"
     << "units = rad\n"
     << "state = " << format_vector(cfg.initial_state) << "\n\n[simulation]\n"
     << "T = " << format_double(cfg.T) << "\n"
     << "dt = " << format_double(cfg.dt) << "\n"
     << "decimation = " << cfg.decimation << "\n\n[analysis]\n"
     << "enabled = " << (cfg.analysis_enabled ? "true" : "false") << "\n"
     << "safety = " << format_double(cfg.safety) << "\n";
  if (cfg.gamma1) os << "gamma1 = " << format_double(*cfg.gamma1) << "\n";
  if (cfg.gamma2) os << "gamma2 = " << format_double(*cfg.gamma2) << "\n";
  return os.str();
}

PlantModel make_plant(const ScenarioConfig& cfg) {
  if (cfg.plant == "two_link") {
    return two_link_as_plant(cfg.two_link);
  }
  if (cfg.plant == "scalar_toy") {
    return scalar_toy_plant();
  }
  throw ValidationError("plant.name: unknown plant '" + cfg.plant + "'");
}

ReferenceTrajectory make_reference(const ScenarioConfig& cfg) {
  if (cfg.reference == "benchmark") {
    return benchmark_reference();
  }
  if (cfg.reference == "smooth_start_sine") {
    return smooth_start_sine_reference(cfg.ref_amplitude, cfg.ref_rate, cfg.ref_omega);
  }
  if (cfg.reference == "sine") {
    return sine_reference(cfg.ref_amplitude, cfg.ref_omega, cfg.ref_offset);
  }
  if (cfg.reference == "constant") {
    return constant_reference(cfg.ref_value);
  }
  throw ValidationError("reference.name: unknown reference '" + cfg.reference + "'");
}

GainSet make_gains(const ScenarioConfig& cfg, const Vec& D) {
  GainSet g{cfg.alpha, cfg.kp, cfg.kd, cfg.C, D};
  g.validate();
  return g;
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  PlantModel plant = make_plant(cfg);
  GainSet gains = make_gains(cfg, plant.D_true);
  return Scenario{std::move(plant), make_reference(cfg), std::move(gains), cfg.initial_state, 0.0,
                  cfg.T,           cfg.dt,             cfg.decimation};
}

BoundEstimates parse_bounds(const std::string& text, std::size_t m) {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"bounds", {"zeta_nbar", "zeta_omega", "gamma1", "gamma2"}}};
  const pt::ptree tree = read_ini(text, schema);
  const auto mm = static_cast<Eigen::Index>(m);
  BoundEstimates b;
  const auto nbar = get(tree, "bounds", "zeta_nbar");
  if (!nbar) {
    throw ValidationError("bounds.zeta_nbar: missing");
  }
  b.zeta_nbar = parse_vector(*nbar, "bounds.zeta_nbar");
  b.zeta_omega = Mat::Zero(mm, mm);
  if (auto v = get(tree, "bounds", "zeta_omega")) {
    const Vec upper = parse_vector(*v, "bounds.zeta_omega");
    if (upper.size() != mm * (mm - 1) / 2) {
      throw ValidationError("bounds.zeta_omega: expected " + std::to_string(m * (m - 1) / 2) + " entries");
    }
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < mm; ++i) {
      for (Eigen::Index j = i + 1; j < mm; ++j) {
        b.zeta_omega(i, j) = upper(k++);
      }
    }
  } else if (m > 1) {
    throw ValidationError("bounds.zeta_omega: missing");
  }
  if (auto v = get(tree, "bounds", "gamma1")) b.gamma1 = parse_double(*v, "bounds.gamma1");
  if (auto v = get(tree, "bounds", "gamma2")) b.gamma2 = parse_double(*v, "bounds.gamma2");
  b.validate(m);
  return b;
}

BoundEstimates load_bounds(const std::filesystem::path& path, std::size_t m) {
  return parse_bounds(read_file(path), m);
}

}  // namespace rmc

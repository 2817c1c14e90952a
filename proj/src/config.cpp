#include "hhgnd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hhgnd/csv.hpp"

namespace hhgnd {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.kind",        "model.t1_ev",          "model.delta_a_ev",   "model.t2_ev",
      "model.a_bohr",      "model.chirality",      "model.km_ratio",     "grid.n",
      "grid.reduced_output", "field.e0_gv_per_m",  "field.lambda_um",    "field.cycles",
      "field.nd",          "field.cep_rad",        "prop.dt_as",         "prop.tau_fs",
      "prop.dephasing_basis", "prop.workers",      "prop.output_stride", "spec.window",
      "spec.nmax",         "output.dir",           "scan.variable",      "scan.values",
      "scan.start",        "scan.stop",            "scan.count",         "scan.jobs",
  };
  return keys;
}

void check_keys(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<int>(value);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

// Text x such that scale * parse(x) reproduces `value` bit for bit.
std::string format_scaled(double value, double scale) {
  double x = value / scale;
  for (int i = 0; i < 8; ++i) {
    const std::string text = format_double(x);
    const double back = scale * std::stod(text);
    if (back == value) return text;
    x = std::nextafter(x, back < value ? HUGE_VAL : -HUGE_VAL);
  }
  return format_double(value / scale);
}

template <typename F>
void with(const ConfigMap& map, const std::string& key, F&& apply) {
  auto it = map.find(key);
  if (it != map.end()) apply(it->second);
}

}  // namespace

void RunConfig::resolve() {
  if (km_ratio) {
    if (model.kind != ModelKind::kKaneMele) throw ConfigError("model.km_ratio: only valid for kane_mele");
    model.delta_a = *km_ratio * 3.0 * std::sqrt(3.0) * model.t2;
  }
  try {
    build_model(model);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (grid_n < 2) throw ConfigError("grid.n: must be >= 2");
  try {
    field.validate();
  } catch (const FieldError& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  try {
    prop.validate();
  } catch (const PropagationError& e) {
    throw ConfigError(std::string("prop: ") + e.what());
  }
  if (nmax < 1) throw ConfigError("spec.nmax: must be >= 1");
  if (output_dir.empty()) throw ConfigError("output.dir: must not be empty");
}

ScanVariable parse_scan_variable(const std::string& name) {
  if (name == "delta_a") return ScanVariable::kDeltaA;
  if (name == "lambda") return ScanVariable::kLambda;
  if (name == "km_ratio") return ScanVariable::kKmRatio;
  throw ConfigError("scan.variable: unknown variable '" + name + "'");
}

std::string to_string(ScanVariable variable) {
  switch (variable) {
    case ScanVariable::kDeltaA: return "delta_a";
    case ScanVariable::kLambda: return "lambda";
    case ScanVariable::kKmRatio: return "km_ratio";
  }
  return "unknown";
}

RunConfig ScanConfig::point(double value) const {
  RunConfig cfg = base;
  switch (variable) {
    case ScanVariable::kDeltaA:
      cfg.model.delta_a = value;
      cfg.km_ratio.reset();
      // The graphene and hBN endpoints share one two-orbital family.
      if (cfg.model.kind != ModelKind::kKaneMele) {
        cfg.model.kind = value == 0.0 ? ModelKind::kGraphene : ModelKind::kHbn;
      }
      break;
    case ScanVariable::kLambda: cfg.field.lambda_m = 1e-6 * value; break;
    case ScanVariable::kKmRatio: cfg.km_ratio = value; break;
  }
  return cfg;
}

void ScanConfig::resolve() {
  if (values.empty()) throw ConfigError("scan.values: scan needs at least one value");
  const bool increasing = values.size() < 2 || values[1] > values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (increasing ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
      throw ConfigError("scan.values: values must be strictly monotone");
    }
  }
  if (variable == ScanVariable::kKmRatio && base.model.kind != ModelKind::kKaneMele) {
    throw ConfigError("scan.variable: km_ratio scans require model.kind = kane_mele");
  }
  if (variable == ScanVariable::kDeltaA && base.model.kind == ModelKind::kKaneMele) {
    for (double v : values) {
      if (v < 0.0) throw ConfigError("scan.values: delta_a must be non-negative");
    }
  }
  if (jobs < 1) throw ConfigError("scan.jobs: must be >= 1");
  for (double v : values) {
    RunConfig cfg = point(v);
    cfg.resolve();
  }
}

ConfigMap read_config_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ConfigMap map;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("manifest '" + path + "': " + e.what());
    }
    if (!doc.contains("config") || !doc["config"].is_object()) {
      throw ConfigError("manifest '" + path + "' has no config object");
    }
    for (const auto& [key, value] : doc["config"].items()) {
      map[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return map;
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must live inside a [section]");
    for (const auto& [key, leaf] : body) {
      if (!leaf.empty()) throw ConfigError("config key '" + section + "." + key + "' is nested");
      map[section + "." + key] = trim(leaf.data());
    }
  }
  return map;
}

RunConfig run_config_from_map(const ConfigMap& map) {
  check_keys(map);
  RunConfig cfg;
  with(map, "model.kind", [&](const std::string& v) {
    try {
      cfg.model.kind = parse_model_kind(v);
    } catch (const ModelError& e) {
      throw ConfigError(std::string("model.kind: ") + e.what());
    }
  });
  const bool kane_mele = cfg.model.kind == ModelKind::kKaneMele;
  with(map, "model.t1_ev", [&](const std::string& v) { cfg.model.t1 = parse_double("model.t1_ev", v); });
  cfg.model.delta_a = cfg.model.kind == ModelKind::kHbn ? 2.81 : 0.0;
  cfg.model.t2 = kane_mele ? 0.03 * cfg.model.t1 : 0.0;
  with(map, "model.t2_ev", [&](const std::string& v) { cfg.model.t2 = parse_double("model.t2_ev", v); });
  with(map, "model.delta_a_ev", [&](const std::string& v) { cfg.model.delta_a = parse_double("model.delta_a_ev", v); });
  with(map, "model.a_bohr", [&](const std::string& v) { cfg.model.a = parse_double("model.a_bohr", v); });
  with(map, "model.chirality", [&](const std::string& v) { cfg.model.chirality = parse_int("model.chirality", v); });
  with(map, "model.km_ratio", [&](const std::string& v) { cfg.km_ratio = parse_double("model.km_ratio", v); });
  if (kane_mele && !map.count("model.delta_a_ev") && !map.count("model.km_ratio")) {
    throw ConfigError("model.delta_a_ev: kane_mele requires delta_a_ev or km_ratio");
  }
  if (map.count("model.delta_a_ev") && map.count("model.km_ratio")) {
    throw ConfigError("model.km_ratio: give either delta_a_ev or km_ratio, not both");
  }

  with(map, "grid.n", [&](const std::string& v) { cfg.grid_n = parse_int("grid.n", v); });
  with(map, "grid.reduced_output", [&](const std::string& v) { cfg.reduced_output = parse_bool("grid.reduced_output", v); });

  with(map, "field.e0_gv_per_m", [&](const std::string& v) { cfg.field.e0_v_per_m = 1e9 * parse_double("field.e0_gv_per_m", v); });
  with(map, "field.lambda_um", [&](const std::string& v) { cfg.field.lambda_m = 1e-6 * parse_double("field.lambda_um", v); });
  with(map, "field.cycles", [&](const std::string& v) { cfg.field.n_cycles = parse_int("field.cycles", v); });
  with(map, "field.nd", [&](const std::string& v) { cfg.field.nd_enabled = parse_bool("field.nd", v); });
  with(map, "field.cep_rad", [&](const std::string& v) { cfg.field.cep = parse_double("field.cep_rad", v); });

  with(map, "prop.dt_as", [&](const std::string& v) { cfg.prop.dt_as = parse_double("prop.dt_as", v); });
  with(map, "prop.tau_fs", [&](const std::string& v) { cfg.prop.tau_fs = parse_double("prop.tau_fs", v); });
  with(map, "prop.dephasing_basis", [&](const std::string& v) {
    try {
      cfg.prop.dephasing_basis = parse_dephasing_basis(v);
    } catch (const PropagationError& e) {
      throw ConfigError(std::string("prop.dephasing_basis: ") + e.what());
    }
  });
  with(map, "prop.workers", [&](const std::string& v) { cfg.prop.workers = parse_int("prop.workers", v); });
  with(map, "prop.output_stride", [&](const std::string& v) { cfg.prop.output_stride = parse_int("prop.output_stride", v); });

  with(map, "spec.window", [&](const std::string& v) {
    try {
      cfg.window = parse_window(v);
    } catch (const SpectrumError& e) {
      throw ConfigError(std::string("spec.window: ") + e.what());
    }
  });
  with(map, "spec.nmax", [&](const std::string& v) { cfg.nmax = parse_int("spec.nmax", v); });
  with(map, "output.dir", [&](const std::string& v) { cfg.output_dir = v; });
  return cfg;
}

ScanConfig scan_config_from_map(const ConfigMap& input) {
  ScanConfig scan;
  auto it = input.find("scan.variable");
  if (it == input.end()) throw ConfigError("scan.variable: missing");
  scan.variable = parse_scan_variable(it->second);
  ConfigMap map = input;
  // The scanned quantity supplies the Kane-Mele potential for every point.
  if (scan.variable != ScanVariable::kLambda && !map.count("model.delta_a_ev") && !map.count("model.km_ratio")) {
    map[scan.variable == ScanVariable::kKmRatio ? "model.km_ratio" : "model.delta_a_ev"] = "0";
  }
  scan.base = run_config_from_map(map);
  with(map, "scan.jobs", [&](const std::string& v) { scan.jobs = parse_int("scan.jobs", v); });
  const bool has_list = map.count("scan.values") > 0;
  const bool has_range = map.count("scan.start") || map.count("scan.stop") || map.count("scan.count");
  if (has_list && has_range) throw ConfigError("scan.values: give either values or start/stop/count");
  if (has_list) {
    scan.values = parse_list("scan.values", map.at("scan.values"));
    return scan;
  }
  // A delta_a scan defaults to the graphene -> hBN path.
  std::optional<double> start, stop;
  if (scan.variable == ScanVariable::kDeltaA) {
    start = 0.0;
    stop = 2.81;
  }
  int count = kDefaultScanPoints;
  with(map, "scan.start", [&](const std::string& v) { start = parse_double("scan.start", v); });
  with(map, "scan.stop", [&](const std::string& v) { stop = parse_double("scan.stop", v); });
  with(map, "scan.count", [&](const std::string& v) { count = parse_int("scan.count", v); });
  if (!start || !stop) throw ConfigError("scan.values: give values or start and stop");
  if (count < 1) throw ConfigError("scan.count: must be >= 1");
  for (int i = 0; i < count; ++i) {
    const double v = count == 1 ? *start : *start + (*stop - *start) * i / (count - 1);
    scan.values.push_back(i == count - 1 && count > 1 ? *stop : v);
  }
  return scan;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg = run_config_from_map(read_config_map(path));
  cfg.resolve();
  return cfg;
}

ScanConfig load_scan_config(const std::string& path) {
  ScanConfig scan = scan_config_from_map(read_config_map(path));
  scan.resolve();
  return scan;
}

ConfigMap to_map(const RunConfig& c) {
  ConfigMap m;
  m["model.kind"] = to_string(c.model.kind);
  m["model.t1_ev"] = format_double(c.model.t1);
  m["model.delta_a_ev"] = format_double(c.model.delta_a);
  m["model.t2_ev"] = format_double(c.model.t2);
  m["model.a_bohr"] = format_double(c.model.a);
  m["model.chirality"] = std::to_string(c.model.chirality);
  m["grid.n"] = std::to_string(c.grid_n);
  m["grid.reduced_output"] = c.reduced_output ? "true" : "false";
  m["field.e0_gv_per_m"] = format_scaled(c.field.e0_v_per_m, 1e9);
  m["field.lambda_um"] = format_scaled(c.field.lambda_m, 1e-6);
  m["field.cycles"] = std::to_string(c.field.n_cycles);
  m["field.nd"] = c.field.nd_enabled ? "true" : "false";
  m["field.cep_rad"] = format_double(c.field.cep);
  m["prop.dt_as"] = format_double(c.prop.dt_as);
  m["prop.tau_fs"] = format_double(c.prop.tau_fs);
  m["prop.dephasing_basis"] = to_string(c.prop.dephasing_basis);
  m["prop.workers"] = std::to_string(c.prop.workers);
  m["prop.output_stride"] = std::to_string(c.prop.output_stride);
  m["spec.window"] = to_string(c.window);
  m["spec.nmax"] = std::to_string(c.nmax);
  m["output.dir"] = c.output_dir;
  return m;
}

}  // namespace hhgnd

#include "vmsgf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vmsgf/csv.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/mesh.hpp"

namespace vmsgf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw ConfigError("'" + s + "' is not a finite number");
  return v;
}

long long to_integer(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("'" + s + "' is not an integer");
  return v;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ", ";
    out += format_double(v);
  }
  return out;
}

Region to_region(const std::string& s) {
  const std::vector<std::string> parts = split_list(s);
  if (parts.size() != 4) throw ConfigError("region needs 'x_min, x_max, coordinate, map'");
  Region r;
  r.x_min = to_double(parts[0]);
  r.x_max = to_double(parts[1]);
  r.coordinate = static_cast<int>(to_integer(parts[2]));
  r.map = BetaMap::parse(parts[3]);
  return r;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"L", [](RunConfig& c, const std::string& v) { c.length = to_double(v); }},
      {"kappa", [](RunConfig& c, const std::string& v) { c.kappa = to_double(v); }},
      {"f", [](RunConfig& c, const std::string& v) { c.source = to_double(v); }},
      {"n_el", [](RunConfig& c, const std::string& v) { c.n_el = static_cast<int>(to_integer(v)); }},
      {"p", [](RunConfig& c, const std::string& v) { c.p = static_cast<int>(to_integer(v)); }},
      {"q", [](RunConfig& c, const std::string& v) { c.q = static_cast<int>(to_integer(v)); }},
      {"method",
       [](RunConfig& c, const std::string& v) {
         if (v != "galerkin" && v != "vms" && v != "both") {
           throw ConfigError("method must be galerkin, vms or both");
         }
         c.method = v;
       }},
      {"experiment", [](RunConfig& c, const std::string& v) { c.experiment = v; }},
      {"region", [](RunConfig& c, const std::string& v) { c.regions.push_back(to_region(v)); }},
      {"xi_realization", [](RunConfig& c, const std::string& v) { c.xi_realization = to_doubles(v); }},
      {"ladder", [](RunConfig& c, const std::string& v) { c.ladder = v; }},
      {"ladder_method",
       [](RunConfig& c, const std::string& v) {
         if (v != "galerkin" && v != "vms") throw ConfigError("ladder_method must be galerkin or vms");
         c.ladder_method = v;
       }},
      {"reference", [](RunConfig& c, const std::string& v) { c.reference = v; }},
      {"source_x", [](RunConfig& c, const std::string& v) { c.source_x = to_double(v); }},
      {"source_profile", [](RunConfig& c, const std::string& v) { c.source_profile = to_doubles(v); }},
      {"greens_xi_nodes",
       [](RunConfig& c, const std::string& v) { c.greens_xi_nodes = static_cast<int>(to_integer(v)); }},
      {"tau_h", [](RunConfig& c, const std::string& v) { c.tau_h = to_doubles(v); }},
      {"tau_beta", [](RunConfig& c, const std::string& v) { c.tau_beta = to_doubles(v); }},
      {"tau_kappa", [](RunConfig& c, const std::string& v) { c.tau_kappa = to_doubles(v); }},
      {"mc_samples",
       [](RunConfig& c, const std::string& v) {
         const long long n = to_integer(v);
         if (n < 2) throw ConfigError("mc_samples must be >= 2");
         c.mc_samples = static_cast<std::size_t>(n);
       }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         std::size_t used = 0;
         unsigned long long s = 0;
         try {
           s = std::stoull(v, &used);
         } catch (const std::exception&) {
           used = 0;
         }
         if (used == 0 || used != v.size() || v[0] == '-') throw ConfigError("seed must be an unsigned integer");
         c.seed = s;
       }},
      {"memory_cap_mb", [](RunConfig& c, const std::string& v) { c.memory_cap_mb = to_double(v); }},
  };
  return table;
}

}  // namespace

int RunConfig::effective_q() const {
  if (q > 0) return q;
  int max_coord = 1;
  for (const Region& r : regions) max_coord = std::max(max_coord, r.coordinate);
  return max_coord;
}

std::vector<double> RunConfig::effective_xi() const {
  if (!xi_realization.empty()) return xi_realization;
  return std::vector<double>(static_cast<std::size_t>(effective_q()), 0.5);
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  const std::string embedded = "# cfg ";
  const bool from_output = std::any_of(lines.begin(), lines.end(),
                                       [&](const std::string& l) { return l.rfind(embedded, 0) == 0; });

  RunConfig config;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    std::string line = lines[k];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (from_output) {
      if (line.rfind(embedded, 0) != 0) continue;
      line = line.substr(embedded.size());
    } else {
      line = line.substr(0, line.find('#'));
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(k + 1) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    try {
      it->second(config, value);
    } catch (const Error& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::vector<std::string> render_config(const RunConfig& c) {
  std::vector<std::string> out;
  auto add = [&](const std::string& key, const std::string& value) { out.push_back(key + " = " + value); };
  add("L", format_double(c.length));
  add("kappa", format_double(c.kappa));
  add("f", format_double(c.source));
  add("n_el", std::to_string(c.n_el));
  add("p", std::to_string(c.p));
  add("q", std::to_string(c.effective_q()));
  add("method", c.method);
  if (!c.experiment.empty()) add("experiment", c.experiment);
  for (const Region& r : c.regions) {
    add("region", format_double(r.x_min) + ", " + format_double(r.x_max) + ", " + std::to_string(r.coordinate) +
                      ", " + r.map.name());
  }
  add("xi_realization", join(c.effective_xi()));
  add("ladder", c.ladder);
  add("ladder_method", c.ladder_method);
  if (!c.reference.empty()) add("reference", c.reference);
  add("source_x", format_double(c.source_x));
  add("source_profile", join(c.source_profile));
  add("greens_xi_nodes", std::to_string(c.greens_xi_nodes));
  add("tau_h", join(c.tau_h));
  add("tau_beta", join(c.tau_beta));
  add("tau_kappa", join(c.tau_kappa));
  add("mc_samples", std::to_string(c.mc_samples));
  add("seed", std::to_string(c.seed));
  add("memory_cap_mb", format_double(c.memory_cap_mb));
  return out;
}

AdeProblem make_problem(const RunConfig& c) {
  if (c.regions.empty()) {
    throw ConfigError("no advection regions defined (add 'region = x_min, x_max, coordinate, map' lines)");
  }
  if (!(c.length > 0.0)) throw ConfigError("L must be positive");
  if (c.n_el < 2) throw ConfigError("n_el must be >= 2");
  const int q = c.effective_q();
  const std::vector<double> xi = c.effective_xi();
  if (xi.size() != static_cast<std::size_t>(q)) {
    throw ConfigError("xi_realization needs " + std::to_string(q) + " values");
  }
  for (double v : xi) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("xi_realization values must lie in [0, 1]");
  }
  BetaField field(c.regions, c.length, q);
  return AdeProblem(c.kappa, c.source, std::move(field), GpcBasis(q, c.p), Mesh1D::uniform(c.length, c.n_el));
}

}  // namespace vmsgf

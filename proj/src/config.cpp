#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tsq/errors.hpp"
#include "tsq/scenario.hpp"

namespace tsq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// section -> (key -> value), plus tracking of consumed keys for the
// unknown-key check.
struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::map<std::string, std::set<std::string>> consumed;

  bool has(const std::string& sec) const { return sections.count(sec) != 0; }

  const std::string* find(const std::string& sec, const std::string& key) {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    consumed[sec].insert(key);
    return &k->second;
  }

  void check_all_consumed() const {
    for (const auto& [sec, kv] : sections) {
      const auto it = consumed.find(sec);
      for (const auto& [key, value] : kv) {
        if (it == consumed.end() || !it->second.count(key))
          throw ConfigError("unknown key '" + key + "' in section [" + sec + "]");
      }
    }
  }
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"grid",     "source", "detector",
                                                  "obstacle", "mzi",    "run"};
      if (!known.count(section))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section +
                          "]");
      raw.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!raw.sections[section].emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return raw;
}

double parse_double(const std::string& sec, const std::string& key, const std::string& v) {
  // std::from_chars is locale-independent (C locale floats by construction)
  double out = 0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
    throw ConfigError("[" + sec + "] " + key + ": '" + v + "' is not a finite number");
  return out;
}

long parse_long(const std::string& sec, const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("[" + sec + "] " + key + ": '" + v + "' is not an integer");
  return out;
}

bool parse_bool(const std::string& sec, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + sec + "] " + key + ": '" + v + "' is not a boolean");
}

std::vector<double> parse_double_list(const std::string& sec, const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("[" + sec + "] " + key + ": empty list entry");
    out.push_back(parse_double(sec, key, item));
  }
  if (out.empty()) throw ConfigError("[" + sec + "] " + key + ": empty list");
  return out;
}

template <typename T, typename F>
void read_into(RawConfig& raw, const std::string& sec, const std::string& key, T& dst, F&& parse) {
  if (const std::string* v = raw.find(sec, key)) dst = parse(sec, key, *v);
}

ScenarioConfig::GridBlock parse_grid(RawConfig& raw) {
  ScenarioConfig::GridBlock g;
  const std::string* xmin = raw.find("grid", "xmin");
  const std::string* xmax = raw.find("grid", "xmax");
  const std::string* nx = raw.find("grid", "nx");
  if (!xmin || !xmax || !nx) throw ConfigError("[grid] requires xmin, xmax, nx");
  g.xmin = parse_double("grid", "xmin", *xmin);
  g.xmax = parse_double("grid", "xmax", *xmax);
  g.nx = parse_long("grid", "nx", *nx);
  const std::string* ymin = raw.find("grid", "ymin");
  const std::string* ymax = raw.find("grid", "ymax");
  const std::string* ny = raw.find("grid", "ny");
  if (ymin || ymax || ny) {
    if (!(ymin && ymax && ny))
      throw ConfigError("[grid] 2D grids require all of ymin, ymax, ny");
    g.two_d = true;
    g.ymin = parse_double("grid", "ymin", *ymin);
    g.ymax = parse_double("grid", "ymax", *ymax);
    g.ny = parse_long("grid", "ny", *ny);
  }
  if (!(g.xmax > g.xmin) || g.nx < 2 ||
      (g.two_d && (!(g.ymax > g.ymin) || g.ny < 2)))
    throw ConfigError("[grid] extent must be positive with at least 2 samples per axis");
  return g;
}

ScenarioConfig::EventBlock parse_event(RawConfig& raw, const std::string& sec) {
  ScenarioConfig::EventBlock e;
  const std::string* x = raw.find(sec, "x");
  const std::string* y = raw.find(sec, "y");
  const std::string* t = raw.find(sec, "t");
  if (!x || !y || !t) throw ConfigError("[" + sec + "] requires x, y, t");
  e.x = parse_double(sec, "x", *x);
  e.y = parse_double(sec, "y", *y);
  e.t = parse_double(sec, "t", *t);
  return e;
}

ScenarioConfig::ObstacleBlock parse_obstacle(RawConfig& raw) {
  ScenarioConfig::ObstacleBlock o;
  read_into(raw, "obstacle", "radius", o.radius, parse_double);
  read_into(raw, "obstacle", "theta_start", o.theta_start, parse_double);
  read_into(raw, "obstacle", "theta_end", o.theta_end, parse_double);
  read_into(raw, "obstacle", "thickness", o.thickness, parse_double);
  read_into(raw, "obstacle", "strength", o.strength, parse_double);
  if (const std::string* m = raw.find("obstacle", "mode")) {
    if (*m == "barrier")
      o.mode = ArcMode::barrier;
    else if (*m == "absorber")
      o.mode = ArcMode::absorber;
    else
      throw ConfigError("[obstacle] mode must be 'barrier' or 'absorber'");
  }
  if (!(o.radius > 0)) throw ConfigError("[obstacle] radius must be positive");
  if (!(o.thickness > 0)) throw ConfigError("[obstacle] thickness must be positive");
  if (o.strength < 0) throw ConfigError("[obstacle] strength must be >= 0");
  if (!(o.theta_end > o.theta_start))
    throw ConfigError("[obstacle] theta_end must exceed theta_start");
  return o;
}

ScenarioConfig::MziBlock parse_mzi(RawConfig& raw) {
  ScenarioConfig::MziBlock m;
  read_into(raw, "mzi", "arm", m.arm, parse_double);
  read_into(raw, "mzi", "source_arm", m.source_arm, parse_double);
  read_into(raw, "mzi", "detector_arm", m.detector_arm, parse_double);
  read_into(raw, "mzi", "block_upper", m.block_upper, parse_bool);
  read_into(raw, "mzi", "k", m.k, parse_double);
  read_into(raw, "mzi", "sigma", m.sigma, parse_double);
  if (!(m.arm > 0) || !(m.source_arm > 0) || !(m.detector_arm > 0))
    throw ConfigError("[mzi] arm lengths must be positive");
  if (!(m.k > 0)) throw ConfigError("[mzi] k must be positive");
  if (!(m.sigma > 0)) throw ConfigError("[mzi] sigma must be positive");
  return m;
}

ScenarioConfig::RunBlock parse_run(RawConfig& raw) {
  ScenarioConfig::RunBlock r;
  if (const std::string* v = raw.find("run", "sample_times"))
    r.sample_times = parse_double_list("run", "sample_times", *v);
  long snapshots = r.snapshots;
  read_into(raw, "run", "snapshots", snapshots, parse_long);
  r.snapshots = int(snapshots);
  read_into(raw, "run", "dt", r.dt, parse_double);
  if (const std::string* v = raw.find("run", "output")) r.output_dir = *v;
  read_into(raw, "run", "emit_csv", r.emit_csv, parse_bool);
  read_into(raw, "run", "emit_heatmaps", r.emit_heatmaps, parse_bool);
  long detectors = r.detectors;
  read_into(raw, "run", "detectors", detectors, parse_long);
  r.detectors = int(detectors);
  read_into(raw, "run", "absorb_time", r.absorb_time, parse_double);
  read_into(raw, "run", "absorb_dt", r.absorb_dt, parse_double);

  if (!(r.dt > 0)) throw ConfigError("[run] dt must be positive");
  if (r.snapshots < 2) throw ConfigError("[run] snapshots must be >= 2");
  if (r.detectors < 4) throw ConfigError("[run] detectors must be >= 4");
  if (!(r.absorb_time > 0) || !(r.absorb_dt > 0))
    throw ConfigError("[run] absorb_time and absorb_dt must be positive");
  return r;
}

void require_inside_grid(const ScenarioConfig::GridBlock& g, const ScenarioConfig::EventBlock& e,
                         const char* name) {
  if (e.x < g.xmin || e.x > g.xmax || (g.two_d && (e.y < g.ymin || e.y > g.ymax)))
    throw ConfigError(std::string(name) + " event lies outside the grid box");
}

void validate(ScenarioConfig& cfg) {
  const std::string& s = cfg.scenario;
  if (s == "renninger1960" || s == "angular_ensemble") {
    if (!cfg.grid || !cfg.source || !cfg.detector)
      throw ConfigError(s + " requires [grid], [source] and [detector]");
    if (!cfg.grid->two_d) throw ConfigError(s + " requires a 2D grid");
    require_inside_grid(*cfg.grid, *cfg.source, "source");
    require_inside_grid(*cfg.grid, *cfg.detector, "detector");
    if (!(cfg.detector->t > cfg.source->t))
      throw ConfigError("detector time must exceed source time");
  } else if (s == "squarewell") {
    if (!cfg.grid) throw ConfigError("squarewell requires [grid]");
    if (cfg.grid->two_d) throw ConfigError("squarewell requires a 1D grid");
    if (cfg.grid->xmin != 0)
      throw ConfigError("squarewell grid must start at x = 0 (well on [0, a))");
    if (cfg.obstacle) throw ConfigError("squarewell does not accept [obstacle]");
    if (cfg.mzi) throw ConfigError("squarewell does not accept [mzi]");
  } else if (s == "renninger1953") {
    if (!cfg.mzi) cfg.mzi = ScenarioConfig::MziBlock{};
    if (cfg.obstacle) throw ConfigError("renninger1953 does not accept [obstacle]");
    if (cfg.grid && !cfg.grid->two_d)
      throw ConfigError("renninger1953 render grid must be 2D");
  } else {
    throw ConfigError("unknown scenario name '" + s + "'");
  }

  if (!cfg.run.sample_times.empty()) {
    auto st = cfg.run.sample_times;
    if (!std::is_sorted(st.begin(), st.end()))
      throw ConfigError("[run] sample_times must be ascending");
    if (std::adjacent_find(st.begin(), st.end()) != st.end())
      throw ConfigError("[run] sample_times must be distinct");
    if (st.size() < 3) throw ConfigError("[run] need at least 3 sample times");
    if (cfg.source && cfg.detector) {
      if (st.front() < cfg.source->t || st.back() > cfg.detector->t)
        throw ConfigError("[run] sample_times must lie within [t_i, t_f]");
    }
  }

  // mixing analytic free states with barrier-evolved states would break
  // A_s constancy; the diffraction mode always evolves both fields
  if (cfg.obstacle && s == "renninger1960" && cfg.obstacle->mode == ArcMode::absorber)
    throw ConfigError("renninger1960 diffraction mode requires a barrier-mode obstacle");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);

  ScenarioConfig cfg;
  if (!raw.has("run")) throw ConfigError("missing required section [run]");
  const std::string* name = raw.find("run", "scenario");
  if (!name) throw ConfigError("[run] requires the scenario key");
  cfg.scenario = *name;

  cfg.run = parse_run(raw);
  if (raw.has("grid")) cfg.grid = parse_grid(raw);
  if (raw.has("source")) cfg.source = parse_event(raw, "source");
  if (raw.has("detector")) cfg.detector = parse_event(raw, "detector");
  if (raw.has("obstacle")) cfg.obstacle = parse_obstacle(raw);
  if (raw.has("mzi")) cfg.mzi = parse_mzi(raw);

  raw.check_all_consumed();
  validate(cfg);
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace tsq

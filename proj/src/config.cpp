#include "homog/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace homog {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': cannot parse number '" + tok + "'");
    }
  }
  return out;
}

double one_number(const std::string& v, const std::string& key) {
  auto nums = parse_numbers(v, key);
  if (nums.size() != 1) throw ConfigError("config key '" + key + "' expects a single number");
  return nums[0];
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

PhysicalParams ExperimentConfig::physical() const {
  PhysicalParams p;
  p.Re = Re;
  p.Fr = Fr;
  p.S = S;
  p.g_body = g_body;
  const double fc = f_const;
  p.f_source = [fc](const Vec2&) { return fc; };
  p.k_bc = k_fn();
  return p;
}

std::function<double(const Vec2&)> ExperimentConfig::k_fn() const {
  if (k_preset == "x1") return [](const Vec2& x) { return x[0]; };
  if (k_preset == "x2") return [](const Vec2& x) { return x[1]; };
  if (k_preset == "zero") return [](const Vec2&) { return 0.0; };
  try {
    const double c = std::stod(k_preset);
    return [c](const Vec2&) { return c; };
  } catch (const std::exception&) {
    throw ConfigError("unknown k preset '" + k_preset + "' (expected x1, x2, zero or a constant)");
  }
}

std::string ExperimentConfig::cell_hash() const {
  CellGeometry g;
  g.inclusion = inclusion;
  g.coeff = coeff;
  g.resolution = cell_resolution;
  char buf[128];
  std::snprintf(buf, sizeof(buf), ";tolc=%.17g;beta=%.17g;mupen=%.17g;mif=%.17g", tol_cell,
                stab_beta, mu_pen, max_iter_factor);
  return hex(fnv1a(g.signature() + buf));
}

std::string ExperimentConfig::config_hash() const { return hex(fnv1a(config_to_text(*this))); }

void ExperimentConfig::validate() const {
  inclusion.validate();
  coeff.validate();
  if (cell_resolution < 8) throw ConfigError("cell.resolution must be >= 8");
  if (macro_resolution_per_cell < 8) throw ConfigError("macro.resolution_per_cell must be >= 8");
  if (sweep_m.empty()) throw ConfigError("sweep.epsilons must be non-empty");
  for (size_t i = 0; i < sweep_m.size(); ++i) {
    if (sweep_m[i] < 2) throw ConfigError("sweep entries must be m >= 2 (epsilon = 1/m)");
    if (i > 0 && sweep_m[i] <= sweep_m[i - 1])
      throw ConfigError("sweep epsilon list must be strictly decreasing");
  }
  if (!(tol_cell > 0 && tol_macro > 0 && max_iter_factor > 0 && stab_beta > 0 && mu_pen > 0))
    throw ConfigError("solver/stokes parameters must be positive");
  if (!(Re > 0 && Fr > 0 && S >= 0)) throw ConfigError("physics: Re, Fr > 0 and S >= 0 required");
  if (formats != "csv" && formats != "json" && formats != "both")
    throw ConfigError("output.formats must be csv, json or both");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  k_fn();  // validates the preset
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hashpos = line.find('#');
    if (hashpos != std::string::npos) line = line.substr(0, hashpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) +
                                                ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");

    if (key == "inclusion.kind") {
      if (val == "none") c.inclusion.kind = InclusionKind::none;
      else if (val == "disk") c.inclusion.kind = InclusionKind::disk;
      else if (val == "ellipse") c.inclusion.kind = InclusionKind::ellipse;
      else if (val == "smoothed-square") c.inclusion.kind = InclusionKind::smoothed_square;
      else if (val == "laminate") c.inclusion.kind = InclusionKind::laminate;
      else throw ConfigError("unknown inclusion.kind '" + val + "'");
    } else if (key == "inclusion.center") {
      auto n = parse_numbers(val, key);
      if (n.size() != 2) throw ConfigError("inclusion.center expects two numbers");
      c.inclusion.center = Vec2(n[0], n[1]);
    } else if (key == "inclusion.radius") {
      c.inclusion.radius = one_number(val, key);
    } else if (key == "inclusion.semi_axes") {
      auto n = parse_numbers(val, key);
      if (n.size() != 2) throw ConfigError("inclusion.semi_axes expects two numbers");
      c.inclusion.semi_axes = Vec2(n[0], n[1]);
    } else if (key == "inclusion.half_width") {
      c.inclusion.half_width = one_number(val, key);
    } else if (key == "coeff.a_in" || key == "coeff.a_out") {
      auto n = parse_numbers(val, key);
      Mat2 a;
      if (n.size() == 1) a = n[0] * Mat2::Identity();
      else if (n.size() == 4) a << n[0], n[1], n[2], n[3];
      else throw ConfigError(key + " expects 1 (scalar) or 4 (row-major 2x2) numbers");
      (key == "coeff.a_in" ? c.coeff.a_in : c.coeff.a_out) = a;
    } else if (key == "cell.resolution") {
      c.cell_resolution = static_cast<int>(one_number(val, key));
    } else if (key == "macro.resolution_per_cell") {
      c.macro_resolution_per_cell = static_cast<int>(one_number(val, key));
    } else if (key == "macro.hom_resolution") {
      c.hom_resolution = static_cast<int>(one_number(val, key));
    } else if (key == "solver.tol_cell") {
      c.tol_cell = one_number(val, key);
    } else if (key == "solver.tol_macro") {
      c.tol_macro = one_number(val, key);
    } else if (key == "solver.max_iter_factor") {
      c.max_iter_factor = one_number(val, key);
    } else if (key == "stokes.stab_beta") {
      c.stab_beta = one_number(val, key);
    } else if (key == "stokes.mu_pen") {
      c.mu_pen = one_number(val, key);
    } else if (key == "physics.Re") {
      c.Re = one_number(val, key);
    } else if (key == "physics.Fr") {
      c.Fr = one_number(val, key);
    } else if (key == "physics.S") {
      c.S = one_number(val, key);
    } else if (key == "physics.f") {
      c.f_const = one_number(val, key);
    } else if (key == "physics.k") {
      c.k_preset = val;
    } else if (key == "physics.g") {
      auto n = parse_numbers(val, key);
      if (n.size() != 2) throw ConfigError("physics.g expects two numbers");
      c.g_body = Vec2(n[0], n[1]);
    } else if (key == "physics.with_stokes") {
      c.with_stokes = (val == "true" || val == "1");
    } else if (key == "sweep.epsilons") {
      auto n = parse_numbers(val, key);
      c.sweep_m.clear();
      for (double m : n) c.sweep_m.push_back(static_cast<int>(m));
    } else if (key == "output.dir") {
      c.out_dir = val;
    } else if (key == "output.formats") {
      c.formats = val;
    } else if (key == "output.workers") {
      c.workers = static_cast<int>(one_number(val, key));
    } else if (key == "output.seed") {
      c.seed = static_cast<unsigned>(one_number(val, key));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream o;
  const char* kind = "disk";
  switch (c.inclusion.kind) {
    case InclusionKind::none: kind = "none"; break;
    case InclusionKind::disk: kind = "disk"; break;
    case InclusionKind::ellipse: kind = "ellipse"; break;
    case InclusionKind::smoothed_square: kind = "smoothed-square"; break;
    case InclusionKind::laminate: kind = "laminate"; break;
  }
  char buf[2048];
  std::string sweep;
  for (size_t i = 0; i < c.sweep_m.size(); ++i)
    sweep += (i ? "," : "") + std::to_string(c.sweep_m[i]);
  std::snprintf(
      buf, sizeof(buf),
      "[inclusion]\nkind = %s\ncenter = %.17g,%.17g\nradius = %.17g\nsemi_axes = %.17g,%.17g\n"
      "half_width = %.17g\n[coeff]\na_in = %.17g,%.17g,%.17g,%.17g\na_out = %.17g,%.17g,%.17g,%.17g\n"
      "[cell]\nresolution = %d\n[macro]\nresolution_per_cell = %d\nhom_resolution = %d\n"
      "[solver]\ntol_cell = %.17g\ntol_macro = %.17g\nmax_iter_factor = %.17g\n"
      "[stokes]\nstab_beta = %.17g\nmu_pen = %.17g\n"
      "[physics]\nRe = %.17g\nFr = %.17g\nS = %.17g\nf = %.17g\nk = %s\ng = %.17g,%.17g\n"
      "with_stokes = %s\n[sweep]\nepsilons = %s\n[output]\ndir = %s\nformats = %s\nworkers = %d\n"
      "seed = %u\n",
      kind, c.inclusion.center[0], c.inclusion.center[1], c.inclusion.radius,
      c.inclusion.semi_axes[0], c.inclusion.semi_axes[1], c.inclusion.half_width,
      c.coeff.a_in(0, 0), c.coeff.a_in(0, 1), c.coeff.a_in(1, 0), c.coeff.a_in(1, 1),
      c.coeff.a_out(0, 0), c.coeff.a_out(0, 1), c.coeff.a_out(1, 0), c.coeff.a_out(1, 1),
      c.cell_resolution, c.macro_resolution_per_cell, c.hom_resolution, c.tol_cell, c.tol_macro,
      c.max_iter_factor, c.stab_beta, c.mu_pen, c.Re, c.Fr, c.S, c.f_const, c.k_preset.c_str(),
      c.g_body[0], c.g_body[1], c.with_stokes ? "true" : "false", sweep.c_str(),
      c.out_dir.c_str(), c.formats.c_str(), c.workers, c.seed);
  o << buf;
  return o.str();
}

}  // namespace homog

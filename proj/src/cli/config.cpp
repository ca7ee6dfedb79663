#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "qpf/cli.hpp"
#include "qpf/errors.hpp"

namespace qpf::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) fail(key, "expected a number, got '" + text + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(key, "expected a number, got '" + text + "'");
  }
}

int to_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size() || v < -1'000'000'000L || v > 1'000'000'000L)
      fail(key, "expected an integer, got '" + text + "'");
    return static_cast<int>(v);
  } catch (const std::logic_error&) {
    fail(key, "expected an integer, got '" + text + "'");
  }
}

std::vector<int> to_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, "empty list entry");
    out.push_back(to_int(key, item));
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig c;
  std::optional<double> lambda, mass;
  double hbar = 1.0;
  std::map<std::string, int> seen;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"N", [&](auto& k, auto& v) { c.system.particles = to_int(k, v); }},
      {"d", [&](auto& k, auto& v) { c.system.dim = to_int(k, v); }},
      {"L", [&](auto& k, auto& v) { c.system.box_length = to_double(k, v); }},
      {"beta", [&](auto& k, auto& v) { c.system.beta = to_double(k, v); }},
      {"lambda", [&](auto& k, auto& v) { lambda = to_double(k, v); }},
      {"mass", [&](auto& k, auto& v) { mass = to_double(k, v); }},
      {"hbar", [&](auto& k, auto& v) { hbar = to_double(k, v); }},
      {"statistics",
       [&](auto& k, auto& v) {
         try {
           c.system.statistics = parse_statistics(v);
         } catch (const std::domain_error&) {
           fail(k, "expected bose or fermi, got '" + v + "'");
         }
       }},
      {"potential",
       [&](auto& k, auto& v) {
         if (v != "zero" && v != "gaussian" && v != "table")
           fail(k, "expected zero, gaussian or table, got '" + v + "'");
         c.potential = v;
       }},
      {"g", [&](auto& k, auto& v) { c.strength = to_double(k, v); }},
      {"a", [&](auto& k, auto& v) { c.range = to_double(k, v); }},
      {"potential_table",
       [&](auto&, auto& v) {
         std::filesystem::path p(v);
         c.potential_table = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
       }},
      {"alpha_max", [&](auto& k, auto& v) { c.policy.alpha_max = to_int(k, v); }},
      {"z_radius", [&](auto& k, auto& v) { c.policy.z_radius = to_int(k, v); }},
      {"coeff_bound", [&](auto& k, auto& v) { c.policy.coeff_bound = to_int(k, v); }},
      {"quad_nodes", [&](auto& k, auto& v) { c.policy.quad_nodes = to_int(k, v); }},
      {"theta_tol", [&](auto& k, auto& v) { c.policy.theta_tol = to_double(k, v); }},
      {"threads", [&](auto& k, auto& v) { c.policy.threads = to_int(k, v); }},
      {"max_particles", [&](auto& k, auto& v) { c.max_particles = to_int(k, v); }},
      {"m_list", [&](auto& k, auto& v) { c.m_list = to_int_list(k, v); }},
      {"ed_cutoff", [&](auto& k, auto& v) { c.ed_cutoff = to_int(k, v); }},
      {"discrete_z_cutoff", [&](auto& k, auto& v) { c.discrete_z_cutoff = to_int(k, v); }},
      {"matrix_m", [&](auto& k, auto& v) { c.matrix_m = to_int(k, v); }},
      {"tol", [&](auto& k, auto& v) { c.tol = to_double(k, v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) fail(key, "unknown key (line " + std::to_string(line_no) + ")");
    if (seen.count(key)) fail(key, "given twice (lines " + std::to_string(seen[key]) + " and " +
                                       std::to_string(line_no) + ")");
    seen[key] = line_no;
    if (value.empty()) fail(key, "missing value");
    it->second(key, value);
  }

  if (lambda && mass) fail("lambda", "give either lambda or mass, not both");
  if (mass) {
    try {
      c.system.lambda = thermal_wavelength(c.system.beta, *mass, hbar);
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  } else if (lambda) {
    c.system.lambda = *lambda;
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("--config", "cannot open '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

void validate(const RunConfig& c) {
  try {
    c.system.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (c.system.particles > c.max_particles)
    fail("N", "exceeds max_particles = " + std::to_string(c.max_particles));
  c.policy.validate();
  if (c.policy.threads < 1) fail("threads", "must be >= 1");
  if (c.potential == "gaussian") {
    if (!std::isfinite(c.strength)) fail("g", "must be finite");
    if (!(c.range > 0.0) || !std::isfinite(c.range)) fail("a", "must be > 0");
  }
  if (c.potential == "table") {
    if (c.potential_table.empty()) fail("potential_table", "required when potential = table");
    if (!std::filesystem::exists(c.potential_table))
      fail("potential_table", "file '" + c.potential_table + "' does not exist");
  }
  for (int m : c.m_list)
    if (m < 1) fail("m_list", "entries must be >= 1");
  if (c.ed_cutoff < 1) fail("ed_cutoff", "must be >= 1");
  if (c.discrete_z_cutoff < 0) fail("discrete_z_cutoff", "must be >= 0");
  if (c.matrix_m && (*c.matrix_m < 2 || *c.matrix_m > 400)) fail("matrix_m", "must lie in [2, 400]");
  if (c.tol && !(*c.tol > 0.0)) fail("tol", "must be > 0");
}

DualPotential make_potential(const RunConfig& c) {
  try {
    if (c.potential == "gaussian") return DualPotential::gaussian(c.system.dim, c.strength, c.range);
    if (c.potential == "table") {
      auto pot = DualPotential::load_table_file(c.potential_table, c.system.box_length);
      if (pot.dim() != c.system.dim)
        fail("potential_table", "table dimension " + std::to_string(pot.dim()) + " differs from d");
      return pot;
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    fail("potential_table", e.what());
  } catch (const std::domain_error& e) {
    fail("potential", e.what());
  }
  return DualPotential::zero(c.system.dim);
}

}  // namespace qpf::cli

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "qpf/cli.hpp"
#include "qpf/coupling_graph.hpp"
#include "qpf/cycles.hpp"
#include "qpf/errors.hpp"
#include "qpf/oracles.hpp"

namespace qpf::cli {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", x);
  return buf;
}

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

json system_json(const SystemParams& s) {
  return {{"N", s.particles},       {"d", s.dim},           {"L", s.box_length},
          {"beta", s.beta},         {"lambda", s.lambda},
          {"statistics", std::string(to_string(s.statistics))}};
}

json policy_json(const TruncationPolicy& p) {
  return {{"alpha_max", p.alpha_max},
          {"z_radius", p.z_radius},
          {"coeff_bound", p.effective_coeff_bound()},
          {"quad_nodes", p.quad_nodes},
          {"theta_tol", p.theta_tol}};
}

void write_json(const std::string& path, const json& doc) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("--out: cannot write '" + path + "'");
  f << doc.dump(2) << '\n';
}

void write_breakdown_csv(const std::string& path, const EvaluationResult& r) {
  std::ofstream f(path + ".breakdown.csv");
  if (!f) throw ConfigError("--out: cannot write '" + path + ".breakdown.csv'");
  f << "p,alpha,value\n";
  for (const auto& [key, v] : r.breakdown) f << key.first << ',' << key.second << ',' << num(v) << '\n';
}

void print_breakdown(std::ostream& out, const EvaluationResult& r) {
  out << "breakdown:\n";
  out << "  p  alpha  value\n";
  for (const auto& [key, v] : r.breakdown) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-2d %-6d %.16g\n", key.first, key.second, v);
    out << line;
  }
}

json breakdown_json(const EvaluationResult& r) {
  json rows = json::array();
  for (const auto& [key, v] : r.breakdown) rows.push_back({{"p", key.first}, {"alpha", key.second}, {"value", v}});
  return rows;
}

void require_two_particles(const RunConfig& c) {
  if (c.system.particles != 2)
    throw ConfigError("N: this oracle needs N = 2 (got " + std::to_string(c.system.particles) + ")");
}

int oracle_ideal_gas(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol.value_or(1e-12);
  const DualPotential zero = DualPotential::zero(c.system.dim);
  const EvaluationResult series = evaluate_Q(c.system, zero, c.policy, c.max_particles);
  const double oracle = ideal_gas_Q(c.system);
  const double rel = relative_difference(series.Q, oracle);
  const bool ok = rel <= tol;
  out << "oracle: ideal-gas\n"
      << "series_Q: " << num(series.Q) << "\n"
      << "oracle_Q: " << num(oracle) << "\n"
      << "relative_difference: " << num(rel) << "\n"
      << "tolerance: " << num(tol) << "\n"
      << "status: " << (ok ? "pass" : "FAIL") << "\n";
  write_json(c.out, {{"oracle", "ideal-gas"},
                     {"system", system_json(c.system)},
                     {"series_Q", series.Q},
                     {"oracle_Q", oracle},
                     {"relative_difference", rel},
                     {"tolerance", tol},
                     {"pass", ok}});
  return ok ? kOk : kFailed;
}

int oracle_discrete2(const RunConfig& c, std::ostream& out) {
  require_two_particles(c);
  const DualPotential pot = make_potential(c);
  std::vector<int> ms = c.m_list;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.size() < 2) throw ConfigError("m_list: need at least two distinct slice counts");
  for (int m : ms)
    if (m < c.policy.alpha_max) throw ConfigError("m_list: entries must be >= alpha_max");

  bool all_ok = true;
  json parts = json::array();
  out << "oracle: discrete2\n";
  const std::pair<const char*, TwoParticlePartition> which[] = {
      {"[2]", TwoParticlePartition::two_cycle}, {"[1,1]", TwoParticlePartition::two_fixed}};
  for (const auto& [label, part] : which) {
    const CycleStructure cycles{part == TwoParticlePartition::two_cycle ? std::vector<int>{2}
                                                                      : std::vector<int>{1, 1}};
    const double cont = evaluate_G(cycles, c.system, pot, c.policy);
    out << "partition " << label << "\n"
        << "  continuous_G: " << num(cont) << "\n"
        << "  m      discrete_G             difference\n";
    std::vector<double> diffs, values;
    json rows = json::array();
    for (int m : ms) {
      DiscretePolicy dp;
      dp.m = m;
      dp.z_cutoff = c.discrete_z_cutoff;
      dp.alpha_max = c.policy.alpha_max;
      const double g = discrete_G2(part, c.system, pot, dp);
      values.push_back(g);
      diffs.push_back(g - cont);
      char line[128];
      std::snprintf(line, sizeof line, "  %-6d %-22.16g %.6e\n", m, g, g - cont);
      out << line;
      rows.push_back({{"m", m}, {"discrete_G", g}, {"difference", g - cont}});
    }
    bool shrinking = true;
    for (std::size_t i = 1; i < diffs.size(); ++i)
      shrinking = shrinking && std::abs(diffs[i]) < std::abs(diffs[i - 1]);
    const double increment = std::abs(values.back() - values[values.size() - 2]);
    const bool close = std::abs(diffs.back()) <= 3.0 * increment;
    const bool ok = shrinking && close;
    all_ok = all_ok && ok;
    out << "  differences_shrink: " << (shrinking ? "yes" : "no") << "\n"
        << "  last_within_3x_increment: " << (close ? "yes" : "no") << "\n"
        << "  status: " << (ok ? "pass" : "FAIL") << "\n";
    parts.push_back({{"partition", label},
                     {"continuous_G", cont},
                     {"rows", rows},
                     {"differences_shrink", shrinking},
                     {"last_within_3x_increment", close},
                     {"pass", ok}});
  }
  out << "status: " << (all_ok ? "pass" : "FAIL") << "\n";
  write_json(c.out, {{"oracle", "discrete2"},
                     {"system", system_json(c.system)},
                     {"policy", policy_json(c.policy)},
                     {"discrete_z_cutoff", c.discrete_z_cutoff},
                     {"partitions", parts},
                     {"pass", all_ok}});
  return all_ok ? kOk : kFailed;
}

int oracle_exactdiag(const RunConfig& c, std::ostream& out) {
  require_two_particles(c);
  const DualPotential pot = make_potential(c);
  const EvaluationResult series = evaluate_Q(c.system, pot, c.policy, c.max_particles);
  const ExactDiagResult exact = exact_Q2(c.system, pot, c.ed_cutoff);
  const double rel = relative_difference(series.Q, exact.Q);
  const double tail_rel = exact.Q != 0.0 ? series.tail_bound_estimate / std::abs(exact.Q) : 0.0;
  const double tol = std::max(c.tol.value_or(1e-2), tail_rel);
  const bool ok = rel <= tol && exact.cutoff_adequate;
  out << "oracle: exactdiag\n"
      << "series_Q: " << num(series.Q) << "\n"
      << "exact_Q: " << num(exact.Q) << "\n"
      << "relative_difference: " << num(rel) << "\n"
      << "tail_bound_estimate: " << num(series.tail_bound_estimate) << "\n"
      << "tolerance: " << num(tol) << "\n"
      << "momentum_cutoff: " << c.ed_cutoff << "\n"
      << "boundary_weight: " << num(exact.boundary_weight) << "\n"
      << "cutoff_adequate: " << (exact.cutoff_adequate ? "yes" : "no") << "\n"
      << "status: " << (ok ? "pass" : "FAIL") << "\n";
  write_json(c.out, {{"oracle", "exactdiag"},
                     {"system", system_json(c.system)},
                     {"policy", policy_json(c.policy)},
                     {"series_Q", series.Q},
                     {"exact_Q", exact.Q},
                     {"relative_difference", rel},
                     {"tail_bound_estimate", series.tail_bound_estimate},
                     {"tolerance", tol},
                     {"momentum_cutoff", c.ed_cutoff},
                     {"boundary_weight", exact.boundary_weight},
                     {"cutoff_adequate", exact.cutoff_adequate},
                     {"pass", ok}});
  return ok ? kOk : kFailed;
}

int oracle_matrix_a(const RunConfig& c, std::ostream& out) {
  std::vector<int> ms;
  if (c.matrix_m)
    ms.push_back(*c.matrix_m);
  else
    for (int m = 2; m <= 50; ++m) ms.push_back(m);
  bool all_ok = true;
  double worst = 0.0;
  json rows = json::array();
  out << "oracle: matrix-a\n";
  for (int m : ms) {
    const MatrixACheck r = matrix_A_check(m);
    all_ok = all_ok && r.passed();
    worst = std::max(worst, r.max_residual);
    if (ms.size() == 1) out << r.report();
    else if (!r.passed()) out << "m=" << m << " FAIL\n" << r.report();
    rows.push_back({{"m", m},
                    {"inverse_exact", r.inverse_exact},
                    {"eigenpairs", r.eigenpairs_ok},
                    {"degeneracy", r.degeneracy_ok},
                    {"max_residual", r.max_residual}});
  }
  if (ms.size() > 1) {
    out << "m_range=" << ms.front() << ".." << ms.back() << "\n";
    char line[64];
    std::snprintf(line, sizeof line, "max_residual=%.6e\n", worst);
    out << line;
  }
  out << "status: " << (all_ok ? "pass" : "FAIL") << "\n";
  write_json(c.out, {{"oracle", "matrix-a"}, {"checks", rows}, {"pass", all_ok}});
  return all_ok ? kOk : kFailed;
}

CouplingGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("graph file: cannot open '" + path + "'");
  std::vector<std::pair<int, int>> edges;
  int vertices = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a = 0, b = 0;
    if (!(ls >> a)) continue;
    std::string extra;
    if (!(ls >> b) || (ls >> extra))
      throw ConfigError("graph file line " + std::to_string(line_no) + ": expected two vertex indices");
    if (a < 1 || b < 1)
      throw ConfigError("graph file line " + std::to_string(line_no) + ": vertices are 1-based");
    if (a == b)
      throw ConfigError("graph file line " + std::to_string(line_no) + ": self-loop");
    edges.push_back({a - 1, b - 1});
    vertices = std::max({vertices, a, b});
  }
  if (edges.empty()) throw ConfigError("graph file: no edges");
  return CouplingGraph::from_edge_list(vertices, edges);
}

}  // namespace

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  validate(c);
  const DualPotential pot = make_potential(c);
  const EvaluationResult r = evaluate_Q(c.system, pot, c.policy, c.max_particles);
  const double free_energy = r.sign > 0 ? -r.log_abs_Q / c.system.beta : std::nan("");

  out << "Q: " << num(r.Q) << "\n"
      << "log_Q: " << (r.sign > 0 ? num(r.log_abs_Q) : std::string("undefined (Q <= 0)")) << "\n"
      << "free_energy: " << num(free_energy) << "\n"
      << "prefactor: " << num(r.prefactor) << "\n";
  print_breakdown(out, r);
  out << "term_count: " << r.term_count << "\n"
      << "skipped_invalid_alpha: " << r.skipped_invalid_alpha << "\n"
      << "tail_bound_estimate: " << num(r.tail_bound_estimate) << "\n";

  int code = kOk;
  json check = nullptr;
  if (pot.is_zero()) {
    const double oracle = ideal_gas_Q(c.system);
    const double rel = relative_difference(r.Q, oracle);
    const bool ok = rel <= c.tol.value_or(1e-12);
    out << "ideal_gas_check: " << (ok ? "matches ideal-gas oracle" : "DIFFERS from ideal-gas oracle")
        << " (relative difference " << num(rel) << ")\n";
    check = {{"oracle_Q", oracle}, {"relative_difference", rel}, {"pass", ok}};
    if (!ok) code = kFailed;
  }

  if (!c.out.empty()) {
    write_json(c.out, {{"command", "evaluate"},
                       {"system", system_json(c.system)},
                       {"potential", c.potential},
                       {"policy", policy_json(c.policy)},
                       {"Q", r.Q},
                       {"log_abs_Q", r.log_abs_Q},
                       {"sign", r.sign},
                       {"free_energy", r.sign > 0 ? json(free_energy) : json(nullptr)},
                       {"prefactor", r.prefactor},
                       {"breakdown", breakdown_json(r)},
                       {"term_count", r.term_count},
                       {"skipped_invalid_alpha", r.skipped_invalid_alpha},
                       {"tail_bound_estimate", r.tail_bound_estimate},
                       {"ideal_gas_check", check}});
    write_breakdown_csv(c.out, r);
  }
  return code;
}

int cmd_oracle(const RunConfig& c, const std::string& which, std::ostream& out) {
  validate(c);
  if (which == "ideal-gas") return oracle_ideal_gas(c, out);
  if (which == "discrete2") return oracle_discrete2(c, out);
  if (which == "exactdiag") return oracle_exactdiag(c, out);
  if (which == "matrix-a") return oracle_matrix_a(c, out);
  throw ConfigError("oracle: unknown oracle '" + which + "'");
}

int cmd_graph_validate(const std::string& path, std::ostream& out) {
  const CouplingGraph g = read_edge_list(path);
  const ConstraintRank rank = constraint_rank(g);
  const int n_i = g.edge_count() - rank.rank;
  const auto bridges = bridge_edges(g);
  const bool valid = bridges.empty();
  out << "vertices: " << g.vertices << "\n"
      << "edges: " << g.edge_count() << "\n"
      << "valid: " << (valid ? "yes" : "no") << "\n"
      << "K: " << rank.rank << "\n"
      << "m: " << rank.components << "\n"
      << "N_I: " << n_i << "\n";
  if (!valid) {
    out << "bridges:";
    for (int e : bridges) out << ' ' << g.edges[e].from + 1 << '-' << g.edges[e].to + 1;
    out << "\n";
    return kFailed;
  }
  const auto x = nonzero_scalar_solution(g);
  if (!x) throw InternalError("bridgeless graph without an all-nonzero solution");
  out << "solution:";
  for (long long v : *x) out << ' ' << v;
  out << "\n";
  return kOk;
}

int cmd_unity_check(int n, std::ostream& out) {
  if (n < 1 || n > kDefaultMaxParticles)
    throw ConfigError("N: must lie in [1, " + std::to_string(kDefaultMaxParticles) + "]");
  const UnitySums s = unity_check(n);
  const bool ok = s.partition_sum == 1 && s.composition_sum == 1;
  out << "N: " << n << "\n"
      << "partition_sum: " << s.partition_sum.str() << "\n"
      << "composition_sum: " << s.composition_sum.str() << "\n"
      << "status: " << (ok ? "pass" : "FAIL") << "\n";
  return ok ? kOk : kFailed;
}

int cmd_theta(double c, int dim, double tol, std::ostream& out) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c: must be > 0");
  if (dim < 1) throw ConfigError("d: must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("--tol: must lie in (0, 1)");
  out << "theta_sum: " << num(theta_sum(c, dim, tol)) << "\n"
      << "radius: " << theta_truncation_radius(c, tol) << "\n";
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Canonical partition functions of interacting quantum gases on a torus"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  double tol = 0.0;
  int threads = 0;
  std::vector<int> m_values;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value run configuration")->required();
    sub->add_option("--out", out_path, "JSON report path");
    sub->add_option("--tol", tol, "comparison tolerance");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--m", m_values, "slice counts (discrete2) or matrix size (matrix-a)");
  };

  auto* evaluate = app.add_subcommand("evaluate", "evaluate the truncated series");
  add_common(evaluate);

  std::string which;
  auto* oracle = app.add_subcommand("oracle", "run a reference computation");
  oracle->add_option("which", which, "ideal-gas | discrete2 | exactdiag | matrix-a")
      ->required()
      ->check(CLI::IsMember({"ideal-gas", "discrete2", "exactdiag", "matrix-a"}));
  add_common(oracle);
  oracle->get_option("--config")->required(false);

  std::string graph_path;
  auto* graph = app.add_subcommand("graph-validate", "check an edge list for merger validity");
  graph->add_option("file", graph_path, "one 'l1 l2' pair of 1-based vertices per line")->required();

  int unity_n = 0;
  auto* unity = app.add_subcommand("unity-check", "exact weight sums for N");
  unity->add_option("N", unity_n)->required();

  double theta_c = 0.0;
  int theta_d = 1;
  double theta_tol = kDefaultThetaTol;
  auto* theta = app.add_subcommand("theta", "lattice theta sum with zero shift");
  theta->add_option("c", theta_c)->required();
  theta->add_option("d", theta_d)->required();
  theta->add_option("--tol", theta_tol, "absolute tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    err << msg.str();
    return kConfigError;
  }

  try {
    auto configured = [&]() {
      RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
      if (!out_path.empty()) c.out = out_path;
      if (tol > 0.0) c.tol = tol;
      if (threads > 0) c.policy.threads = threads;
      if (!m_values.empty()) {
        c.m_list = m_values;
        c.matrix_m = m_values.front();
      }
      return c;
    };
    if (*evaluate) return cmd_evaluate(configured(), out);
    if (*oracle) {
      if (config_path.empty() && which != "matrix-a")
        throw ConfigError("--config: required for oracle " + which);
      return cmd_oracle(configured(), which, out);
    }
    if (*graph) return cmd_graph_validate(graph_path, out);
    if (*unity) return cmd_unity_check(unity_n, out);
    if (*theta) return cmd_theta(theta_c, theta_d, theta_tol, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}

}  // namespace qpf::cli

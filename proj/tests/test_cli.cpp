#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "qpf/cli.hpp"
#include "qpf/errors.hpp"

namespace fs = std::filesystem;
using namespace qpf::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qpf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("qpf_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parsing", "[cli]") {
  std::istringstream text(
      "# two fermions\n"
      "N = 2\n"
      "d=1\n"
      "L = 3.5\n"
      "beta = 2\n"
      "mass = 6.283185307179586  # lambda = sqrt(2)\n"
      "statistics = fermi\n"
      "potential = table\n"
      "potential_table = u.txt\n"
      "m_list = 4, 8,16\n");
  const RunConfig c = parse_config(text, "/data");
  CHECK(c.system.particles == 2);
  CHECK(c.system.box_length == 3.5);
  CHECK(c.system.lambda == Catch::Approx(std::sqrt(2.0)));
  CHECK(c.system.statistics == qpf::Statistics::fermi);
  CHECK(c.potential_table == "/data/u.txt");
  CHECK(c.m_list == std::vector<int>{4, 8, 16});

  auto error_of = [](const std::string& body) {
    std::istringstream in(body);
    try {
      parse_config(in);
    } catch (const qpf::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK_THAT(error_of("beta = x\n"), Catch::Matchers::StartsWith("beta"));
  CHECK_THAT(error_of("colour = red\n"), Catch::Matchers::StartsWith("colour"));
  CHECK_THAT(error_of("N = 2\nN = 3\n"), Catch::Matchers::StartsWith("N"));
  CHECK_THAT(error_of("lambda = 1\nmass = 1\n"), Catch::Matchers::StartsWith("lambda"));
  CHECK_THAT(error_of("statistics = boltzmann\n"), Catch::Matchers::StartsWith("statistics"));
  CHECK_THAT(error_of("just words\n"), Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("evaluate reports and cross-checks the ideal gas", "[cli]") {
  Scratch s;
  const auto cfg = s.write("one.cfg", "N = 1\nd = 2\nL = 2\nlambda = 1\n");
  const auto r = run_cli({"evaluate", "--config", cfg});
  CHECK(r.code == kOk);
  CHECK_THAT(r.out, Catch::Matchers::StartsWith("Q: "));
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("matches ideal-gas oracle"));
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("  1  0      "));
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("free_energy"));

  const auto out = s.path("report.json");
  const auto again = run_cli({"evaluate", "--config", cfg, "--out", out});
  CHECK(again.code == kOk);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["breakdown"].size() == 1);
  CHECK(doc["ideal_gas_check"]["pass"] == true);
  CHECK(slurp(out + ".breakdown.csv").rfind("p,alpha,value\n1,0,", 0) == 0);
}

TEST_CASE("invalid configurations exit with code 2 naming the field", "[cli]") {
  Scratch s;
  const auto r = run_cli({"evaluate", "--config", s.write("bad.cfg", "N = 2\nbeta = -1\n")});
  CHECK(r.code == kConfigError);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("beta"));
  const auto missing = run_cli({"evaluate", "--config", s.write("t.cfg", "potential = table\npotential_table = nope.txt\n")});
  CHECK(missing.code == kConfigError);
  CHECK_THAT(missing.err, Catch::Matchers::ContainsSubstring("potential_table"));
  CHECK(run_cli({"evaluate", "--config", s.path("absent.cfg")}).code == kConfigError);
  CHECK(run_cli({"evaluate"}).code == kConfigError);
  CHECK(run_cli({"oracle", "nonsense"}).code == kConfigError);
  const auto z = run_cli({"evaluate", "--config", s.write("z.cfg", "N = 2\npotential = gaussian\ng = 1\nz_radius = 0\n")});
  CHECK(z.code == kConfigError);
  CHECK_THAT(z.err, Catch::Matchers::ContainsSubstring("z_radius"));
}

TEST_CASE("oracle subcommands", "[cli]") {
  Scratch s;
  const auto m3 = run_cli({"oracle", "matrix-a", "--m", "3"});
  CHECK(m3.code == kOk);
  CHECK_THAT(m3.out, Catch::Matchers::ContainsSubstring("inverse_exact=pass"));
  CHECK_THAT(m3.out, Catch::Matchers::ContainsSubstring("eigenpairs=pass"));
  CHECK_THAT(m3.out, Catch::Matchers::ContainsSubstring("degeneracy=pass"));

  const auto fermi = s.write("f.cfg", "N = 6\nd = 1\nL = 1\nlambda = 1\nstatistics = fermi\n");
  const auto ig = run_cli({"oracle", "ideal-gas", "--config", fermi});
  CHECK(ig.code == kOk);
  CHECK_THAT(ig.out, Catch::Matchers::ContainsSubstring("status: pass"));

  const auto two = s.write("two.cfg",
                           "N = 2\nL = 4\nlambda = 1\npotential = gaussian\ng = 0.2\na = 1\n"
                           "z_radius = 8\nquad_nodes = 16\nm_list = 8,16,32\ned_cutoff = 24\n");
  const auto d2 = run_cli({"oracle", "discrete2", "--config", two});
  CHECK(d2.code == kOk);
  CHECK_THAT(d2.out, Catch::Matchers::ContainsSubstring("differences_shrink: yes"));
  const auto ed = run_cli({"oracle", "exactdiag", "--config", two});
  CHECK(ed.code == kOk);
  CHECK_THAT(ed.out, Catch::Matchers::ContainsSubstring("cutoff_adequate: yes"));

  const auto coarse = s.write("coarse.cfg",
                              "N = 2\nL = 4\nlambda = 1\npotential = gaussian\ng = 0.2\na = 1\n"
                              "z_radius = 1\nquad_nodes = 4\ned_cutoff = 24\n");
  const auto tight = run_cli({"oracle", "exactdiag", "--config", coarse, "--tol", "1e-9"});
  CHECK(tight.code == kFailed);
  CHECK(run_cli({"oracle", "exactdiag", "--config", fermi}).code == kConfigError);
}

TEST_CASE("graph validation", "[cli]") {
  Scratch s;
  const auto tri = run_cli({"graph-validate", s.write("tri.txt", "1 2\n1 3\n2 3\n")});
  CHECK(tri.code == kOk);
  CHECK_THAT(tri.out, Catch::Matchers::ContainsSubstring("valid: yes"));
  CHECK_THAT(tri.out, Catch::Matchers::ContainsSubstring("K: 2"));
  CHECK_THAT(tri.out, Catch::Matchers::ContainsSubstring("N_I: 1"));
  CHECK_THAT(tri.out, Catch::Matchers::ContainsSubstring("solution: 1 -1 1"));

  const auto edge = run_cli({"graph-validate", s.write("edge.txt", "1 2\n")});
  CHECK(edge.code == kFailed);
  CHECK_THAT(edge.out, Catch::Matchers::ContainsSubstring("valid: no"));

  const auto k4 = run_cli({"graph-validate", s.write("k4.txt", "# tetrahedron\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n")});
  CHECK(k4.code == kOk);
  CHECK_THAT(k4.out, Catch::Matchers::ContainsSubstring("N_I: 3"));

  CHECK(run_cli({"graph-validate", s.write("loop.txt", "2 2\n")}).code == kConfigError);
  CHECK(run_cli({"graph-validate", s.write("junk.txt", "1 x\n")}).code == kConfigError);
}

TEST_CASE("unity check and theta", "[cli]") {
  for (const char* n : {"1", "8", "12"}) CHECK(run_cli({"unity-check", n}).code == kOk);
  CHECK(run_cli({"unity-check", "0"}).code == kConfigError);
  const auto t = run_cli({"theta", "3.141592653589793", "1"});
  CHECK(t.code == kOk);
  CHECK_THAT(t.out, Catch::Matchers::ContainsSubstring("theta_sum: 1.0864348112133"));
  CHECK(run_cli({"theta", "-1", "1"}).code == kConfigError);
}

TEST_CASE("reports are byte-identical across runs", "[cli]") {
  Scratch s;
  const auto cfg = s.write("r.cfg",
                           "N = 3\nL = 2\nlambda = 1\nstatistics = fermi\npotential = gaussian\n"
                           "g = 0.3\na = 1\nz_radius = 3\nquad_nodes = 5\n");
  const auto a = run_cli({"evaluate", "--config", cfg, "--out", s.path("a.json")});
  const auto b = run_cli({"evaluate", "--config", cfg, "--out", s.path("b.json"), "--threads", "3"});
  CHECK(a.code == kOk);
  CHECK(a.out == b.out);
  CHECK(slurp(s.path("a.json")) == slurp(s.path("b.json")));
  CHECK(slurp(s.path("a.json.breakdown.csv")) == slurp(s.path("b.json.breakdown.csv")));
}

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gluni/error.hpp"
#include "gluni/experiment.hpp"
#include "gluni/parallel.hpp"
#include "gluni/svg.hpp"
#include "gluni/verify.hpp"

using namespace gluni;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_error_path(const json& j) {
  try {
    (void)ExperimentConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

json small_disk() {
  return {{"name", "small"},
          {"domain", {{"kind", "disk"}}},
          {"mesh", {{"h", 0.08}}},
          {"gl", {{"eps_schedule", {0.3, 0.15}}}},
          {"renorm", {{"heatmap_grid", 8}}},
          {"flow", {{"source", "conformal"}, {"sigma_min", -2.0}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(GLUNI_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gluni_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config schema") {
  const auto c = ExperimentConfig::from_json(small_disk());
  CHECK(c.domain.kind == "disk");
  CHECK(c.h == 0.08);
  CHECK(c.gl.eps_schedule.size() == 2);
  CHECK(c.flow.source == "conformal");
  // round trip through the normalized form
  const auto c2 = ExperimentConfig::from_json(c.to_json());
  CHECK(c2.to_json() == c.to_json());

  auto j = small_disk();
  j["mesh"]["h"] = "fine";
  CHECK(config_error_path(j) == "mesh.h");
  j = small_disk();
  j["gl"]["bogus"] = 1;
  CHECK(config_error_path(j) == "gl.bogus");
  j = small_disk();
  j["domain"]["kind"] = "annulus";
  CHECK(config_error_path(j) == "domain.kind");
  j = small_disk();
  j["domain"] = {{"kind", "taylor"}, {"coefficients", {0.0, 1.0, "x"}}};
  CHECK(config_error_path(j) == "domain.coefficients[2]");
  j = small_disk();
  j["gl"]["eps_schedule"] = {0.1, 0.2};
  CHECK(config_error_path(j).rfind("gl.", 0) == 0);
  j = small_disk();
  j.erase("domain");
  CHECK(config_error_path(j) == "domain");
  j = small_disk();
  j["flow"]["source"] = "magic";
  CHECK(config_error_path(j) == "flow.source");
}

TEST_CASE("domain catalog") {
  for (const char* kind : {"disk", "taylor", "mobius", "square", "log_spiral"}) {
    json j = {{"kind", kind}};
    if (std::string(kind) == "taylor") j["coefficients"] = {0.0, 1.0, 0.2};
    if (std::string(kind) == "mobius") j["omega"] = {0.3, 0.1};
    auto cfg = small_disk();
    cfg["domain"] = j;
    const auto c = ExperimentConfig::from_json(cfg);
    const auto dom = build_domain(c.domain, 0.1);
    const auto mesh = build_mesh(dom, 0.1);
    CHECK(mesh.n_triangles() > 0);
    CHECK(dom.map.has_value() == (std::string(kind) != "square" && std::string(kind) != "log_spiral"));
    const auto data = build_data(c.data, dom);
    CHECK(degree(data, 1024) == 1);
  }
}

TEST_CASE("pipeline artifacts and determinism") {
  const auto cfg = ExperimentConfig::from_json(small_disk());
  const auto d1 = scratch("run1"), d2 = scratch("run2");
  set_max_threads(1);
  const auto m = run_experiment(cfg, d1.string());
  set_max_threads(3);
  (void)run_experiment(cfg, d2.string());
  set_max_threads(0);

  CHECK(m["status"] == "ok");
  for (const char* f : {"manifest.json", "mesh.json", "renorm_report.json", "flow_result.json", "gl_summary.json",
                        "fields/u_eps0.3000.json", "fields/u_eps0.1500.json", "plots/W_heatmap.svg",
                        "plots/vortex_path.svg", "plots/streamlines.svg", "plots/modulus_eps0.1500.svg",
                        "plots/quiver_eps0.1500.svg"})
    CHECK_MESSAGE(fs::exists(d1 / f), f);
  for (const auto& e : fs::recursive_directory_iterator(d1)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), d1);
    CHECK_MESSAGE(slurp(e.path()) == slurp(d2 / rel), rel.string());
  }
  // no timings anywhere in the artifacts
  CHECK(slurp(d1 / "manifest.json").find("seconds") == std::string::npos);

  const auto rep = json::parse(slurp(d1 / "renorm_report.json"));
  const auto argmin = rep["heatmap"]["argmin"];
  CHECK(std::hypot(argmin[0].get<double>(), argmin[1].get<double>()) <= 0.2);
  const auto& stages = m["stages"];
  CHECK(stages["gl"]["stages"].size() == 2);
  CHECK(stages["gl"]["vortex_path"].back().size() == 1);
  CHECK(stages["flow"]["accepted"] == true);
  CHECK(std::abs(stages["flow"]["rho"].get<double>() - two_pi) <= 1e-4);
}

TEST_CASE("domains without a uniformization skip the map stages") {
  auto j = small_disk();
  j["domain"] = {{"kind", "square"}, {"side", 2.0}};
  j["data"] = {{"kind", "power"}, {"degree", 1}};
  j["gl"]["eps_schedule"] = {0.3};
  const auto d = scratch("square");
  const auto m = run_experiment(ExperimentConfig::from_json(j), d.string());
  CHECK(m["stages"]["renorm"]["status"] == "skipped");
  CHECK(m["stages"]["flow"]["status"] == "skipped");
  CHECK(fs::exists(d / "fields/u_eps0.3000.json"));
}

TEST_CASE("svg output") {
  CHECK(color_map(0.0) == "#440154");
  CHECK(color_map(1.0) == "#fde725");
  SvgCanvas c({-1, -1}, {1, 1});
  c.circle(0.0, 3.0, "red");
  const auto s = c.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
}

TEST_CASE("verify suites") {
  CHECK(suite_criteria("fast").size() == 10);
  CHECK(suite_criteria("full").size() == 12);
  CHECK_THROWS_AS((void)suite_criteria("nightly"), ConfigError);
  const auto r = run_criterion(12);
  CHECK(r.pass);
  CHECK(format_line(r).rfind("[PASS] 12", 0) == 0);
}

TEST_CASE("cli exit codes") {
  CHECK(cli("--help") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("verify nightly") == 2);
  CHECK(cli("run " + std::string(GLUNI_TEST_DATA) + "/invalid_schema.json --out " + scratch("cli_bad").string()) == 2);
  CHECK(cli("run /nonexistent/config.json") == 2);
  const auto out = scratch("cli_mesh");
  auto j = small_disk();
  const auto cfg_path = fs::temp_directory_path() / "gluni_test_small.json";
  std::ofstream(cfg_path) << j.dump();
  CHECK(cli("mesh --config " + cfg_path.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "mesh.json"));
  // a numerical failure: the pole lies on the flow path's excluded core
  j["flow"] = {{"source", "gl"}, {"sigma_min", -3.0}};
  std::ofstream(cfg_path) << j.dump();
  const auto out2 = scratch("cli_fail");
  CHECK(cli("frame-flow " + cfg_path.string() + " --out " + out2.string()) == 3);
  CHECK(fs::exists(out2 / "error.json"));
}

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gluni/error.hpp"
#include "gluni/experiment.hpp"
#include "gluni/parallel.hpp"
#include "gluni/verify.hpp"

using namespace gluni;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailure = 1, kUsage = 2, kNumerical = 3 };

void report_error(const json& err, const std::string& out_dir) {
  std::cerr << err.dump(2) << "\n";
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!ec) std::ofstream(std::filesystem::path(out_dir) / "error.json") << err.dump(2) << "\n";
}

template <class Body>
int guarded(const std::string& out_dir, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    report_error({{"status", "error"}, {"kind", "config"}, {"path", e.path()}, {"message", e.what()}}, "");
    return kUsage;
  } catch (const NumericalError& e) {
    report_error({{"status", "error"},
                  {"kind", "numerical"},
                  {"code", std::string(to_string(e.code()))},
                  {"message", e.what()}},
                 out_dir);
    return kNumerical;
  } catch (const std::exception& e) {
    report_error({{"status", "error"}, {"kind", "internal"}, {"message", e.what()}}, out_dir);
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ginzburg-Landau vortices, renormalized energy and conformal frame flows"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker cap for parallel loops (0: all cores)");

  std::string config_path, out_dir, suite = "fast", json_out;
  auto add_stage = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config,--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "artifact directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker cap for parallel loops");
    return sub;
  };
  auto* mesh = add_stage("mesh", "mesh the configured domain");
  auto* solve = add_stage("solve-gl", "GL continuation over the eps schedule");
  auto* renorm = add_stage("renorm", "renormalized energy report and W(a) heatmap");
  auto* flow = add_stage("frame-flow", "frame flow and map reconstruction");
  auto* run = add_stage("run", "full pipeline");
  auto* verify = app.add_subcommand("verify", "acceptance checks");
  verify->add_option("suite,--suite", suite, "fast or full");
  verify->add_option("--json", json_out, "also write the results as JSON");
  verify->add_option("--threads", threads, "worker cap for parallel loops");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_max_threads(threads);

  if (verify->parsed()) {
    return guarded("", [&] {
      (void)suite_criteria(suite);  // usage error before any work
      const auto results = run_suite(suite, [](const CheckResult& r) { std::cout << format_line(r) << std::endl; });
      std::size_t passed = 0;
      json arr = json::array();
      for (const auto& r : results) {
        passed += r.pass;
        arr.push_back(r.to_json());
      }
      std::cout << passed << "/" << results.size() << " criteria passed\n";
      if (!json_out.empty()) write_json(json_out, {{"suite", suite}, {"results", arr}});
      return passed == results.size() ? kOk : kCheckFailure;
    });
  }

  ExperimentConfig cfg;
  const int loaded = guarded("", [&] {
    cfg = ExperimentConfig::load(config_path);
    return kOk;
  });
  if (loaded != kOk) return loaded;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (threads == 0 && cfg.threads != 0) set_max_threads(cfg.threads);

  return guarded(cfg.output_dir, [&] {
    json out;
    if (mesh->parsed())
      out = run_mesh(cfg, cfg.output_dir);
    else if (solve->parsed())
      out = run_gl(cfg, cfg.output_dir);
    else if (renorm->parsed())
      out = run_renorm(cfg, cfg.output_dir);
    else if (flow->parsed())
      out = run_frame_flow(cfg, cfg.output_dir);
    else if (run->parsed())
      out = run_experiment(cfg, cfg.output_dir)["stages"];
    std::cout << out.dump(2) << "\n";
    return kOk;
  });
}

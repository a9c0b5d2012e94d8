#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "equiheat/errors.hpp"
#include "equiheat/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"equiheat - equivariant heat-trace laboratory on compact model spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;

  for (const char* kind :
       {"trace", "oscillatory", "gaussian-volume", "selberg", "bundle-heat", "probes"}) {
    auto* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
    sub->add_option("--config", config_path, "flat key=value config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    auto* sub = app.get_subcommands().front();
    equiheat::ExperimentConfig cfg = equiheat::ExperimentConfig::parse_file(config_path);
    cfg.set("kind", sub->get_name());
    if (seed >= 0) cfg.set("seed", std::to_string(seed));

    equiheat::ExperimentReport rep = equiheat::run_experiment(cfg);
    std::string path = equiheat::emit_report(rep, out_dir);
    for (const auto& c : rep.checks)
      std::printf("[%s] %s: value=%.10g target=%.10g tol=%.3g\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.target, c.tolerance);
    std::printf("report: %s\n", path.c_str());
    return rep.pass ? equiheat::kExitPass : equiheat::kExitToleranceFail;
  } catch (const equiheat::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return equiheat::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return equiheat::kExitNumeric;
  }
}

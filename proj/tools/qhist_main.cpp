#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhist/cli.hpp"

namespace {

int dispatch(const std::string& cmd, const qhist::ExperimentConfig& cfg) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!cfg.run.output.empty()) {
    file.open(cfg.run.output);
    if (!file) throw qhist::ConfigError("cannot open output file: " + cfg.run.output);
    out = &file;
  }
  if (cmd == "schmidt") return qhist::run_schmidt(cfg, *out);
  if (cmd == "evolve") return qhist::run_evolve(cfg, *out);
  if (cmd == "dmatrix") return qhist::run_dmatrix(cfg, *out);
  if (cmd == "classify") return qhist::run_classify(cfg, *out);
  if (cmd == "select") return qhist::run_select(cfg, *out);
  if (cmd == "montecarlo") return qhist::run_montecarlo(cfg, *out);
  if (cmd == "compare-il") return qhist::run_compare_il(cfg, *out);
  if (cmd == "verify") return qhist::run_verify(cfg, *out);
  throw qhist::ConfigError("unknown subcommand: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"set selection for consistent histories of a spin measurement chain"};
  app.require_subcommand(1);
  std::string config_path, output, format;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "config file with key = value lines");
  app.add_option("-s,--set", overrides, "override a config key, e.g. run.samples=1000");
  app.add_option("-o,--output", output, "write rows to this file instead of stdout");
  app.add_option("-f,--format", format, "output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  const char* subs[] = {"schmidt",    "evolve",     "dmatrix", "classify",
                        "select",     "montecarlo", "compare-il", "verify"};
  const char* descs[] = {
      "Schmidt axis, norm and weights at the requested times",
      "evolved state amplitudes at one time",
      "decoherence matrix of the Schmidt-projection chain at run.times",
      "two-time consistency scan against the allowed forms",
      "maximum-information interaction and interior time",
      "selection statistics over random configurations",
      "information-entropy minimization across projection counts",
      "reduced-scale oracle and invariant suite"};
  for (size_t i = 0; i < std::size(subs); ++i)
    app.add_subcommand(subs[i], descs[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    qhist::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = qhist::parse_config_file(config_path);
    for (const auto& ov : overrides) qhist::apply_override(cfg, ov);
    if (!output.empty()) cfg.run.output = output;
    if (!format.empty()) cfg.run.format = format;
    return dispatch(app.get_subcommands().front()->get_name(), cfg);
  } catch (const qhist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qhist::DegeneracyError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const qhist::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

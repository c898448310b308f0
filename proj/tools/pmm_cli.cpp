#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pmm/errors.hpp"
#include "pmm/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Porous medium model with slow reservoirs: simulation, PDE and comparison"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::vector<std::string> overrides;
  for (const char* name : {"simulate", "solve", "stationary", "compare", "diagnose"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "key=value configuration file");
    sub->add_option("-o,--out", out, "output directory");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--replicas", replicas, "number of replicas");
    sub->add_option("-s,--set", overrides, "extra key=value settings, applied after the file");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();

  pmm::RunConfig config;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw pmm::UsageError("config", "cannot read " + config_path);
      std::ostringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    // The later of two settings wins: drop keys the command line overrides.
    std::string merged;
    std::istringstream lines(text);
    std::vector<std::string> cli = overrides;
    cli.push_back("mode=" + mode);
    if (!out.empty()) cli.push_back("out=" + out);
    if (seed) cli.push_back("seed=" + std::to_string(*seed));
    if (replicas) cli.push_back("replicas=" + std::to_string(*replicas));
    auto key_of = [](const std::string& kv) { return kv.substr(0, kv.find('=')); };
    for (std::string line; std::getline(lines, line);) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream tokens(line);
      for (std::string tok; tokens >> tok;) {
        bool overridden = false;
        for (const auto& kv : cli) overridden = overridden || key_of(kv) == key_of(tok);
        if (!overridden) merged += tok + "\n";
      }
    }
    for (const auto& kv : cli) merged += kv + "\n";
    config = pmm::parse_config(merged);
  } catch (const std::exception& e) {
    return pmm::report_failure(out, e);
  }
  return pmm::run(config);
}

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "experiments.hpp"
#include "ttu/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  bool echo = false;
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ttu::Error(ttu::Errc::ConfigError, "cannot read config '" + path + "'");
  std::ostringstream text;
  text << is.rdbuf();
  return nlohmann::json::parse(text.str());
}

int execute(ttu::cli::Experiment e, const Options& o) {
  using namespace ttu::cli;
  RunConfig config = parse_config(e, load_config(o.config_path));
  if (o.seed && !o.seeds.empty()) throw ttu::Error(ttu::Errc::ConfigError, "--seed and --seeds are exclusive");
  if (o.seed) set_seeds(config, SeedList{*o.seed});
  if (!o.seeds.empty()) set_seeds(config, parse_seed_range(o.seeds));
  if (!o.out.empty()) set_output_path(config, o.out);

  if (o.echo) {
    std::cout << to_json(config).dump(2) << '\n';
    return 0;
  }
  const std::string csv = run(config);
  if (const auto& path = output_path(config)) {
    std::ofstream os(*path, std::ios::binary);
    os << csv;
    if (!os) throw ttu::Error(ttu::Errc::ConfigError, "cannot write '" + *path + "'");
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using ttu::cli::Experiment;
  CLI::App app{"Seeded experiments for time-triggered network updates. JSON config in, CSV out."};
  app.require_subcommand(1);

  Options o;
  const std::vector<std::pair<Experiment, const char*>> commands{
      {Experiment::Swap, "Flow swap drops per seed and strategy"},
      {Experiment::Consistent, "Multi-phase consistency violations and duplicate-rule time"},
      {Experiment::Timeflip, "TimeFlip encoders against a brute-force optimum"},
      {Experiment::Oneclock, "Prediction-based scheduling error per predictor"},
      {Experiment::Rptp, "Controller-side offset estimation error"}};
  std::vector<std::pair<Experiment, CLI::App*>> subs;
  for (const auto& [e, about] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(ttu::cli::to_string(e)), about);
    sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--seed", o.seed, "Run this single seed");
    sub->add_option("--seeds", o.seeds, "Run seeds start..start+count-1, given as start:count");
    sub->add_option("--out", o.out, "Write the CSV here instead of stdout");
    sub->add_flag("--echo-config", o.echo, "Print the fully defaulted config and exit");
    subs.emplace_back(e, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& [e, sub] : subs)
      if (sub->parsed()) return execute(e, o);
  } catch (const ttu::Error& err) {
    std::cerr << "ttu: " << err.what() << '\n';
    return err.code() == ttu::Errc::InvariantBreach ? kExitInternal : kExitConfig;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "ttu: config: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "ttu: internal error: " << err.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

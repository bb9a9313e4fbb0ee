#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "roadspeed/cli.hpp"

int main(int argc, char** argv) {
  namespace rc = roadspeed::cli;
  CLI::App app{"roadspeed: spreading speeds of the road-field KPP system"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("command", command, "speed | sweep | threshold | simulate | validate")
      ->required()
      ->check(CLI::IsMember({"speed", "sweep", "threshold", "simulate", "validate"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized validation draws");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? 0 : rc::kConfigError;
  }

  rc::RunConfig cfg;
  try {
    cfg = rc::load_config(config_path, rc::parse_command(command));
  } catch (const roadspeed::Error& e) {
    std::cerr << e.what() << "\n";
    return rc::exit_code_for(e.kind());
  }
  cfg.out_dir = out_dir;
  if (*seed_opt) cfg.seed = seed;
  return rc::execute(cfg, std::cerr);
}

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "llpl/harness/commands.hpp"
#include "llpl/log.hpp"

int main(int argc, char** argv) {
  llpl::log::init_from_env();

  CLI::App app{"Lifelong policy learning experiments"};
  app.require_subcommand(1);

  llpl::harness::CommandLine cl;
  std::uint64_t seed = 0;
  std::string out;

  const char* commands[][2] = {
      {"demo-gen", "Generate the synthetic demonstration, its samples and normalizer"},
      {"train-il", "Train the initial policy on the demonstration"},
      {"run", "Run one method over the configured schedule"},
      {"compare", "Join run summaries into a comparison table"},
      {"noise-replay", "Run LLPL and IL on noise-corrupted training data"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", cl.config, "INI config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override experiment.seed");
    sub->add_option("--out", out, "Override experiment.output_dir");
    sub->callback([&cl, &seed, &out, name = std::string(name), sub] {
      cl.command = name;
      if (sub->count("--seed")) cl.seed = seed;
      if (sub->count("--out")) cl.out = out;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : llpl::harness::kExitConfig;
  }
  return llpl::harness::run_command(cl);
}

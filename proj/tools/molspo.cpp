// Command-line driver for the molecule optimization pipeline.
#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "molspo/harness/errors.hpp"
#include "molspo/harness/pipeline.hpp"

namespace {

void print_error(const molspo::harness::ErrorInfo& info) {
  const nlohmann::ordered_json j = {
      {"error", info.message}, {"kind", info.kind}, {"exit_code", info.exit_code}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace molspo::harness;

  CLI::App app{"molspo: pretrain, fine-tune and evaluate molecule optimizers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_dir;
  std::string profile = "default";
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
  std::vector<std::string> runs;
  bool quiet = false;

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "key = value config file");
    sub->add_option("-r,--run-dir", run_dir, "run directory")->required();
    sub->add_option("--profile", profile, "base defaults before the config file")
        ->check(CLI::IsMember({"default", "smoke"}));
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_flag("-q,--quiet", quiet, "suppress progress output");
    if (name == "generate") {
      sub->add_option("--checkpoint", checkpoint, "policy checkpoint (default finetuned.ckpt)");
    }
    if (name == "report") {
      sub->add_option("--runs", runs, "run directories to aggregate");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error({1, "usage", e.what()});
    return 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    CommandContext ctx;
    PipelineConfig base = profile == "smoke" ? PipelineConfig::smoke() : PipelineConfig{};
    KeyValueConfig kv;
    if (!config_path.empty()) {
      kv = KeyValueConfig::load(config_path);
    }
    if (seed) {
      kv.set("seed", std::to_string(*seed));
    }
    ctx.config = PipelineConfig::from(kv, base);
    ctx.run_dir = run_dir;
    if (!checkpoint.empty()) {
      ctx.checkpoint = checkpoint;
    }
    for (const auto& r : runs) {
      ctx.runs.emplace_back(r);
    }
    ctx.log = quiet ? nullptr : &std::cout;
    run_command(command, ctx);
  } catch (const std::exception& e) {
    const auto info = classify(e);
    print_error(info);
    return info.exit_code;
  }
  return 0;
}

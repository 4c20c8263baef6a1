#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stsm/run.hpp"

namespace {

struct Overrides {
  std::string config_file;
  std::map<std::string, std::string> values;
};

// Every configuration key doubles as a --section.key flag.
void add_config_flags(CLI::App* sub, Overrides& ov) {
  sub->add_option("-c,--config", ov.config_file, "INI configuration file")->check(CLI::ExistingFile);
  for (const auto& key : stsm::config_keys())
    sub->add_option("--" + key.name, ov.values[key.name], key.help)->group("Configuration keys");
}

stsm::RunConfig resolve(const Overrides& ov, const CLI::App* sub) {
  stsm::ConfigMap map;
  if (!ov.config_file.empty()) stsm::load_ini(ov.config_file, map);
  for (const auto& [name, value] : ov.values)
    if (sub->count("--" + name) > 0) map.set(name, value);
  return stsm::parse_config(map);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal Schmidt modes of SPDC biphotons"};
  app.require_subcommand(1);

  Overrides dec_ov, val_ov, sweep_ov, bench_ov;
  auto* dec = app.add_subcommand("decompose", "Schmidt or coherent-mode decomposition of one configuration");
  add_config_flags(dec, dec_ov);
  auto* val = app.add_subcommand("validate", "Compare the reduced pipeline with the dense oracle (axes <= 16)");
  add_config_flags(val, val_ov);
  bool corrupt = false;
  val->add_flag("--corrupt-weighting", corrupt, "Drop the radial measure from the reduced pipeline (negative control)");
  auto* swp = app.add_subcommand("sweep", "Schmidt number along one parameter axis");
  add_config_flags(swp, sweep_ov);
  auto* bench = app.add_subcommand("bench", "Time the reduced pipeline against the dense oracle");
  add_config_flags(bench, bench_ov);

  std::string artifact, what, out;
  int l = 0;
  int m = 0;
  auto* exp = app.add_subcommand("export", "Extract tables or arrays from an artifact directory");
  exp->add_option("--artifact", artifact, "Directory written by decompose or sweep")->required();
  exp->add_option("--what", what, "spectrum, mode, intensity or sweep")
      ->required()
      ->check(CLI::IsMember({"spectrum", "mode", "intensity", "sweep"}));
  exp->add_option("--l", l, "OAM index of the exported mode");
  exp->add_option("--m", m, "radial-temporal index of the exported mode");
  exp->add_option("-o,--out", out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (dec->parsed()) return stsm::run_decompose(resolve(dec_ov, dec), std::cout);
    if (val->parsed()) return stsm::run_validate(resolve(val_ov, val), corrupt, std::cout);
    if (swp->parsed()) return stsm::run_sweep(resolve(sweep_ov, swp), std::cout);
    if (bench->parsed()) return stsm::run_bench(resolve(bench_ov, bench), std::cout);
    if (exp->parsed()) return stsm::run_export(artifact, what, l, m, out, std::cout);
  } catch (const stsm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

// afbm-sim: command-line front end of the simulation harness.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "afbm/sim_harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw afbm::config_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine filter bank modulation simulator"};
  app.set_version_flag("--version", "afbm-sim 1.0");

  std::string config_path, experiment, waveform;
  std::map<std::string, std::string> flag_values;
  bool large = false, export_channels = false, print_config = false;

  app.add_option("experiment", experiment, "papr | psd | af | ber | sense | loopback | gram");
  app.add_option("--config", config_path, "key=value config file; flags override it");
  app.add_option("--waveform", waveform, "afbm-phydyas | afbm-hermite | afdm");
  for (const auto& key : afbm::config_keys()) {
    if (key == "experiment" || key == "waveform" || key == "large" || key == "export_channels") continue;
    const std::string flag = key == "snr" ? "--snr" : "--" + key;
    app.add_option(flag, flag_values[key], "config key '" + key + "'");
  }
  app.add_flag("--large", large, "full-size dimensions instead of desk-scale defaults");
  app.add_flag("--export-channels", export_channels, "write the sampled channel paths");
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    afbm::ExperimentConfig cfg;
    if (!config_path.empty()) afbm::apply_config_text(cfg, read_file(config_path));
    if (!experiment.empty()) afbm::set_config_value(cfg, "experiment", experiment);
    if (!waveform.empty()) afbm::set_config_value(cfg, "waveform", waveform);
    for (const auto& key : afbm::config_keys()) {
      auto it = flag_values.find(key);
      if (it == flag_values.end()) continue;
      if (app.count(key == "snr" ? "--snr" : "--" + key) > 0) afbm::set_config_value(cfg, key, it->second);
    }
    if (large) afbm::set_config_value(cfg, "large", "true");
    if (export_channels) afbm::set_config_value(cfg, "export_channels", "true");

    if (print_config) {
      afbm::finalize_config(cfg);
      std::cout << cfg.serialize();
      return 0;
    }
    const afbm::RunSummary res = afbm::run(cfg);
    for (const auto& f : res.files) std::cout << "wrote " << cfg.out << "/" << f << "\n";
    for (const auto& [k, v] : res.values) std::cout << k << " = " << v << "\n";
    return 0;
  } catch (const afbm::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const afbm::degenerate_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

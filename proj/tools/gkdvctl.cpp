#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "gkdv/experiments.hpp"
#include "gkdv/io.hpp"

namespace {

int parse_kind(const std::string& name, gkdv::ExperimentConfig::Kind& out) {
  using Kind = gkdv::ExperimentConfig::Kind;
  if (name == "accelerate") out = Kind::accelerate;
  else if (name == "null_control") out = Kind::null_control;
  else if (name == "stabilize") out = Kind::stabilize;
  else if (name == "residual_scaling") out = Kind::residual_scaling;
  else if (name == "free_soliton") out = Kind::free_soliton;
  else return 1;
  return 0;
}

void apply_config_file(gkdv::ExperimentConfig& config, const std::string& path) {
  for (const auto& [key, value] : gkdv::read_key_values(path)) {
    if (key == "experiment") {
      if (parse_kind(value, config.kind) != 0)
        throw std::runtime_error("unknown experiment in config file: " + value);
    } else if (key == "p") config.p = std::stoi(value);
    else if (key == "cf") config.c_f = std::stod(value);
    else if (key == "eps") config.eps_list.push_back(std::stod(value));
    else if (key == "delta") config.delta = std::stod(value);
    else if (key == "delta0") config.delta0 = std::stod(value);
    else if (key == "gamma0") config.gamma0 = std::stod(value);
    else if (key == "grid-n") config.grid_n = static_cast<std::size_t>(std::stoul(value));
    else if (key == "grid-l") config.grid_l = std::stod(value);
    else if (key == "dt") config.dt = std::stod(value);
    else if (key == "t-end") config.t_end = std::stod(value);
    else if (key == "stride") config.stride = std::stod(value);
    else if (key == "out") config.out_dir = value;
    else if (key == "budget-seconds") config.budget_seconds = std::stod(value);
    else throw std::runtime_error("unknown config key: " + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilinear-control laboratory for gKdV solitons"};
  app.get_formatter()->column_width(28);

  std::string experiment = "accelerate";
  std::string config_path;
  std::string calibrate_out;
  gkdv::ExperimentConfig config;

  app.add_option("--experiment", experiment,
                 "accelerate | null_control | stabilize | residual_scaling | free_soliton");
  app.add_option("--config", config_path, "flat key=value configuration file");
  app.add_option("--p", config.p, "nonlinearity exponent (2, 3 or 4)");
  app.add_option("--cf", config.c_f, "target velocity c_f");
  app.add_option("--eps", config.eps_list, "slow parameter(s), strictly decreasing");
  app.add_option("--delta", config.delta, "H1 target of the null-control experiment");
  app.add_option("--delta0", config.delta0, "horizon exponent delta0");
  app.add_option("--gamma0", config.gamma0, "profile steepness (0 = per-experiment default)");
  app.add_option("--grid-n", config.grid_n, "grid points override (power of two)");
  app.add_option("--grid-l", config.grid_l, "domain length override");
  app.add_option("--dt", config.dt, "time step override");
  app.add_option("--t-end", config.t_end, "final time override");
  app.add_option("--stride", config.stride, "output stride");
  app.add_option("--out", config.out_dir, "output directory for CSV/JSON");
  app.add_option("--budget-seconds", config.budget_seconds, "wall-clock budget");
  app.add_option("--calibration", config.calibration_file, "calibration constants file");
  app.add_option("--calibrate", calibrate_out,
                 "measure calibration constants and write them to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
    if (parse_kind(experiment, config.kind) != 0) {
      std::cerr << "unknown experiment: " << experiment << '\n' << app.help();
      return 2;
    }
    gkdv::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  if (!calibrate_out.empty()) {
    try {
      gkdv::Calibration calib = gkdv::run_calibration(config);
      calib.save(calibrate_out);
      std::cout << "calibration written to " << calibrate_out << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "calibration failed: " << e.what() << '\n';
      return 1;
    }
  }
  return gkdv::run_experiment(config);
}

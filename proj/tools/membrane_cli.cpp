#include "membrane/membrane.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Surface-constrained membrane minimization and verification"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0: all cores)")->check(CLI::NonNegativeNumber);

  std::string config_path;
  std::vector<double> point;
  std::string deformed;

  auto* verify = app.add_subcommand("verify", "run the constitutive checks");
  verify->add_option("config", config_path)->required();
  auto* minimize = app.add_subcommand("minimize", "minimize the energy and run diagnostics");
  minimize->add_option("config", config_path)->required();
  auto* degree = app.add_subcommand("degree", "Brouwer degree at a surface point");
  degree->add_option("config", config_path)->required();
  degree->add_option("--point", point, "target point x y z")->required()->expected(3);
  degree->add_option("--deformed", deformed, "deformed mesh (.obj); default is the initial placement");
  auto* residual = app.add_subcommand("residual", "first-variation residuals");
  residual->add_option("config", config_path)->required();
  residual->add_option("--deformed", deformed, "deformed mesh (.obj); default is the initial placement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : membrane::exit_code::config_error;
  }
  membrane::set_thread_count(threads);

  membrane::RunConfig config;
  try {
    config = membrane::load_config(config_path);
  } catch (const membrane::Error& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return membrane::exit_code::config_error;
  }

  const auto def = deformed.empty() ? std::nullopt : std::optional<std::string>(deformed);
  try {
    if (*verify) return membrane::run_verify(config);
    if (*minimize) return membrane::run_minimize(config);
    if (*degree) return membrane::run_degree(config, membrane::Vec3(point[0], point[1], point[2]), def);
    if (*residual) return membrane::run_residual(config, def);
  } catch (const membrane::Error& e) {
    std::cerr << e.what() << '\n';
    if (e.kind() == membrane::ErrorKind::InfeasibleStart) return membrane::exit_code::infeasible;
    return membrane::exit_code::failed_check;
  }
  return membrane::exit_code::failed_check;
}

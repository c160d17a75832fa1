// Batch front end: `pdhg run config.json` and `pdhg certify config.json`.

#include "pdhg/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman primal-dual hybrid gradient solver"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Solve a configured problem and write a CSV trace");
  run->add_option("config", run_path, "JSON run configuration")->required();

  std::string certify_path;
  auto* certify = app.add_subcommand("certify", "Check the step-size certificate only");
  certify->add_option("config", certify_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const bool is_run = run->parsed();
    const auto config = pdhg::cli::parse_config(read_file(is_run ? run_path : certify_path));
    return is_run ? pdhg::cli::run_command(config, std::cout, std::cerr)
                  : pdhg::cli::certify_command(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include <iostream>

#include "zrp/experiment.hpp"

int main(int argc, char** argv) {
  zrp::ExperimentConfig config;
  try {
    config = zrp::parse_config(argc, argv);
  } catch (const zrp::ConfigError& e) {
    if (e.field() == "help") {
      std::cout << e.what() + 6 << "\n";
      return 0;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return static_cast<int>(zrp::ExitCode::Usage);
  }
  return zrp::run_to_file(config, std::cout, std::cerr);
}

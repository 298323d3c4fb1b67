#include <iostream>

#include "galv/cli/commands.hpp"
#include "galv/cli/profile.hpp"

int main(int argc, char** argv) {
  galv::cli::CliEnvironment env{galv::cli::default_profile_path(), std::cout, std::cerr,
                                galv::cli::read_secret_from_terminal};
  return galv::cli::run(argc, argv, env);
}

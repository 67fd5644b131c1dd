// Runs criteria 1-10 and prints one PASS/FAIL line each. Exit status is
// nonzero when any criterion fails. Optional: --seed <u64> --json <path>.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "contestlab/acceptance.hpp"

int main(int argc, char** argv) {
  contestlab::acceptance::Options options;
  std::string json_path;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--seed") options.seed = std::strtoull(argv[i + 1], nullptr, 10);
    else if (flag == "--json") json_path = argv[i + 1];
    else {
      std::cerr << "unknown flag " << flag << "\n";
      return 2;
    }
  }
  try {
    const auto report = contestlab::acceptance::run(options);
    std::cout << report.text();
    if (!json_path.empty()) std::ofstream(json_path) << contestlab::report::dump(report.to_json());
    return report.passed() ? 0 : 4;
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 1;
  }
}

// Prints one line per acceptance criterion. Exit status is nonzero only when
// a criterion fails for a reason other than a part recorded as unattainable.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "latinv/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace latinv::acceptance;
  Options opt;
  std::vector<int> which;
  std::string report;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--serial") opt.parallel = false;
    else if (a == "--report" && i + 1 < argc) report = argv[++i];
    else which.push_back(std::atoi(a.c_str()));
  }
  const auto results = run(opt, which, [](const std::string& line) { std::cout << line << std::endl; });
  if (!report.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results)
      j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"unattainable", r.unattainable},
                   {"summary", r.summary}, {"data", r.data}});
    std::ofstream(report) << j.dump(2) << '\n';
  }
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed";
  if (!all_pass(results)) {
    std::cout << std::endl;
    return 1;
  }
  if (failed) std::cout << " (remaining failures are recorded as unattainable)";
  std::cout << std::endl;
  return 0;
}

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cvr/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  cvr::acceptance::Options o;
  std::vector<int> only;
  std::string report;
  std::string cli = CVROB_PATH;
  bool no_cli = false;
  app.add_flag("--quick", o.quick, "one refinement round");
  app.add_option("--seed", o.seed, "seed");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--report", report, "write the JSON report here");
  app.add_option("--cli", cli, "cvrob binary used by the determinism check");
  app.add_flag("--no-cli", no_cli, "skip the CLI part of the determinism check");
  app.add_option("--scratch", o.scratch_dir, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  if (!no_cli) o.cli_path = cli;

  std::vector<cvr::acceptance::Result> results;
  for (int id = 1; id <= cvr::acceptance::kCriteria; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    results.push_back(cvr::acceptance::run(id, o));
    std::cout << cvr::acceptance::line(results.back()) << std::endl;
  }
  const auto j = cvr::acceptance::report(results, o);
  if (!report.empty()) cvr::io::write_file_atomic(report, j.dump(2) + "\n");
  std::cout << j["passed"].get<int>() << "/" << results.size() << " criteria passed" << std::endl;
  return j["all_passed"].get<bool>() ? 0 : 1;
}

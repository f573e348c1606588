#ifndef NULLDIST_CLI_HPP
#define NULLDIST_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace nulldist::cli {

struct PresetResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<std::string> preset_names();
std::vector<PresetResult> run_paper_suite(double h, int threads);

/// Round to 12 significant digits.
double r12(double x);
std::string fmt12(double x);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nulldist::cli

#endif  // NULLDIST_CLI_HPP

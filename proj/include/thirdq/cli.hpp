#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thirdq/linalg.hpp"

namespace thirdq {

struct RunConfig {
  std::string command;  // spectrum | normal-form | stability | cumulants | symmetry | oracle-check | evolve-jordan
  std::string modelPath;
  std::string outputFormat = "json";  // json | csv
  std::optional<int> cutoff;
  std::optional<double> sMax;
  std::optional<int> sSteps;
  std::optional<int> order;
  std::optional<double> tol;
  std::optional<std::vector<int>> occupation;
  // evolve-jordan
  std::optional<double> time;
  std::optional<Complex> mu;
  std::optional<Complex> nu;
};

inline const std::vector<std::string> kCommands{"spectrum", "normal-form", "stability", "cumulants",
                                                "symmetry", "oracle-check", "evolve-jordan"};

/// Executes one command. Returns 0 on success, 1 on a computational error and
/// 2 on an input error; errors are written to `err` as {code, message, context}.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses "n1,n2,..." into non-negative integers.
std::vector<int> parse_occupation(const std::string& text);

/// Parses "re,im" or "re" into a complex number.
Complex parse_complex(const std::string& text);

}  // namespace thirdq

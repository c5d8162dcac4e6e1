#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace colent::cli {

/// Everything a run needs. A config document fills these first; command-line
/// flags then override individual fields.
struct ExperimentConfig {
  std::string command;
  std::string model;       ///< path, or inline JSON when it starts with '{'
  std::vector<std::string> matrices;
  std::vector<std::string> modes{"coloured"};
  std::string method = "tail_max";
  std::size_t n_max = 10;
  std::size_t n = 1;
  double epsilon = 0.5;
  std::size_t exact_threshold = 24;
  std::size_t colours = 0;
  std::string out;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string family = "rademacher";
  std::size_t m = 3;
  std::size_t depth = 2;
  bool heuristic = false;
};

/// Reads a config document. Unknown fields and wrong types are rejected with
/// the field name; malformed JSON with its line and column.
ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              ExperimentConfig base = {});

/// Exit status: 0 success, 1 usage or structural error, 2 a checked
/// inequality failed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace colent::cli

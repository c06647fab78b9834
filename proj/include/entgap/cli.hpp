#pragma once

// Command-line front end. Each run_* builds a Report holding the same
// numbers in JSON and tabular (CSV) form; run_cli parses flags, renders the
// requested format and maps failures onto exit codes:
//   0 success, 2 invalid input, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entgap/spectra.hpp"
#include "entgap/tensor.hpp"

namespace entgap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumerical = 3;

enum class OutputFormat { json, csv };

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header_comments;
  std::vector<std::string> footer_comments;
};

struct Report {
  nlohmann::ordered_json json;
  Table table;
  int exit_code = kExitOk;
};

/// 17 significant digits.
std::string format_number(double x);

Report run_counterexample(Index dim, LogBase base, double tol = 1e-8);
Report run_deform(Index dim, double eps, LogBase base, double tol = 1e-8);
Report run_scan(const FactorShape& shape, Index samples, std::uint64_t seed, LogBase base, double tol = 1e-9,
                unsigned threads = 1);
Report run_check(const std::filesystem::path& input, LogBase base, double tol = 1e-8);

struct MaximizeSource {
  std::optional<std::filesystem::path> input;  // takes precedence over dim
  Index dim = 2;
};
Report run_maximize(const MaximizeSource& source, int restarts, int sweeps, std::uint64_t seed, LogBase base,
                    double tol = 1e-8);

std::string render(const Report& report, OutputFormat format);

/// Full command line without the program name, e.g. {"counterexample", "--dim", "2"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entgap::cli

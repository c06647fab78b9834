#include "entgap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "entgap/inequality.hpp"
#include "entgap/sampling.hpp"
#include "entgap/schmidt.hpp"
#include "entgap/state_io.hpp"

namespace entgap::cli {

namespace {

// Accumulates one flat record into both output forms.
class Record {
 public:
  explicit Record(Report& r) : r_(r) {
    if (r_.table.rows.empty()) r_.table.rows.emplace_back();
  }

  Record& num(const std::string& key, double v) {
    r_.json[key] = v;
    return cell(key, format_number(v));
  }
  Record& integer(const std::string& key, std::int64_t v) {
    r_.json[key] = v;
    return cell(key, std::to_string(v));
  }
  Record& flag(const std::string& key, bool v) {
    r_.json[key] = v;
    return cell(key, v ? "1" : "0");
  }

 private:
  Record& cell(const std::string& key, std::string text) {
    r_.table.columns.push_back(key);
    r_.table.rows.front().push_back(std::move(text));
    return *this;
  }
  Report& r_;
};

void describe(Report& r, const std::string& command, LogBase base) {
  r.json["command"] = command;
  r.json["log_base"] = to_string(base);
  r.table.header_comments.push_back("command=" + command);
  r.table.header_comments.push_back(std::string("log_base=") + to_string(base));
}

void describe_state(Report& r, const FactorShape& shape, const std::string& descriptor) {
  r.json["dims"] = shape.dims();
  r.json["state"] = descriptor;
  r.table.header_comments.push_back("dims=" + to_string(shape));
  r.table.header_comments.push_back("state=" + descriptor);
}

FourFactorState load_four_factor(const std::filesystem::path& input) {
  return FourFactorState(load_state(input));
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Report run_counterexample(Index dim, LogBase base, double tol) {
  const auto s = canonical_counterexample(dim);
  const auto product = product_decomposition(dim);
  const auto entangled = entangled_decomposition(dim);
  const auto gp = bn_gap(s, product, base, DecompositionSource::product, "canonical", tol);
  const auto ge = bn_gap(s, entangled, base, DecompositionSource::entangled, "canonical", tol);

  Report r;
  describe(r, "counterexample", base);
  Record(r)
      .integer("dim", dim)
      .num("lhs", ge.lhs)
      .num("rhs_product", gp.rhs)
      .num("rhs_entangled", ge.rhs)
      .num("gap_product", gp.gap)
      .num("gap_entangled", ge.gap)
      .num("theoretical_rhs", 2.0 * log_in_base(static_cast<double>(dim), base))
      .num("residual_product", verify_decomposition(s.state(), product).residual)
      .num("residual_entangled", verify_decomposition(s.state(), entangled).residual);
  return r;
}

Report run_deform(Index dim, double eps, LogBase base, double tol) {
  const auto deformed = deformed_counterexample(dim, eps);
  const auto& dec = deformed.decomposition;
  const auto g = bn_gap(deformed.state, dec, base, DecompositionSource::deformed, "deformed", tol);
  const bool unique = std::ranges::all_of(degenerate_blocks(dec.coefficients),
                                          [](const auto& block) { return block.size() == 1; });

  Report r;
  describe(r, "deform", base);
  Record rec(r);
  rec.integer("dim", dim)
      .num("eps", eps)
      .num("lhs", g.lhs)
      .num("rhs", g.rhs)
      .num("gap", g.gap)
      .num("theoretical_rhs_limit", 2.0 * log_in_base(static_cast<double>(dim), base))
      .flag("unique", unique)
      .num("residual", verify_decomposition(deformed.state.state(), dec).residual);
  std::vector<double> coefficients(dec.coefficients.data(), dec.coefficients.data() + dec.rank());
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    r.table.columns.push_back("lambda_" + std::to_string(k));
    r.table.rows.front().push_back(format_number(coefficients[k]));
  }
  r.json["coefficients"] = coefficients;
  return r;
}

Report run_scan(const FactorShape& shape, Index samples, std::uint64_t seed, LogBase base, double tol,
                unsigned threads) {
  const auto report = scan(samples, shape, seed, {base, tol, threads});

  Report r;
  describe(r, "scan", base);
  r.json["dims"] = shape.dims();
  r.json["n_samples"] = report.n_samples;
  r.json["master_seed"] = report.master_seed;
  r.json["violation_count"] = report.violation_count;
  r.json["failed_count"] = report.failed_count;
  const bool any_ok = report.failed_count < report.n_samples;
  if (any_ok) {
    r.json["min_gap"] = report.min_gap;
    r.json["max_gap"] = report.max_gap;
    r.json["mean_gap"] = report.mean_gap;
  } else {
    r.json["min_gap"] = r.json["max_gap"] = r.json["mean_gap"] = nullptr;
  }

  auto& t = r.table;
  t.header_comments.push_back("dims=" + to_string(shape));
  t.header_comments.push_back("n_samples=" + std::to_string(report.n_samples));
  t.header_comments.push_back("master_seed=" + std::to_string(report.master_seed));
  t.columns = {"sample_index", "derived_seed", "lhs", "rhs", "gap"};
  auto& rows = r.json["per_sample"] = nlohmann::ordered_json::array();
  for (const auto& s : report.per_sample) {
    nlohmann::ordered_json row;
    row["sample_index"] = s.sample_index;
    row["derived_seed"] = s.derived_seed;
    if (s.ok()) {
      row["lhs"] = s.lhs;
      row["rhs"] = s.rhs;
      row["gap"] = s.gap;
      t.rows.push_back({std::to_string(s.sample_index), std::to_string(s.derived_seed), format_number(s.lhs),
                        format_number(s.rhs), format_number(s.gap)});
    } else {
      row["error"] = s.error;
      t.footer_comments.push_back("failed sample_index=" + std::to_string(s.sample_index) +
                                  " derived_seed=" + std::to_string(s.derived_seed) + " error=" + s.error);
    }
    rows.push_back(std::move(row));
  }
  if (any_ok) {
    t.footer_comments.push_back("min_gap=" + format_number(report.min_gap));
    t.footer_comments.push_back("max_gap=" + format_number(report.max_gap));
    t.footer_comments.push_back("mean_gap=" + format_number(report.mean_gap));
  }
  t.footer_comments.push_back("violation_count=" + std::to_string(report.violation_count));
  t.footer_comments.push_back("failed_count=" + std::to_string(report.failed_count));
  if (!any_ok) r.exit_code = kExitNumerical;
  return r;
}

Report run_check(const std::filesystem::path& input, LogBase base, double tol) {
  const auto s = load_four_factor(input);
  const auto dec = schmidt_decompose(s.state(), additivity_split());
  const auto g = bn_gap(s, dec, base, DecompositionSource::svd, input.filename().string(), tol);

  Report r;
  describe(r, "check", base);
  describe_state(r, s.shape(), g.state_descriptor);
  r.json["decomposition_source"] = to_string(g.decomposition_source);
  Record(r)
      .num("lhs", g.lhs)
      .num("rhs", g.rhs)
      .num("gap", g.gap)
      .integer("schmidt_rank", dec.rank())
      .num("residual", verify_decomposition(s.state(), dec).residual);
  return r;
}

Report run_maximize(const MaximizeSource& source, int restarts, int sweeps, std::uint64_t seed, LogBase base,
                    double tol) {
  if (restarts < 0 || sweeps < 0) throw InputError("maximize: budgets must be non-negative");
  const auto s = source.input ? load_four_factor(*source.input) : canonical_counterexample(source.dim);
  const std::string descriptor =
      source.input ? source.input->filename().string() : "canonical d=" + std::to_string(source.dim);
  MaximizeOptions options;
  options.restarts = restarts;
  options.sweeps = sweeps;
  options.seed = seed;
  options.log_base = base;
  options.residual_tol = tol;
  const auto result = maximize_rhs(s, options, descriptor);

  Report r;
  describe(r, "maximize", base);
  describe_state(r, s.shape(), descriptor);
  r.json["decomposition_source"] = to_string(result.report.decomposition_source);
  r.json["blocks"] = result.blocks;
  std::size_t largest = 0;
  for (const auto& b : result.blocks) largest = std::max(largest, b.size());
  Record(r)
      .num("lhs", result.report.lhs)
      .num("initial_rhs", result.initial_rhs)
      .num("best_rhs", result.report.rhs)
      .num("gap", result.report.gap)
      .integer("block_count", static_cast<std::int64_t>(result.blocks.size()))
      .integer("largest_block", static_cast<std::int64_t>(largest))
      .integer("restarts", restarts)
      .integer("sweeps", sweeps)
      .integer("restarts_used", result.restarts_used)
      .integer("sweeps_used", result.sweeps_used)
      .integer("evaluations", result.evaluations)
      .num("residual", verify_decomposition(s.state(), result.best).residual);
  return r;
}

std::string render(const Report& report, OutputFormat format) {
  if (format == OutputFormat::json) return report.json.dump(2) + "\n";
  std::ostringstream out;
  const auto& t = report.table;
  for (const auto& c : t.header_comments) out << "# " << c << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  for (const auto& c : t.footer_comments) out << "# " << c << '\n';
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"entgap: numerical checks of a four-party entanglement entropy inequality"};
  app.require_subcommand(1);

  Index dim = 2;
  double eps = 0.0;
  Index samples = 100;
  std::uint64_t seed = 0;
  std::string log_base = "e";
  std::optional<double> tol;
  std::string input;
  std::string output;
  std::string format = "json";
  std::vector<Index> shape;
  int restarts = 20;
  int sweeps = 50;
  unsigned threads = 1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--log-base", log_base, "Entropy logarithm base")->check(CLI::IsMember({"e", "2"}));
    sub->add_option("--tol", tol, "Residual gate for decomposition verification");
    sub->add_option("--output", output, "Write the report to this file instead of stdout");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* counterexample = app.add_subcommand("counterexample", "Evaluate the canonical counterexample");
  counterexample->add_option("--dim", dim, "Local dimension d");
  common(counterexample);

  auto* deform = app.add_subcommand("deform", "Evaluate the deformed counterexample with a unique spectrum");
  deform->add_option("--dim", dim, "Local dimension d");
  deform->add_option("--eps", eps, "Deformation strength in (0, 1)")->required();
  common(deform);

  auto* scan_cmd = app.add_subcommand("scan", "Evaluate the inequality on Haar-random states");
  scan_cmd->add_option("--dim", dim, "Local dimension d, shape (d,d,d,d)");
  scan_cmd->add_option("--shape", shape, "Explicit 4-factor shape, e.g. 3,2,3,2")->delimiter(',');
  scan_cmd->add_option("--samples", samples, "Number of samples");
  scan_cmd->add_option("--seed", seed, "Master seed");
  scan_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  common(scan_cmd);

  auto* check = app.add_subcommand("check", "Evaluate a state file with its SVD decomposition");
  check->add_option("--input", input, "State file")->required();
  common(check);

  auto* maximize = app.add_subcommand("maximize", "Maximize the right-hand side over degenerate blocks");
  maximize->add_option("--input", input, "State file (default: canonical counterexample of --dim)");
  maximize->add_option("--dim", dim, "Local dimension d of the canonical counterexample");
  maximize->add_option("--restarts", restarts, "Random unitary restarts per block");
  maximize->add_option("--sweeps", sweeps, "Greedy rotation sweeps per block");
  maximize->add_option("--seed", seed, "Seed");
  common(maximize);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  const LogBase base = log_base == "2" ? LogBase::two : LogBase::natural;
  try {
    Report report;
    if (*counterexample) {
      report = run_counterexample(dim, base, tol.value_or(kGapResidualTolerance));
    } else if (*deform) {
      report = run_deform(dim, eps, base, tol.value_or(kGapResidualTolerance));
    } else if (*scan_cmd) {
      const FactorShape s = shape.empty() ? FactorShape{dim, dim, dim, dim} : FactorShape(shape);
      report = run_scan(s, samples, seed, base, tol.value_or(kScanResidualTolerance), threads);
    } else if (*check) {
      report = run_check(input, base, tol.value_or(kGapResidualTolerance));
    } else {
      MaximizeSource source;
      if (!input.empty()) source.input = input;
      source.dim = dim;
      report = run_maximize(source, restarts, sweeps, seed, base, tol.value_or(kGapResidualTolerance));
    }

    const std::string text = render(report, format == "csv" ? OutputFormat::csv : OutputFormat::json);
    if (output.empty()) {
      out << text;
    } else {
      std::ofstream file(output);
      if (!file) throw InputError("cannot write " + output);
      file << text;
    }
    if (report.exit_code == kExitNumerical) err << "error: every sample failed numerically\n";
    return report.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    // anything else escaping the library is a numerical-layer fault
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace entgap::cli

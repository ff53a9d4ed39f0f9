// Command-line driver: test a sequence, calibrate the null distribution,
// generate sequences, export graphs.
//
// Exit codes for `test`: 0 pass, 1 fail, 2 suspicious. 3 is a usage error
// and 4 a runtime error for every subcommand.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "expander/expander.hpp"
#include "json.hpp"

namespace {

using namespace expander;

constexpr int kExitUsage = 3;
constexpr int kExitRuntime = 4;
constexpr std::size_t kAutoCalibrationTrials = 400;

struct UsageError : Error {
  using Error::Error;
};

enum class OutputFormat { kHuman, kJson, kCsv };

struct InputOptions {
  std::string input;
  std::string input_format = "lines";
  std::string source;
  std::size_t n = 0;
  std::optional<std::uint64_t> source_seed;
  unsigned base = 2;
  std::uint64_t modulus = 10001;
  double alpha = std::sqrt(2.0);
  std::optional<unsigned> bits;
};

struct AnalysisOptions {
  std::uint64_t seed = 0;
  std::string ties = "jitter";
  double tol = 1e-9;
  int max_iter = 0;
  std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  std::string format = "human";

  TiePolicy policy() const { return parse_tie_policy(ties, seed); }
  SpectralOptions solver() const {
    SpectralOptions s;
    s.tolerance = tol;
    s.max_iterations = max_iter;
    s.rng_seed = seed;
    return s;
  }
  OutputFormat output() const {
    if (format == "human") return OutputFormat::kHuman;
    if (format == "json") return OutputFormat::kJson;
    if (format == "csv") return OutputFormat::kCsv;
    throw UsageError("unknown output format '" + format + "'");
  }
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool count_required) {
  auto* input = cmd->add_option("--input", in.input, "Read values from a file ('-' for stdin)");
  auto* source = cmd->add_option("--source", in.source, "Named generator (see `generate --list`)");
  input->excludes(source);
  cmd->add_option("--input-format", in.input_format, "lines | csv")->capture_default_str();
  auto* n = cmd->add_option("--n,--count", in.n, "Number of values (prefix of a file, length of a source)");
  if (count_required) n->required();
  cmd->add_option("--source-seed", in.source_seed, "Generator seed (defaults per source)");
  cmd->add_option("--base", in.base, "van der Corput base")->capture_default_str();
  cmd->add_option("--modulus", in.modulus, "fib-mod modulus")->capture_default_str();
  cmd->add_option("--alpha", in.alpha, "kronecker multiplier")->capture_default_str();
  cmd->add_option("--bits", in.bits, "coveyou e / lagged-fib k exponent");
}

void add_analysis_options(CLI::App* cmd, AnalysisOptions& a) {
  cmd->add_option("--seed", a.seed, "Seed for tie jitter, solver start vector and calibration")->capture_default_str();
  cmd->add_option("--ties", a.ties, "Tie policy: jitter | stable")->capture_default_str();
  cmd->add_option("--tol", a.tol, "Rayleigh-quotient change tolerance")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "Iteration cap per end (0 = 100*ceil(log2 n))")->capture_default_str();
  cmd->add_option("--workers", a.workers, "Calibration worker threads")->capture_default_str();
  cmd->add_option("--format", a.format, "Output: human | json | csv")->capture_default_str();
}

SourceParams source_params(const InputOptions& in) {
  SourceParams p;
  p.seed = in.source_seed;
  p.base = in.base;
  p.modulus = in.modulus;
  p.alpha = in.alpha;
  p.bits = in.bits;
  return p;
}

Sequence load_input(const InputOptions& in) {
  if (!in.source.empty()) {
    if (in.n == 0) throw UsageError("--n is required with --source");
    return named_source(in.source, source_params(in), in.n);
  }
  if (in.input.empty()) throw UsageError("one of --input or --source is required");
  const auto format = parse_input_format(in.input_format);
  Sequence seq;
  if (in.input == "-") {
    seq = parse_sequence(std::cin, format, "stdin");
  } else {
    std::ifstream file(in.input);
    if (!file) throw Error("cannot open " + in.input);
    seq = parse_sequence(file, format, std::filesystem::path(in.input).filename().string());
  }
  if (in.n > seq.size()) {
    throw UsageError("--n " + std::to_string(in.n) + " exceeds the " + std::to_string(seq.size()) +
                     " values in the input");
  }
  seq = seq.prefix(in.n);
  seq.require_graphable();
  return seq;
}

std::string sig(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---- test -----------------------------------------------------------------

struct TestArgs {
  InputOptions in;
  AnalysisOptions analysis;
  std::string calibration;
  bool auto_calibrate = false;
  std::size_t calibration_trials = kAutoCalibrationTrials;
  double alpha_fail = 0.001;
  double alpha_suspicious = 0.01;
};

int run_test(const TestArgs& args) {
  const auto format = args.analysis.output();
  const Alphas alphas{args.alpha_fail, args.alpha_suspicious};
  if (!(alphas.fail > 0 && alphas.fail < alphas.suspicious && alphas.suspicious < 1)) {
    throw UsageError("alphas must satisfy 0 < alpha-fail < alpha-suspicious < 1");
  }
  const Sequence seq = load_input(args.in);
  const std::size_t n = seq.size();

  std::optional<CalibrationRow> row;
  if (!args.calibration.empty()) {
    const auto rows = load_calibration(args.calibration);
    if (const auto* r = find_row(rows, n)) row = *r;
  }
  if (!row) {
    if (!args.auto_calibrate) {
      throw UsageError("no calibration for n=" + std::to_string(n) +
                       "; pass --calibration with a matching row or --auto-calibrate");
    }
    if (n < kMinCalibrationN) throw UsageError("calibration requires n >= 10");
    if (args.calibration_trials < kMinCalibrationTrials) throw UsageError("--calibration-trials must be at least 100");
    std::cerr << "warning: auto-calibrating with " << args.calibration_trials
              << " trials; p-value resolution is 1/" << args.calibration_trials + 1 << "\n";
    CalibrationOptions copts;
    copts.workers = args.analysis.workers;
    copts.policy = args.analysis.policy();
    copts.solver = args.analysis.solver();
    row = calibrate_null(n, args.calibration_trials, args.analysis.seed, copts);
  }

  const auto graph = build_graph(seq, args.analysis.policy());
  const auto spectrum = compute_lambda(graph, args.analysis.solver());
  const auto report = verdict(spectrum.lambda, *row, alphas);

  auto& out = std::cout;
  switch (format) {
    case OutputFormat::kHuman:
      out << "source:      " << seq.label() << "\n"
          << "n:           " << n << "\n"
          << "lambda:      " << sig(spectrum.lambda, 6) << (spectrum.lower_bound_only ? " (lower bound)" : "") << "\n"
          << "lambda_2:    " << sig(spectrum.lambda2, 6) << "\n"
          << "lambda_n:    " << sig(spectrum.lambdaN, 6) << "\n"
          << "excess:      " << sig(report.excess, 6) << "  (lambda - 2 sqrt 3)\n"
          << "z-score:     " << sig(report.z_score, 6) << "\n"
          << "p-value:     " << sig(report.empirical_p, 6) << (report.approximate ? " (normal approx.)" : "")
          << "\n"
          << "calibration: " << report.calibration_provenance << "\n"
          << "verdict:     " << to_string(report.verdict) << "\n";
      break;
    case OutputFormat::kJson:
      out << "{\"source\":" << json_string(seq.label()) << ",\"n\":" << n << ",\"lambda\":" << sig(spectrum.lambda, 17)
          << ",\"lambda2\":" << sig(spectrum.lambda2, 17) << ",\"lambdaN\":" << sig(spectrum.lambdaN, 17)
          << ",\"excess\":" << sig(report.excess, 17) << ",\"z_score\":" << sig(report.z_score, 17)
          << ",\"empirical_p\":" << sig(report.empirical_p, 17)
          << ",\"approximate\":" << (report.approximate ? "true" : "false") << ",\"verdict\":\""
          << to_string(report.verdict) << "\",\"lower_bound_only\":" << (spectrum.lower_bound_only ? "true" : "false")
          << ",\"iterations\":" << spectrum.iterations << ",\"residual\":" << sig(spectrum.residual, 17)
          << ",\"calibration\":" << json_string(report.calibration_provenance) << "}\n";
      break;
    case OutputFormat::kCsv:
      out << "source,n,lambda,lambda2,lambdaN,excess,z_score,empirical_p,approximate,verdict,lower_bound_only,"
             "iterations,residual,calibration\n"
          << seq.label() << ',' << n << ',' << sig(spectrum.lambda, 17) << ',' << sig(spectrum.lambda2, 17) << ','
          << sig(spectrum.lambdaN, 17) << ',' << sig(report.excess, 17) << ',' << sig(report.z_score, 17) << ','
          << sig(report.empirical_p, 17) << ',' << (report.approximate ? "true" : "false") << ','
          << to_string(report.verdict) << ',' << (spectrum.lower_bound_only ? "true" : "false") << ','
          << spectrum.iterations << ',' << sig(spectrum.residual, 17) << ",\"" << report.calibration_provenance << "\"\n";
      break;
  }
  switch (report.verdict) {
    case Verdict::kPass: return 0;
    case Verdict::kFail: return 1;
    case Verdict::kSuspicious: return 2;
  }
  return kExitRuntime;
}

// ---- calibrate ------------------------------------------------------------

struct CalibrateArgs {
  std::vector<std::size_t> ns;
  std::size_t trials = 1000;
  AnalysisOptions analysis;
  std::string out = "calibration.expcal";
  std::string emit_samples;
  bool summary_only = false;
};

int run_calibrate(const CalibrateArgs& args) {
  const auto format = args.analysis.output();
  if (args.trials < kMinCalibrationTrials) throw UsageError("--trials must be at least 100");
  for (auto n : args.ns) {
    if (n < kMinCalibrationN) throw UsageError("--n must be at least 10");
  }
  CalibrationOptions copts;
  copts.workers = args.analysis.workers;
  copts.policy = args.analysis.policy();
  copts.solver = args.analysis.solver();
  copts.solver.validate();

  std::vector<CalibrationRow> rows;
  for (auto n : args.ns) rows.push_back(calibrate_null(n, args.trials, args.analysis.seed, copts));

  if (!args.emit_samples.empty()) {
    const auto tmp = args.emit_samples + ".tmp";
    {
      std::ofstream csv(tmp, std::ios::trunc);
      if (!csv) throw Error("cannot write " + tmp);
      csv << "n,trial,lambda\n";
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.raw_samples->size(); ++i) {
          csv << r.n << ',' << i << ',' << sig((*r.raw_samples)[i], 17) << '\n';
        }
      }
    }
    std::filesystem::rename(tmp, args.emit_samples);
  }
  if (args.summary_only) {
    for (auto& r : rows) r.raw_samples.reset();
  }
  save_calibration(rows, args.out);

  auto& out = std::cout;
  const char* header = "n,trials,mean,std,p_below,q01,q05,q25,q50,q75,q95,q99";
  switch (format) {
    case OutputFormat::kHuman:
      out << "     n  trials      mean       std  P(l<2sqrt3)       q50       q99\n";
      for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%6zu %7zu %9.6g %9.6g %12.6g %9.6g %9.6g\n", r.n, r.trials,
                      r.mean_lambda, r.std_lambda, r.p_below_threshold, r.quantiles[3], r.quantiles[6]);
        out << line;
      }
      out << "wrote " << args.out << "\n";
      break;
    case OutputFormat::kJson: {
      out << "{\"file\":" << json_string(args.out) << ",\"rows\":[";
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        out << (k ? "," : "") << "{\"n\":" << r.n << ",\"trials\":" << r.trials << ",\"mean\":" << sig(r.mean_lambda, 17)
            << ",\"std\":" << sig(r.std_lambda, 17) << ",\"p_below\":" << sig(r.p_below_threshold, 17)
            << ",\"quantiles\":[";
        for (std::size_t i = 0; i < r.quantiles.size(); ++i) out << (i ? "," : "") << sig(r.quantiles[i], 17);
        out << "]}";
      }
      out << "]}\n";
      break;
    }
    case OutputFormat::kCsv:
      out << header << "\n";
      for (const auto& r : rows) {
        out << r.n << ',' << r.trials << ',' << sig(r.mean_lambda, 17) << ',' << sig(r.std_lambda, 17) << ','
            << sig(r.p_below_threshold, 17);
        for (double q : r.quantiles) out << ',' << sig(q, 17);
        out << '\n';
      }
      break;
  }
  return 0;
}

// ---- generate / export-graph ----------------------------------------------

struct GenerateArgs {
  InputOptions in;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool list = false;
};

int run_generate(GenerateArgs args) {
  if (args.list) {
    for (const auto& s : kNamedSources) std::cout << s.name << "\t" << s.description << "\n";
    return 0;
  }
  if (args.in.source.empty()) throw UsageError("--source is required");
  if (args.in.n == 0) throw UsageError("--count is required");
  if (args.seed) args.in.source_seed = args.seed;
  const auto seq = named_source(args.in.source, source_params(args.in), args.in.n);
  OutputFile file(args.out);
  auto& out = file.stream();
  for (double v : seq.values()) out << format_value(v) << '\n';
  return 0;
}

struct ExportArgs {
  InputOptions in;
  std::string graph_format = "edge-list";
  std::string ties = "jitter";
  std::uint64_t seed = 0;
  std::string out;
};

int run_export(const ExportArgs& args) {
  GraphFormat format;
  try {
    format = parse_graph_format(args.graph_format);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto seq = load_input(args.in);
  const auto g = build_graph(seq, parse_tie_policy(args.ties, args.seed));
  OutputFile file(args.out);
  file.stream() << export_graph(g, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expander test: spectral randomness check for real-valued sequences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "expander 1.0.0");

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Compute lambda for a sequence and classify it against the null");
  add_input_options(test_cmd, test.in, false);
  add_analysis_options(test_cmd, test.analysis);
  test_cmd->add_option("--calibration", test.calibration, "Calibration file (EXPCAL v1)");
  test_cmd->add_flag("--auto-calibrate", test.auto_calibrate, "Calibrate at the observed n when no row matches");
  test_cmd->add_option("--calibration-trials", test.calibration_trials, "Trials for --auto-calibrate")
      ->capture_default_str();
  test_cmd->add_option("--alpha-fail", test.alpha_fail, "p-value below which the verdict is fail")
      ->capture_default_str();
  test_cmd->add_option("--alpha-suspicious", test.alpha_suspicious, "p-value below which the verdict is suspicious")
      ->capture_default_str();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Monte Carlo null distribution of lambda");
  cal_cmd->add_option("--n", cal.ns, "Sequence lengths to calibrate")->required()->expected(1, -1);
  cal_cmd->add_option("--trials", cal.trials, "Trials per length (>= 100)")->capture_default_str();
  add_analysis_options(cal_cmd, cal.analysis);
  cal_cmd->add_option("--out", cal.out, "Calibration file to write")->capture_default_str();
  cal_cmd->add_option("--emit-samples", cal.emit_samples, "Also write per-trial lambda as CSV");
  cal_cmd->add_flag("--summary-only", cal.summary_only, "Do not store raw samples in the calibration file");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Print values of a named generator, one per line");
  gen_cmd->add_option("--source", gen.in.source, "Named generator");
  gen_cmd->add_option("--count,--n", gen.in.n, "Number of values");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed (defaults per source)");
  gen_cmd->add_option("--base", gen.in.base, "van der Corput base")->capture_default_str();
  gen_cmd->add_option("--modulus", gen.in.modulus, "fib-mod modulus")->capture_default_str();
  gen_cmd->add_option("--alpha", gen.in.alpha, "kronecker multiplier")->capture_default_str();
  gen_cmd->add_option("--bits", gen.in.bits, "coveyou e / lagged-fib k exponent");
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");
  gen_cmd->add_flag("--list", gen.list, "List the available sources");

  ExportArgs exp;
  auto* exp_cmd = app.add_subcommand("export-graph", "Write the order/index multigraph of a sequence");
  add_input_options(exp_cmd, exp.in, false);
  exp_cmd->add_option("--format", exp.graph_format, "edge-list | dot")->capture_default_str();
  exp_cmd->add_option("--ties", exp.ties, "Tie policy: jitter | stable")->capture_default_str();
  exp_cmd->add_option("--seed", exp.seed, "Tie jitter seed")->capture_default_str();
  exp_cmd->add_option("--out", exp.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*test_cmd) return run_test(test);
    if (*cal_cmd) return run_calibrate(cal);
    if (*gen_cmd) return run_generate(gen);
    if (*exp_cmd) return run_export(exp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

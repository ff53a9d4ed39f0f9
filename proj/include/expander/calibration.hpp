#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "expander/error.hpp"
#include "expander/graph.hpp"
#include "expander/rng.hpp"
#include "expander/sequence.hpp"
#include "expander/spectral.hpp"

namespace expander {

inline constexpr std::array<double, 7> kQuantileLevels{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};
inline constexpr std::size_t kMinCalibrationN = 10;
inline constexpr std::size_t kMinCalibrationTrials = 100;

/// Null-distribution summary of lambda for i.i.d. inputs of length n.
struct CalibrationRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean_lambda = 0.0;
  double std_lambda = 0.0;
  /// Fraction of trials with lambda < 2 sqrt 3.
  double p_below_threshold = 0.0;
  /// Values at kQuantileLevels.
  std::array<double, 7> quantiles{};
  /// Per-trial lambda in trial order, when retained.
  std::optional<std::vector<double>> raw_samples;
  /// Tie policy kind; per-trial jitter seeds derive from `seed`.
  TiePolicy policy = TiePolicy::jitter();
  std::uint64_t seed = 0;

  friend bool operator==(const CalibrationRow&, const CalibrationRow&) = default;
};

/// Linear interpolation between order statistics (the "type 7" rule).
inline double quantile_sorted(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Builds a row from per-trial lambda values.
inline CalibrationRow summarize(std::size_t n, std::vector<double> samples, TiePolicy policy, std::uint64_t seed,
                                bool keep_samples = true) {
  if (samples.size() < 2) throw Error("need at least two samples to summarize");
  CalibrationRow row;
  row.n = n;
  row.trials = samples.size();
  row.policy = policy.kind == TiePolicy::Kind::kJitter ? TiePolicy::jitter() : TiePolicy::stable();
  row.seed = seed;

  const double m = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  row.mean_lambda = sum / m;
  double ss = 0.0;
  std::size_t below = 0;
  for (double v : samples) {
    ss += (v - row.mean_lambda) * (v - row.mean_lambda);
    if (v < kRamanujanBound) ++below;
  }
  row.std_lambda = std::sqrt(ss / (m - 1.0));
  row.p_below_threshold = static_cast<double>(below) / m;

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) row.quantiles[i] = quantile_sorted(sorted, kQuantileLevels[i]);
  if (keep_samples) row.raw_samples = std::move(samples);
  return row;
}

struct CalibrationOptions {
  std::size_t workers = 1;
  TiePolicy policy = TiePolicy::jitter();
  SpectralOptions solver{};
  bool keep_samples = true;
  /// Draw from the platform random device instead of the seeded stream.
  /// Results are then not reproducible.
  bool use_system_rng = false;
};

/// lambda for one null trial. The sample values come from a counter-based
/// stream keyed by (seed, trial), so every trial is reproducible on its own.
inline double null_trial_lambda(std::size_t n, std::uint64_t seed, std::uint64_t trial, const CalibrationOptions& opts) {
  std::vector<double> values(n);
  if (opts.use_system_rng) {
    std::random_device rd;
    for (auto& v : values) {
      const std::uint64_t bits = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      v = static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
  } else {
    CounterRng rng(seed, trial);
    for (auto& v : values) v = rng.uniform();
  }
  TiePolicy policy = opts.policy;
  if (policy.kind == TiePolicy::Kind::kJitter) policy.seed = mix64(seed ^ mix64(trial + 1));
  SpectralOptions solver = opts.solver;
  solver.rng_seed = mix64(seed ^ (trial * CounterRng::kGolden) ^ 0x5eedULL);
  const auto g = build_graph(Sequence(std::move(values), "null"), policy);
  return compute_lambda(g, solver).lambda;
}

/// Per-trial lambda values in trial order. Trials are distributed over
/// `workers` threads; the result does not depend on scheduling.
inline std::vector<double> null_samples(std::size_t n, std::size_t trials, std::uint64_t seed,
                                        const CalibrationOptions& opts = {}) {
  std::vector<double> out(trials);
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto work = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < trials;) out[i] = null_trial_lambda(n, seed, i, opts);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = trials;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline CalibrationRow calibrate_null(std::size_t n, std::size_t trials, std::uint64_t seed,
                                     const CalibrationOptions& opts = {}) {
  if (n < kMinCalibrationN) throw Error("calibration requires n >= 10");
  if (trials < kMinCalibrationTrials) throw Error("calibration requires at least 100 trials");
  opts.solver.validate();
  return summarize(n, null_samples(n, trials, seed, opts), opts.policy, seed, opts.keep_samples);
}

/// Add-one upper-tail p-value: (1 + #{samples >= observed}) / (trials + 1).
inline double empirical_p(double observed, const CalibrationRow& row) {
  if (!row.raw_samples) throw Error("empirical p-value needs raw calibration samples");
  const auto& s = *row.raw_samples;
  const auto at_least = std::count_if(s.begin(), s.end(), [&](double v) { return v >= observed; });
  return (1.0 + static_cast<double>(at_least)) / (static_cast<double>(s.size()) + 1.0);
}

enum class Verdict { kPass, kSuspicious, kFail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kSuspicious: return "suspicious";
    case Verdict::kFail: return "fail";
  }
  return "?";
}

struct Alphas {
  double fail = 0.001;
  double suspicious = 0.01;
};

struct TestReport {
  std::size_t n = 0;
  double observed_lambda = 0.0;
  /// observed_lambda - 2 sqrt 3
  double excess = 0.0;
  double z_score = 0.0;
  double empirical_p = 1.0;
  /// p came from a normal approximation (no raw samples available).
  bool approximate = false;
  Verdict verdict = Verdict::kPass;
  std::string calibration_provenance;
};

inline std::string provenance(const CalibrationRow& row) {
  std::ostringstream out;
  out << "n=" << row.n << " trials=" << row.trials << " policy=" << row.policy.name() << " seed=" << row.seed
      << (row.raw_samples ? " samples" : " summary-only");
  return out.str();
}

/// Classifies an observed lambda against a calibration row for the same n.
inline TestReport verdict(double observed, const CalibrationRow& row, Alphas alphas = {}) {
  if (!(alphas.fail > 0.0 && alphas.fail < alphas.suspicious && alphas.suspicious < 1.0)) {
    throw Error("alphas must satisfy 0 < alpha_fail < alpha_suspicious < 1");
  }
  TestReport r;
  r.n = row.n;
  r.observed_lambda = observed;
  r.excess = observed - kRamanujanBound;
  r.z_score = row.std_lambda > 0.0 ? (observed - row.mean_lambda) / row.std_lambda
              : observed > row.mean_lambda ? std::numeric_limits<double>::infinity()
                                           : 0.0;
  if (row.raw_samples) {
    r.empirical_p = empirical_p(observed, row);
  } else {
    r.empirical_p = 0.5 * std::erfc(r.z_score / std::sqrt(2.0));
    r.approximate = true;
  }
  r.verdict = r.empirical_p < alphas.fail         ? Verdict::kFail
              : r.empirical_p < alphas.suspicious ? Verdict::kSuspicious
                                                  : Verdict::kPass;
  r.calibration_provenance = provenance(row);
  return r;
}

inline const CalibrationRow* find_row(const std::vector<CalibrationRow>& rows, std::size_t n) {
  for (const auto& r : rows) {
    if (r.n == n) return &r;
  }
  return nullptr;
}

// On-disk format: a header "EXPCAL v1 <fnv1a-64 of body, hex>", then per
// row one record line and optionally a "SAMPLES n count" line followed by
// one line of whitespace-separated values. Reals use 17 significant digits.

inline constexpr const char* kCalibrationMagic = "EXPCAL";
inline constexpr const char* kCalibrationVersion = "v1";

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string format_real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string serialize_calibration(const std::vector<CalibrationRow>& rows) {
  std::string body;
  for (const auto& r : rows) {
    body += std::to_string(r.n) + ' ' + std::to_string(r.trials) + ' ' + format_real17(r.mean_lambda) + ' ' +
            format_real17(r.std_lambda) + ' ' + format_real17(r.p_below_threshold);
    for (double q : r.quantiles) body += ' ' + format_real17(q);
    body += ' ' + std::string(r.policy.name()) + ' ' + std::to_string(r.seed);
    body += '\n';
    if (r.raw_samples) {
      body += "SAMPLES " + std::to_string(r.n) + ' ' + std::to_string(r.raw_samples->size()) + '\n';
      for (std::size_t i = 0; i < r.raw_samples->size(); ++i) {
        if (i) body += ' ';
        body += format_real17((*r.raw_samples)[i]);
      }
      body += '\n';
    }
  }
  char header[64];
  std::snprintf(header, sizeof header, "%s %s %016" PRIx64 "\n", kCalibrationMagic, kCalibrationVersion,
                fnv1a64(body));
  return header + body;
}

namespace detail {

template <typename T>
T read_field(std::istringstream& in, std::size_t line, const char* what) {
  T v{};
  if (!(in >> v)) throw Error("calibration line " + std::to_string(line) + ": bad " + what);
  return v;
}

inline double read_real(std::istringstream& in, std::size_t line, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw Error("calibration line " + std::to_string(line) + ": missing " + what);
  return parse_real(tok, line);
}

}  // namespace detail

inline std::vector<CalibrationRow> parse_calibration(std::string_view text) {
  const auto eol = text.find('\n');
  if (eol == std::string_view::npos) throw Error("calibration file: missing header");
  std::istringstream header{std::string(text.substr(0, eol))};
  std::string magic, version, digest;
  header >> magic >> version >> digest;
  if (magic != kCalibrationMagic || version != kCalibrationVersion) {
    throw Error("calibration file: expected header 'EXPCAL v1'");
  }
  const std::string_view body = text.substr(eol + 1);
  char expect[20];
  std::snprintf(expect, sizeof expect, "%016" PRIx64, fnv1a64(body));
  if (digest != expect) throw Error("calibration file: checksum mismatch");

  std::vector<CalibrationRow> rows;
  std::istringstream in{std::string(body)};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line.rfind("SAMPLES", 0) == 0) {
      std::string tag;
      fields >> tag;
      const auto n = detail::read_field<std::size_t>(fields, line_no, "sample n");
      const auto count = detail::read_field<std::size_t>(fields, line_no, "sample count");
      if (rows.empty() || rows.back().n != n || rows.back().raw_samples) {
        throw Error("calibration line " + std::to_string(line_no) + ": SAMPLES without matching row");
      }
      std::string values_line;
      if (!std::getline(in, values_line)) throw Error("calibration file: truncated sample block");
      ++line_no;
      std::istringstream vals(values_line);
      std::vector<double> samples;
      samples.reserve(count);
      for (std::size_t i = 0; i < count; ++i) samples.push_back(detail::read_real(vals, line_no, "sample"));
      std::string extra;
      if (vals >> extra) throw Error("calibration line " + std::to_string(line_no) + ": too many samples");
      rows.back().raw_samples = std::move(samples);
      continue;
    }
    CalibrationRow r;
    r.n = detail::read_field<std::size_t>(fields, line_no, "n");
    r.trials = detail::read_field<std::size_t>(fields, line_no, "trials");
    r.mean_lambda = detail::read_real(fields, line_no, "mean");
    r.std_lambda = detail::read_real(fields, line_no, "std");
    r.p_below_threshold = detail::read_real(fields, line_no, "p_below");
    for (auto& q : r.quantiles) q = detail::read_real(fields, line_no, "quantile");
    const auto policy = detail::read_field<std::string>(fields, line_no, "policy");
    r.seed = detail::read_field<std::uint64_t>(fields, line_no, "seed");
    r.policy = parse_tie_policy(policy);
    std::string extra;
    if (fields >> extra) throw Error("calibration line " + std::to_string(line_no) + ": trailing fields");
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Writes to a temporary sibling and renames, so an interrupted run never
/// leaves a truncated file behind.
inline void save_calibration(const std::vector<CalibrationRow>& rows, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << serialize_calibration(rows);
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<CalibrationRow> load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open calibration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_calibration(buf.str());
}

}  // namespace expander

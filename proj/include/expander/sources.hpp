#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "expander/error.hpp"
#include "expander/sequence.hpp"

// Generators for the classical pseudorandom recurrences and low-discrepancy
// sequences used as test subjects. All modular arithmetic is exact.

namespace expander {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Largest modulus accepted by the modular generators. With both operands
/// reduced below m, a*x + c stays below 2^128.
inline constexpr u64 kMaxModulus = u64{1} << 63;

inline u64 mul_add_mod(u64 a, u64 x, u64 c, u64 m) noexcept {
  return static_cast<u64>((static_cast<u128>(a) * x + c) % m);
}

/// One step of x -> a*x + c (mod m), carried as a value type.
class Lcg {
 public:
  Lcg(u64 a, u64 c, u64 m, u64 seed) : a_(a), c_(c), m_(m), state_(seed) {
    if (m < 2) throw Error("LCG modulus must be at least 2");
    if (m > kMaxModulus) throw Error("LCG modulus exceeds 2^63; exact arithmetic not guaranteed");
    if (seed >= m) throw Error("LCG seed must satisfy 0 <= seed < m");
    a_ %= m;
    c_ %= m;
  }

  u64 next() noexcept {
    state_ = mul_add_mod(a_, state_, c_, m_);
    return state_;
  }
  u64 state() const noexcept { return state_; }
  u64 modulus() const noexcept { return m_; }

 private:
  u64 a_, c_, m_, state_;
};

/// Orbit of a linear congruential generator. The seed is x1 and is not
/// emitted; the first value is x2 = (a*seed + c) mod m.
inline Sequence lcg_stream(u64 a, u64 c, u64 m, u64 seed, std::size_t count,
                           std::string label = "lcg") {
  if (count < 1) throw Error("count must be at least 1");
  Lcg gen(a, c, m, seed);
  std::vector<double> out(count);
  for (auto& v : out) v = static_cast<double>(gen.next());
  return Sequence(std::move(out), std::move(label));
}

/// Coveyou's quadratic generator x -> x(x+1) mod 2^e, seed = 2 (mod 4).
class Coveyou {
 public:
  Coveyou(u64 seed, unsigned bits) : bits_(bits), state_(seed) {
    if (bits < 2 || bits > 63) throw Error("coveyou exponent must lie in [2, 63]");
    if (seed % 4 != 2) throw Error("coveyou seed must be congruent to 2 mod 4");
    if (seed >> bits) throw Error("coveyou seed must be below 2^e");
  }
  u64 next() noexcept {
    const u64 mask = (u64{1} << bits_) - 1;
    state_ = static_cast<u64>(static_cast<u128>(state_) * (state_ + 1)) & mask;
    return state_;
  }

 private:
  unsigned bits_;
  u64 state_;
};

/// Additive lagged Fibonacci generator x_n = x_{n-24} + x_{n-55} mod 2^k,
/// with a 56-slot ring of history.
class LaggedFibonacci {
 public:
  static constexpr std::size_t kStateSize = 56;
  static constexpr std::size_t kShortLag = 24;
  static constexpr std::size_t kLongLag = 55;

  LaggedFibonacci(const std::array<u64, kStateSize>& initial, unsigned bits) : bits_(bits), ring_(initial) {
    if (bits < 1 || bits > 63) throw Error("lagged-fib exponent must lie in [1, 63]");
    bool odd = false;
    for (auto& v : ring_) {
      v &= mask();
      odd = odd || (v & 1);
    }
    if (!odd) throw Error("lagged-fib state needs at least one odd entry");
  }

  /// History filled from a Lewis-Goodman-Miller stream seeded by `seed`;
  /// the first entry is forced odd.
  static LaggedFibonacci seeded(u64 seed, unsigned bits) {
    if (seed == 0 || seed >= 2147483647ULL) {
      throw Error("lagged-fib seed must lie in [1, 2^31 - 2]");
    }
    Lcg lgm(16807, 0, 2147483647ULL, seed);
    std::array<u64, kStateSize> init{};
    for (auto& v : init) {
      // Two 31-bit draws so that wide moduli get entropy in the high bits.
      v = (lgm.next() << 31) ^ lgm.next();
    }
    init[0] |= 1;
    return LaggedFibonacci(init, bits);
  }

  u64 next() noexcept {
    // ring_[head_] holds x_{n-56}; the newest value is at head_ - 1.
    const u64 a = ring_[(head_ + kStateSize - kShortLag) % kStateSize];
    const u64 b = ring_[(head_ + kStateSize - kLongLag) % kStateSize];
    const u64 v = (a + b) & mask();
    ring_[head_] = v;
    head_ = (head_ + 1) % kStateSize;
    return v;
  }

  const std::array<u64, kStateSize>& state() const noexcept { return ring_; }

 private:
  u64 mask() const noexcept { return (u64{1} << bits_) - 1; }

  unsigned bits_;
  std::array<u64, kStateSize> ring_;
  std::size_t head_ = 0;
};

/// Radical inverse of `index` in the given base (van der Corput).
inline double radical_inverse(u64 index, unsigned base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= base;
  }
  return result;
}

enum class SourceKind {
  kLcg,
  kCoveyou,
  kLaggedFibonacci,
  kLogistic,
  kVanDerCorput,
  kFibonacciMod,
  kKronecker,
  kSystemRandom,
};

/// Knobs for the named sources. Unset fields fall back to the defaults of
/// the chosen source.
struct SourceParams {
  std::optional<u64> seed;
  unsigned base = 2;             // van der Corput
  u64 modulus = 10001;           // Fibonacci residues
  double alpha = std::sqrt(2.0); // Kronecker n*alpha mod 1
  std::optional<unsigned> bits;  // coveyou e, lagged-fib k
};

struct NamedSource {
  std::string_view name;
  SourceKind kind;
  std::string_view description;
};

inline constexpr std::array<NamedSource, 15> kNamedSources{{
    {"lehmer", SourceKind::kLcg, "23 x mod 10^8+1, x1 = 47594118"},
    {"pm-20403", SourceKind::kLcg, "20403 x mod 2^15"},
    {"textbook-25173", SourceKind::kLcg, "25173 x + 13840 mod 2^16"},
    {"turbo-pascal", SourceKind::kLcg, "129 x + 907633385 mod 2^32"},
    {"rotenberg", SourceKind::kLcg, "(2^7+1) x + 1 mod 2^35 (default x1 = 0)"},
    {"knuth-good", SourceKind::kLcg, "3141592653 x + 2718281829 mod 2^35, x1 = 0"},
    {"lgm-16807", SourceKind::kLcg, "16807 x mod 2^31-1"},
    {"lecuyer-40692", SourceKind::kLcg, "40692 x mod 2^31-249"},
    {"coveyou", SourceKind::kCoveyou, "x(x+1) mod 2^e, x1 = 2 mod 4 (default 1234, e = 32)"},
    {"lagged-fib", SourceKind::kLaggedFibonacci, "x_{n-24} + x_{n-55} mod 2^k (default k = 32)"},
    {"logistic", SourceKind::kLogistic, "3.98 x (1 - x), x1 = 0.3"},
    {"vdc", SourceKind::kVanDerCorput, "van der Corput radical inverse in base b"},
    {"fib-mod", SourceKind::kFibonacciMod, "F_n mod m for n >= 2 (default m = 10001)"},
    {"kronecker", SourceKind::kKronecker, "n alpha mod 1 (default alpha = sqrt 2)"},
    {"system", SourceKind::kSystemRandom, "platform random device, uniform [0,1)"},
}};

namespace detail {

struct LcgPreset {
  std::string_view name;
  u64 a, c, m;
  /// Seed used whatever the caller asks for.
  std::optional<u64> fixed_seed;
  u64 default_seed = 1;
};

inline constexpr std::array<LcgPreset, 8> kLcgPresets{{
    {"lehmer", 23, 0, 100000001ULL, 47594118ULL},
    {"pm-20403", 20403, 0, u64{1} << 15, std::nullopt},
    {"textbook-25173", 25173, 13840, u64{1} << 16, std::nullopt},
    {"turbo-pascal", 129, 907633385ULL, u64{1} << 32, std::nullopt},
    {"rotenberg", (1 << 7) + 1, 1, u64{1} << 35, std::nullopt, 0},
    {"knuth-good", 3141592653ULL, 2718281829ULL, u64{1} << 35, 0},
    {"lgm-16807", 16807, 0, 2147483647ULL, std::nullopt},
    {"lecuyer-40692", 40692, 0, (u64{1} << 31) - 249, std::nullopt},
}};

inline constexpr u64 kDefaultSeed = 1;
inline constexpr u64 kCoveyouSeed = 1234;
inline constexpr unsigned kCoveyouBits = 32;
inline constexpr unsigned kLaggedFibBits = 32;
inline constexpr double kLogisticRate = 3.98;
inline constexpr double kLogisticStart = 0.3;

}  // namespace detail

inline const NamedSource& find_source(std::string_view name) {
  for (const auto& s : kNamedSources) {
    if (s.name == name) return s;
  }
  throw Error("unknown source '" + std::string(name) + "'");
}

inline bool is_integer_source(std::string_view name) {
  switch (find_source(name).kind) {
    case SourceKind::kLcg:
    case SourceKind::kCoveyou:
    case SourceKind::kLaggedFibonacci:
    case SourceKind::kFibonacciMod:
      return true;
    default:
      return false;
  }
}

/// `count` values of a named generator with its published parameters.
/// Deterministic in (name, params, count) for every source except "system".
inline Sequence named_source(std::string_view name, const SourceParams& params, std::size_t count) {
  const NamedSource& src = find_source(name);
  if (count < 1) throw Error("count must be at least 1");
  std::string label(name);
  std::vector<double> out;
  out.reserve(count);

  switch (src.kind) {
    case SourceKind::kLcg: {
      for (const auto& p : detail::kLcgPresets) {
        if (p.name != name) continue;
        const u64 seed = p.fixed_seed.value_or(params.seed.value_or(p.default_seed));
        return lcg_stream(p.a, p.c, p.m, seed, count, std::move(label));
      }
      throw Error("missing preset for '" + label + "'");
    }
    case SourceKind::kCoveyou: {
      Coveyou gen(params.seed.value_or(detail::kCoveyouSeed), params.bits.value_or(detail::kCoveyouBits));
      for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<double>(gen.next()));
      break;
    }
    case SourceKind::kLaggedFibonacci: {
      const unsigned bits = params.bits.value_or(detail::kLaggedFibBits);
      if (bits > 53) throw Error("lagged-fib exponent above 53 cannot be emitted exactly as reals");
      auto gen = LaggedFibonacci::seeded(params.seed.value_or(detail::kDefaultSeed), bits);
      for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<double>(gen.next()));
      break;
    }
    case SourceKind::kLogistic: {
      double x = detail::kLogisticStart;
      for (std::size_t i = 0; i < count; ++i) {
        out.push_back(x);
        // Grouped as r * (x (1 - x)); the map is chaotic, so the grouping
        // selects which rounded trajectory is produced.
        x = detail::kLogisticRate * (x * (1.0 - x));
      }
      break;
    }
    case SourceKind::kVanDerCorput: {
      if (params.base < 2) throw Error("van der Corput base must be at least 2");
      for (std::size_t i = 1; i <= count; ++i) out.push_back(radical_inverse(i, params.base));
      break;
    }
    case SourceKind::kFibonacciMod: {
      const u64 m = params.modulus;
      if (m < 2 || m > kMaxModulus) throw Error("fib-mod modulus must lie in [2, 2^63]");
      // F_1 = F_2 = 1; emission starts at F_2.
      u64 prev = 1 % m, cur = 1 % m;
      for (std::size_t i = 0; i < count; ++i) {
        out.push_back(static_cast<double>(cur));
        const u64 next = static_cast<u64>((static_cast<u128>(prev) + cur) % m);
        prev = cur;
        cur = next;
      }
      break;
    }
    case SourceKind::kKronecker: {
      if (!std::isfinite(params.alpha)) throw Error("kronecker alpha must be finite");
      for (std::size_t i = 1; i <= count; ++i) {
        const double t = static_cast<double>(i) * params.alpha;
        out.push_back(t - std::floor(t));
      }
      break;
    }
    case SourceKind::kSystemRandom: {
      std::random_device rd;
      for (std::size_t i = 0; i < count; ++i) {
        const u64 bits = (static_cast<u64>(rd()) << 32) ^ static_cast<u64>(rd());
        out.push_back(static_cast<double>(bits >> 11) * 0x1.0p-53);
      }
      break;
    }
  }
  return Sequence(std::move(out), std::move(label));
}

inline Sequence named_source(std::string_view name, std::optional<u64> seed, std::size_t count) {
  SourceParams params;
  params.seed = seed;
  return named_source(name, params, count);
}

}  // namespace expander

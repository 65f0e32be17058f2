#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace eigencollide {

// splitmix64 finaliser; the basis of all seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream-id tags. Every derived stream absorbs (tag, indices...) so that
// distinct lineages (entries, replicates, scan cells, ...) never share a
// word sequence.
inline constexpr std::uint64_t kSeedTagEntry = 0x656e747279ULL;      // "entry"
inline constexpr std::uint64_t kSeedTagReplicate = 0x7265706cULL;    // "repl"
inline constexpr std::uint64_t kSeedTagCell = 0x63656c6cULL;         // "cell"
inline constexpr std::uint64_t kSeedTagStiefel = 0x7374696566ULL;    // "stief"
inline constexpr std::uint64_t kSeedTagStratum = 0x7374726174ULL;    // "strat"
inline constexpr std::uint64_t kSeedTagField = 0x6669656c64ULL;      // "field"

// Splittable derivation: absorb each path word into the splitmix64 state.
// The encoding (fixed word count and order per call site) is injective, so
// results are independent of evaluation or scheduling order by construction.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t w : path) s = mix64(s ^ w);
  return s;
}

// Deterministic scalar stream on top of std::mt19937_64. The engine is
// bit-exact per the standard; normal variates use Box-Muller because
// std::normal_distribution is implementation-defined and would break the
// byte-identical replay contract.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    // Rejection-free modulo bias is irrelevant at n << 2^64 for our uses,
    // but keep it exact anyway.
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Map to (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace eigencollide

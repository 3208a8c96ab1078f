#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hiermc::sampler {

// splitmix64 output function; a well-mixed bijection on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based stream: the n-th output is splitmix64 applied to key + n*phi,
// i.e. a plain splitmix64 sequence seeded at `key`. Streams with distinct keys
// are independent for sampling purposes, and a stream's outputs depend only on
// (key, counter) — never on call order elsewhere.
struct KeyedStream {
  std::uint64_t key = 0;
  std::uint64_t ctr = 0;

  std::uint64_t next_u64() { return splitmix64(key + 0x9E3779B97F4A7C15ULL * ctr++); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // (0, 1)
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
  }
  // Inclusive range; modulo bias is ~2^-57 for the small ranges used here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }
};

// Randomness for one chain. Every per-coordinate draw is keyed on the coordinate's
// *label* (parameter name), not its position, so relabeling-invariant models give
// relabeling-invariant chains. Scalar decisions use a zero label.
struct ChainRandom {
  std::uint64_t chain_key = 0;
  std::vector<std::uint64_t> labels;

  static constexpr std::uint64_t kInit = 1, kMomentum = 2, kAccept = 3, kLength = 4,
                                 kJitter = 5, kEpsSearch = 6, kProposal = 7;

  ChainRandom() = default;
  ChainRandom(std::uint64_t seed, int chain_index,
              std::span<const std::string> coordinate_labels) {
    chain_key = hash_combine(splitmix64(seed),
                             static_cast<std::uint64_t>(chain_index) + 1);
    labels.reserve(coordinate_labels.size());
    for (const auto& l : coordinate_labels) labels.push_back(fnv1a(l));
  }

  KeyedStream at(std::uint64_t tag, std::uint64_t step, std::uint64_t label = 0) const {
    return KeyedStream{hash_combine(hash_combine(hash_combine(chain_key, tag), step),
                                    label)};
  }

  // p_d ~ N(0, mass_d)
  void fill_momentum(std::uint64_t step, std::span<const double> mass,
                     std::span<double> p) const {
    for (std::size_t d = 0; d < p.size(); ++d)
      p[d] = at(kMomentum, step, labels[d]).normal() * std::sqrt(mass[d]);
  }

  // q_d ~ U[-2, 2]
  void fill_initial_position(std::uint64_t attempt, std::span<double> q) const {
    for (std::size_t d = 0; d < q.size(); ++d)
      q[d] = -2.0 + 4.0 * at(kInit, attempt, labels[d]).uniform();
  }

  void fill_proposal_normals(std::uint64_t step, std::span<double> out) const {
    for (std::size_t d = 0; d < out.size(); ++d)
      out[d] = at(kProposal, step, labels[d]).normal();
  }
};

}  // namespace hiermc::sampler

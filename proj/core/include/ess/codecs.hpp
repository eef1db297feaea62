#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ess/alphabet.hpp"
#include "ess/bigint.hpp"
#include "ess/trellis.hpp"

namespace ess {

// Input block length of a shaping codebook: floor(log2(size)).
int input_length(const BigInt& codebook_size);

// Index <-> sequence mapping over the bounded-energy set in
// lexicographic order. Indices run over [0, sequence_count()).
std::vector<int> ess_encode(const EnergyTrellis& trellis, BigInt index);
BigInt ess_decode(const EnergyTrellis& trellis, std::span<const int> sequence);

// Energy-first ordering (ascending sequence energy, lexicographic within
// a shell) over the same bounded-energy set.
std::vector<int> laroia_encode(const ForwardTrellis& trellis, BigInt index);
BigInt laroia_decode(const ForwardTrellis& trellis, std::span<const int> sequence);

// Occurrence counts per amplitude of a constant-composition codebook.
class Composition {
 public:
  Composition(const AmplitudeAlphabet& alphabet, std::vector<int> counts);

  const AmplitudeAlphabet& alphabet() const { return alphabet_; }
  const std::vector<int>& counts() const { return counts_; }
  int count(int amp_index) const { return counts_[amp_index]; }
  int block_length() const { return n_; }

  // Total sequence energy (equal for every codeword).
  long long sequence_energy() const;

 private:
  AmplitudeAlphabet alphabet_;
  std::vector<int> counts_;
  int n_;
};

// Exact codebook size N! / prod(#(a)!).
BigInt multinomial(const Composition& composition);

// Shaping rate log2(multinomial)/N in bit/amp.
double cc_rate(const Composition& composition);

// Lexicographic rank <-> sequence over all permutations of the
// composition; mutual inverses.
std::vector<int> cc_encode(const Composition& composition, BigInt index);
BigInt cc_decode(const Composition& composition, std::span<const int> sequence);

// Integer composition closest to n * pmf by largest-remainder rounding;
// ties go to the smaller amplitude.
Composition mb_composition(const AmplitudeAlphabet& alphabet, int n,
                           std::span<const double> pmf);

// Most energy-efficient composition whose codebook holds at least
// 2^input_bits sequences. Exhaustive for small alphabets; descends from
// an energy-matched start with local exchanges otherwise (heuristic).
Composition find_cc_composition(const AmplitudeAlphabet& alphabet, int n,
                                int input_bits);
// Same search against a fractional rate threshold of 2^(n * rate).
Composition find_cc_composition_rate(const AmplitudeAlphabet& alphabet, int n,
                                     double rate);

// Mean sequence energy over the 2^input_bits indices a shaper actually
// uses. Exact enumeration up to 2^20 indices, Monte Carlo beyond that.
struct OperationalEnergy {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% confidence, zero when exact
  std::uint64_t samples = 0;
  bool exact = false;
};
using EncodeFn = std::function<std::vector<int>(const BigInt&)>;
OperationalEnergy operational_energy(const EncodeFn& encode, int input_bits,
                                     std::uint64_t seed = 1,
                                     std::uint64_t mc_samples = 10000);

// Headline numbers of a shaped code.
struct ShapedCodeSummary {
  int input_bits = 0;         // k
  double operational_rate = 0.0;  // k / N
  double shaping_rate = 0.0;      // log2(codebook) / N
  double average_energy = 0.0;
  double shaping_gain_db = 0.0;
};
ShapedCodeSummary summarize(const EnergyTrellis& trellis);

}  // namespace ess

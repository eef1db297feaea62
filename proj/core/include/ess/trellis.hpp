#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ess/alphabet.hpp"
#include "ess/bigint.hpp"

namespace ess {

// Count representation inside a trellis. Full precision keeps exact
// integers; bounded precision rounds every count down to a
// mantissa-of-nm-bits times power-of-two form.
struct Precision {
  enum class Mode { full, bounded };
  Mode mode = Mode::full;
  int mantissa_bits = 0;
  int exponent_bits = 0;

  static Precision full() { return {}; }
  static Precision bounded(int mantissa_bits, int exponent_bits) {
    return {Mode::bounded, mantissa_bits, exponent_bits};
  }
  bool is_bounded() const { return mode == Mode::bounded; }
};

// (mantissa, exponent) view of a bounded-precision count. The stored
// value is mantissa * 2^exponent; whenever exponent > 0 the mantissa
// occupies exactly mantissa_bits bits.
struct BPCount {
  BigInt mantissa;
  unsigned exponent = 0;

  BigInt value() const { return mantissa << exponent; }
  static BPCount decompose(const BigInt& value, int mantissa_bits);
};

// Round a non-negative integer down to a nm-bit mantissa.
BigInt round_down_mantissa(const BigInt& value, int mantissa_bits);

// Number of energy levels in the final trellis column.
// Throws ParameterError when max_energy < block_length.
int num_levels(int block_length, long long max_energy);

// Bounded-energy amplitude-count trellis. Node (n, l) stands for
// accumulated energy e = n + 8l after n amplitudes; its count is the
// number of ways to finish the sequence without exceeding the energy
// bound. Built once, then immutable; safe to share across threads.
class EnergyTrellis {
 public:
  static EnergyTrellis build(const AmplitudeAlphabet& alphabet, int block_length,
                             long long max_energy,
                             const Precision& precision = Precision::full());

  const AmplitudeAlphabet& alphabet() const { return alphabet_; }
  int block_length() const { return n_; }
  long long max_energy() const { return emax_; }
  int levels() const { return levels_; }
  const Precision& precision() const { return precision_; }

  // Count at (column, level); zero when the node has been trimmed away.
  const BigInt& count(int column, int level) const {
    return counts_[static_cast<std::size_t>(column) * levels_ + level];
  }
  bool removed(int column, int level) const {
    return removed_[static_cast<std::size_t>(column) * levels_ + level] != 0;
  }

  // Count for the child reached from (column-1, level) via the given
  // amplitude index; zero when out of range or trimmed.
  const BigInt& child_count(int column, int level, int amp_index) const;

  // Total number of sequences represented by the trellis.
  const BigInt& sequence_count() const { return count(0, 0); }

  // First-column counts per amplitude; their ratios give the amplitude
  // distribution of the codebook.
  std::vector<BigInt> amplitude_counts() const;
  std::vector<double> amplitude_distribution() const;

  // Mean energy of the represented sequences. Exact for full precision
  // (trimmed or not); for bounded precision this is the first-column
  // estimate, which tracks the codebook only approximately.
  double average_energy() const;

  // Remove outermost-shell branches column by column, keeping the
  // sequence count at or above 2^floor(log2(count)). Every removed
  // sequence has energy in the top shell. Throws when levels() == 1.
  EnergyTrellis trim_top_level() const;

  // Counts as decimal text, one column per line.
  void dump(std::ostream& os) const;

 private:
  EnergyTrellis(const AmplitudeAlphabet& alphabet, int n, long long emax,
                const Precision& precision);

  void recompute(const std::vector<char>& removed);

  AmplitudeAlphabet alphabet_;
  int n_;
  long long emax_;
  int levels_;
  Precision precision_;
  std::vector<long long> level_step_;  // (a^2 - 1) / 8 per amplitude
  std::vector<BigInt> counts_;         // (n_ + 1) x levels_, column-major rows
  std::vector<char> removed_;
};

// Laroia-style forward trellis: entry (n, l) counts the n-prefixes of
// energy n + 8l. The final column holds per-shell sequence counts.
class ForwardTrellis {
 public:
  static ForwardTrellis build(const AmplitudeAlphabet& alphabet, int block_length,
                              long long max_energy);

  const AmplitudeAlphabet& alphabet() const { return alphabet_; }
  int block_length() const { return n_; }
  long long max_energy() const { return emax_; }
  int levels() const { return levels_; }

  const BigInt& count(int column, int level) const {
    return counts_[static_cast<std::size_t>(column) * levels_ + level];
  }
  // Number of sequences on shell l of the final column.
  const BigInt& shell_count(int level) const { return count(n_, level); }
  BigInt total() const;

 private:
  ForwardTrellis(const AmplitudeAlphabet& alphabet, int n, long long emax);

  AmplitudeAlphabet alphabet_;
  int n_;
  long long emax_;
  int levels_;
  std::vector<long long> level_step_;
  std::vector<BigInt> counts_;
};

// Table-storage upper bound in bits. Shell mapping keeps ceil(log2 N)+1
// columns instead of N+1.
std::uint64_t storage_bound_bits(int block_length, int levels, double rate,
                                 const Precision& precision,
                                 bool shell_mapping_columns = false);

}  // namespace ess

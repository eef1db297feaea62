#include "ess/trellis.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <ostream>

#include "ess/errors.hpp"

namespace ess {

using boost::multiprecision::cpp_rational;

double log2_big(const BigInt& v) {
  const std::size_t bits = bit_length(v);
  if (bits == 0) throw ParameterError("log2 of zero");
  if (bits <= 64) return std::log2(v.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = v >> shift;
  return static_cast<double>(shift) + std::log2(top.convert_to<double>());
}

BigInt round_down_mantissa(const BigInt& value, int mantissa_bits) {
  if (value.is_zero()) return value;
  const std::size_t bits = bit_length(value);
  if (bits <= static_cast<std::size_t>(mantissa_bits)) return value;
  const std::size_t p = bits - mantissa_bits;
  return (value >> p) << p;
}

BPCount BPCount::decompose(const BigInt& value, int mantissa_bits) {
  BPCount c;
  const std::size_t bits = bit_length(value);
  if (bits <= static_cast<std::size_t>(mantissa_bits)) {
    c.mantissa = value;
    c.exponent = 0;
  } else {
    c.exponent = static_cast<unsigned>(bits - mantissa_bits);
    c.mantissa = value >> c.exponent;
  }
  return c;
}

int num_levels(int block_length, long long max_energy) {
  if (block_length < 1) throw ParameterError("block length must be >= 1");
  if (max_energy < block_length)
    throw ParameterError("energy bound below block length: even the all-ones sequence is excluded");
  const long long l = (max_energy - block_length) / 8 + 1;
  return static_cast<int>(l);
}

EnergyTrellis::EnergyTrellis(const AmplitudeAlphabet& alphabet, int n, long long emax,
                             const Precision& precision)
    : alphabet_(alphabet), n_(n), emax_(emax),
      levels_(num_levels(n, emax)), precision_(precision) {
  for (int a : alphabet_.amplitudes())
    level_step_.push_back((static_cast<long long>(a) * a - 1) / 8);
  const std::size_t cells = static_cast<std::size_t>(n_ + 1) * levels_;
  counts_.assign(cells, BigInt(0));
  removed_.assign(cells, 0);
}

EnergyTrellis EnergyTrellis::build(const AmplitudeAlphabet& alphabet, int block_length,
                                   long long max_energy, const Precision& precision) {
  if (precision.is_bounded()) {
    if (precision.mantissa_bits < 2)
      throw ParameterError("bounded precision needs at least a 2-bit mantissa");
    if (precision.exponent_bits < 1)
      throw ParameterError("bounded precision needs at least a 1-bit exponent");
  }
  EnergyTrellis t(alphabet, block_length, max_energy, precision);
  t.recompute(t.removed_);
  return t;
}

void EnergyTrellis::recompute(const std::vector<char>& removed) {
  removed_ = removed;
  const int num_amps = alphabet_.size();
  const unsigned long long max_exponent =
      precision_.is_bounded()
          ? (precision_.exponent_bits >= 64 ? ~0ull
                                            : (1ull << precision_.exponent_bits) - 1)
          : 0;

  auto cell = [&](int col, int lvl) -> BigInt& {
    return counts_[static_cast<std::size_t>(col) * levels_ + lvl];
  };
  auto dead = [&](int col, int lvl) {
    return removed_[static_cast<std::size_t>(col) * levels_ + lvl] != 0;
  };

  for (int l = 0; l < levels_; ++l)
    cell(n_, l) = dead(n_, l) ? 0 : 1;

  for (int col = n_ - 1; col >= 0; --col) {
    for (int l = 0; l < levels_; ++l) {
      BigInt& out = cell(col, l);
      if (dead(col, l)) {
        out = 0;
        continue;
      }
      if (!precision_.is_bounded()) {
        BigInt s = 0;
        for (int i = 0; i < num_amps; ++i) {
          const long long lc = l + level_step_[i];
          if (lc < levels_) s += cell(col + 1, static_cast<int>(lc));
        }
        out = std::move(s);
      } else {
        // Fixed-width accumulation: add the children smallest-first
        // (largest amplitude first) and renormalize to the mantissa
        // width after every addition.
        BigInt s = 0;
        for (int i = num_amps - 1; i >= 0; --i) {
          const long long lc = l + level_step_[i];
          if (lc >= levels_) continue;
          s += cell(col + 1, static_cast<int>(lc));
          s = round_down_mantissa(s, precision_.mantissa_bits);
        }
        if (!s.is_zero()) {
          const std::size_t bits = bit_length(s);
          if (bits > static_cast<std::size_t>(precision_.mantissa_bits)) {
            const unsigned long long p = bits - precision_.mantissa_bits;
            if (p > max_exponent)
              throw ParameterError("bounded-precision exponent overflows the configured width");
          }
        }
        out = std::move(s);
      }
    }
  }
}

const BigInt& EnergyTrellis::child_count(int column, int level, int amp_index) const {
  static const BigInt kZero = 0;
  const long long lc = level + level_step_[amp_index];
  if (lc >= levels_) return kZero;
  return count(column, static_cast<int>(lc));
}

std::vector<BigInt> EnergyTrellis::amplitude_counts() const {
  std::vector<BigInt> out;
  out.reserve(alphabet_.size());
  for (int i = 0; i < alphabet_.size(); ++i)
    out.push_back(child_count(1, 0, i));
  return out;
}

std::vector<double> EnergyTrellis::amplitude_distribution() const {
  const auto counts = amplitude_counts();
  BigInt total = 0;
  for (const auto& c : counts) total += c;
  std::vector<double> pmf;
  pmf.reserve(counts.size());
  for (const auto& c : counts)
    pmf.push_back(cpp_rational(c, total).convert_to<double>());
  return pmf;
}

double EnergyTrellis::average_energy() const {
  if (precision_.is_bounded()) {
    // First-column estimate; the bounded counts are no longer exact
    // path counts, so an exact codebook mean is not available here.
    const auto counts = amplitude_counts();
    BigInt num = 0, den = 0;
    for (int i = 0; i < alphabet_.size(); ++i) {
      const long long a2 = static_cast<long long>(alphabet_.amplitude(i)) *
                           alphabet_.amplitude(i);
      num += counts[i] * a2;
      den += counts[i];
    }
    return static_cast<double>(n_) * cpp_rational(num, den).convert_to<double>();
  }

  // Exact mean over all represented sequences: forward path counts into
  // the final column, weighted by final energy. Works for trimmed
  // trellises, where the codebook is no longer permutation-symmetric.
  const int num_amps = alphabet_.size();
  std::vector<BigInt> prev(levels_, 0), cur(levels_, 0);
  prev[0] = 1;
  for (int col = 1; col <= n_; ++col) {
    for (int l = 0; l < levels_; ++l) {
      BigInt s = 0;
      if (!removed(col, l)) {
        for (int i = 0; i < num_amps; ++i) {
          const long long lp = l - level_step_[i];
          if (lp >= 0) s += prev[static_cast<int>(lp)];
        }
      }
      cur[l] = std::move(s);
    }
    std::swap(prev, cur);
  }
  BigInt num = 0, den = 0;
  for (int l = 0; l < levels_; ++l) {
    num += prev[l] * (n_ + 8ll * l);
    den += prev[l];
  }
  if (den.is_zero()) throw ParameterError("empty codebook");
  return cpp_rational(num, den).convert_to<double>();
}

EnergyTrellis EnergyTrellis::trim_top_level() const {
  if (levels_ < 2) throw ParameterError("cannot trim a single-level trellis");

  const BigInt original = sequence_count();
  if (original.is_zero()) throw ParameterError("empty codebook");
  const BigInt threshold = pow2(bit_length(original) - 1);

  std::vector<char> removed = removed_;
  auto dead = [&](int col, int lvl) {
    return removed[static_cast<std::size_t>(col) * levels_ + lvl] != 0;
  };

  // Walk columns left to right with running forward path counts; each
  // candidate removal kills exactly forward * backward paths, all of
  // which end in the top shell. Backward counts at column n are not
  // affected by removals in columns <= n, so the original table stays
  // valid for the deltas.
  const int num_amps = alphabet_.size();
  const int top = levels_ - 1;
  BigInt remaining = original;
  std::vector<BigInt> prev(levels_, 0), cur(levels_, 0);
  prev[0] = 1;
  for (int col = 1; col <= n_; ++col) {
    for (int l = 0; l < levels_; ++l) {
      BigInt s = 0;
      if (!dead(col, l)) {
        for (int i = 0; i < num_amps; ++i) {
          const long long lp = l - level_step_[i];
          if (lp >= 0) s += prev[static_cast<int>(lp)];
        }
      }
      cur[l] = std::move(s);
    }
    if (!dead(col, top)) {
      const BigInt delta = cur[top] * count(col, top);
      if (!delta.is_zero() && remaining - delta >= threshold) {
        remaining -= delta;
        removed[static_cast<std::size_t>(col) * levels_ + top] = 1;
        cur[top] = 0;
      }
    }
    std::swap(prev, cur);
  }

  EnergyTrellis trimmed(alphabet_, n_, emax_, precision_);
  trimmed.recompute(removed);
  return trimmed;
}

void EnergyTrellis::dump(std::ostream& os) const {
  for (int col = 0; col <= n_; ++col) {
    os << col << ':';
    for (int l = 0; l < levels_; ++l) os << ' ' << count(col, l);
    os << '\n';
  }
}

ForwardTrellis::ForwardTrellis(const AmplitudeAlphabet& alphabet, int n, long long emax)
    : alphabet_(alphabet), n_(n), emax_(emax), levels_(num_levels(n, emax)) {
  for (int a : alphabet_.amplitudes())
    level_step_.push_back((static_cast<long long>(a) * a - 1) / 8);
  counts_.assign(static_cast<std::size_t>(n_ + 1) * levels_, BigInt(0));
}

ForwardTrellis ForwardTrellis::build(const AmplitudeAlphabet& alphabet, int block_length,
                                     long long max_energy) {
  ForwardTrellis t(alphabet, block_length, max_energy);
  auto cell = [&](int col, int lvl) -> BigInt& {
    return t.counts_[static_cast<std::size_t>(col) * t.levels_ + lvl];
  };
  cell(0, 0) = 1;
  for (int col = 1; col <= t.n_; ++col) {
    for (int l = 0; l < t.levels_; ++l) {
      BigInt s = 0;
      for (std::size_t i = 0; i < t.level_step_.size(); ++i) {
        const long long lp = l - t.level_step_[i];
        if (lp >= 0) s += cell(col - 1, static_cast<int>(lp));
      }
      cell(col, l) = std::move(s);
    }
  }
  return t;
}

BigInt ForwardTrellis::total() const {
  BigInt s = 0;
  for (int l = 0; l < levels_; ++l) s += shell_count(l);
  return s;
}

namespace {
// ceil that tolerates double rounding of values that are meant to be
// exact integers (e.g. N * (k/N)).
std::uint64_t ceil_with_tolerance(double x) {
  const double r = std::round(x);
  if (std::fabs(x - r) < 1e-9) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}
}  // namespace

std::uint64_t storage_bound_bits(int block_length, int levels, double rate,
                                 const Precision& precision,
                                 bool shell_mapping_columns) {
  std::uint64_t columns;
  if (shell_mapping_columns) {
    columns = static_cast<std::uint64_t>(
                  std::ceil(std::log2(static_cast<double>(block_length)) - 1e-12)) + 1;
  } else {
    columns = static_cast<std::uint64_t>(block_length) + 1;
  }
  const std::uint64_t per_entry =
      precision.is_bounded()
          ? static_cast<std::uint64_t>(precision.mantissa_bits + precision.exponent_bits)
          : ceil_with_tolerance(static_cast<double>(block_length) * rate);
  return static_cast<std::uint64_t>(levels) * columns * per_entry;
}

}  // namespace ess

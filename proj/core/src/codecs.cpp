#include "ess/codecs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ess/analysis.hpp"
#include "ess/errors.hpp"
#include "ess/rng.hpp"

namespace ess {

int input_length(const BigInt& codebook_size) {
  if (codebook_size.is_zero()) throw ParameterError("empty codebook");
  return static_cast<int>(bit_length(codebook_size)) - 1;
}

std::vector<int> ess_encode(const EnergyTrellis& trellis, BigInt index) {
  if (index < 0 || index >= trellis.sequence_count())
    throw RangeError("index outside the codebook");
  const auto& amps = trellis.alphabet().amplitudes();
  const int n = trellis.block_length();
  std::vector<int> seq(n);
  int level = 0;
  for (int col = 1; col <= n; ++col) {
    bool placed = false;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const BigInt& c = trellis.child_count(col, level, static_cast<int>(i));
      if (index < c) {
        seq[col - 1] = amps[i];
        level += static_cast<int>((static_cast<long long>(amps[i]) * amps[i] - 1) / 8);
        placed = true;
        break;
      }
      index -= c;
    }
    if (!placed) throw RangeError("index outside the codebook");
  }
  return seq;
}

BigInt ess_decode(const EnergyTrellis& trellis, std::span<const int> sequence) {
  const auto& alphabet = trellis.alphabet();
  const int n = trellis.block_length();
  if (static_cast<int>(sequence.size()) != n)
    throw InvalidSequenceError("sequence length does not match the trellis");
  BigInt index = 0;
  int level = 0;
  for (int col = 1; col <= n; ++col) {
    const int ai = alphabet.index_of(sequence[col - 1]);
    if (ai < 0) throw InvalidSequenceError("symbol outside the amplitude alphabet");
    for (int b = 0; b < ai; ++b)
      index += trellis.child_count(col, level, b);
    const long long step =
        (static_cast<long long>(sequence[col - 1]) * sequence[col - 1] - 1) / 8;
    if (level + step >= trellis.levels() ||
        trellis.child_count(col, level, ai).is_zero())
      throw InvalidSequenceError("sequence energy exceeds the trellis bound");
    level += static_cast<int>(step);
  }
  return index;
}

std::vector<int> laroia_encode(const ForwardTrellis& trellis, BigInt index) {
  if (index < 0 || index >= trellis.total())
    throw RangeError("index outside the codebook");
  const auto& amps = trellis.alphabet().amplitudes();
  const int n = trellis.block_length();

  int shell = 0;
  for (; shell < trellis.levels(); ++shell) {
    const BigInt& g = trellis.shell_count(shell);
    if (index < g) break;
    index -= g;
  }

  std::vector<int> seq(n);
  long long rem_level = shell;  // remaining exact energy, in level units
  for (int col = 1; col <= n; ++col) {
    bool placed = false;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const long long step = (static_cast<long long>(amps[i]) * amps[i] - 1) / 8;
      if (rem_level - step < 0) break;
      const BigInt& c = trellis.count(n - col, static_cast<int>(rem_level - step));
      if (index < c) {
        seq[col - 1] = amps[i];
        rem_level -= step;
        placed = true;
        break;
      }
      index -= c;
    }
    if (!placed) throw RangeError("index outside the codebook");
  }
  return seq;
}

BigInt laroia_decode(const ForwardTrellis& trellis, std::span<const int> sequence) {
  const auto& alphabet = trellis.alphabet();
  const int n = trellis.block_length();
  if (static_cast<int>(sequence.size()) != n)
    throw InvalidSequenceError("sequence length does not match the trellis");

  long long energy = 0;
  for (int s : sequence) {
    if (alphabet.index_of(s) < 0)
      throw InvalidSequenceError("symbol outside the amplitude alphabet");
    energy += static_cast<long long>(s) * s;
  }
  if (energy > trellis.max_energy())
    throw InvalidSequenceError("sequence energy exceeds the trellis bound");

  const long long shell = (energy - n) / 8;
  BigInt index = 0;
  for (long long l = 0; l < shell; ++l) index += trellis.shell_count(static_cast<int>(l));

  long long rem_level = shell;
  for (int col = 1; col <= n; ++col) {
    const int ai = alphabet.index_of(sequence[col - 1]);
    for (int b = 0; b < ai; ++b) {
      const long long step = (static_cast<long long>(alphabet.amplitude(b)) *
                              alphabet.amplitude(b) - 1) / 8;
      if (rem_level - step < 0) break;
      index += trellis.count(n - col, static_cast<int>(rem_level - step));
    }
    rem_level -= (static_cast<long long>(sequence[col - 1]) * sequence[col - 1] - 1) / 8;
  }
  return index;
}

Composition::Composition(const AmplitudeAlphabet& alphabet, std::vector<int> counts)
    : alphabet_(alphabet), counts_(std::move(counts)) {
  if (static_cast<int>(counts_.size()) != alphabet_.size())
    throw ParameterError("composition size does not match the alphabet");
  n_ = 0;
  for (int c : counts_) {
    if (c < 0) throw ParameterError("negative amplitude count");
    n_ += c;
  }
  if (n_ == 0) throw ParameterError("empty composition");
}

long long Composition::sequence_energy() const {
  long long e = 0;
  for (int i = 0; i < alphabet_.size(); ++i)
    e += static_cast<long long>(counts_[i]) * alphabet_.amplitude(i) *
         alphabet_.amplitude(i);
  return e;
}

BigInt multinomial(const Composition& composition) {
  BigInt result = 1;
  int placed = 0;
  for (int c : composition.counts()) {
    // result *= C(placed + c, c), kept exact by incremental division.
    for (int j = 1; j <= c; ++j) {
      ++placed;
      result *= placed;
      result /= j;
    }
  }
  return result;
}

double cc_rate(const Composition& composition) {
  return log2_big(multinomial(composition)) / composition.block_length();
}

std::vector<int> cc_encode(const Composition& composition, BigInt index) {
  BigInt remaining_count = multinomial(composition);
  if (index < 0 || index >= remaining_count)
    throw RangeError("index outside the codebook");
  std::vector<int> counts = composition.counts();
  const auto& alphabet = composition.alphabet();
  int remaining = composition.block_length();
  std::vector<int> seq(remaining);
  for (int pos = 0; pos < composition.block_length(); ++pos) {
    bool placed = false;
    for (int i = 0; i < alphabet.size(); ++i) {
      if (counts[i] == 0) continue;
      // Sequences continuing with amplitude i: M * c_i / R, exactly.
      BigInt sub = remaining_count * counts[i] / remaining;
      if (index < sub) {
        seq[pos] = alphabet.amplitude(i);
        --counts[i];
        --remaining;
        remaining_count = std::move(sub);
        placed = true;
        break;
      }
      index -= sub;
    }
    if (!placed) throw RangeError("index outside the codebook");
  }
  return seq;
}

BigInt cc_decode(const Composition& composition, std::span<const int> sequence) {
  if (static_cast<int>(sequence.size()) != composition.block_length())
    throw InvalidSequenceError("sequence length does not match the composition");
  std::vector<int> counts = composition.counts();
  const auto& alphabet = composition.alphabet();
  BigInt remaining_count = multinomial(composition);
  int remaining = composition.block_length();
  BigInt index = 0;
  for (int s : sequence) {
    const int ai = alphabet.index_of(s);
    if (ai < 0 || counts[ai] == 0)
      throw InvalidSequenceError("sequence does not match the composition");
    for (int b = 0; b < ai; ++b) {
      if (counts[b] == 0) continue;
      index += remaining_count * counts[b] / remaining;
    }
    remaining_count = remaining_count * counts[ai] / remaining;
    --counts[ai];
    --remaining;
  }
  return index;
}

Composition mb_composition(const AmplitudeAlphabet& alphabet, int n,
                           std::span<const double> pmf) {
  if (static_cast<int>(pmf.size()) != alphabet.size())
    throw ParameterError("pmf size does not match the alphabet");
  std::vector<int> counts(alphabet.size());
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < alphabet.size(); ++i) {
    const double target = n * pmf[i];
    counts[i] = static_cast<int>(std::floor(target));
    assigned += counts[i];
    remainders.emplace_back(target - counts[i], i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // ties toward the smaller amplitude
  });
  for (int j = 0; j < n - assigned; ++j) ++counts[remainders[j].second];
  return Composition(alphabet, std::move(counts));
}

namespace {

// log2 of N!/prod(c!) from a lgamma table; exact check is only needed
// at the feasibility boundary.
struct MultinomialLog {
  std::vector<double> lg;  // lg[i] = lgamma(i + 1)
  explicit MultinomialLog(int n) : lg(n + 1) {
    for (int i = 0; i <= n; ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
  double operator()(int n, const std::vector<int>& counts) const {
    double v = lg[n];
    for (int c : counts) v -= lg[c];
    return v / 0.6931471805599453;
  }
};

bool feasible(const AmplitudeAlphabet& alphabet, int n, const std::vector<int>& counts,
              double threshold_log2, const MultinomialLog& ml) {
  const double l = ml(n, counts);
  if (l > threshold_log2 + 1e-6) return true;
  if (l < threshold_log2 - 1e-6) return false;
  const BigInt m = multinomial(Composition(alphabet, counts));
  // 2^threshold with fractional part handled through log2.
  return log2_big(m) >= threshold_log2 - 1e-12;
}

// Exhaustive recursive search with an energy lower-bound prune.
void search_rec(const AmplitudeAlphabet& alphabet, int n, double threshold_log2,
                const MultinomialLog& ml, std::vector<int>& counts, int pos,
                int remaining, long long energy, long long& best_energy,
                double& best_log2, std::vector<int>& best) {
  const long long a2 = static_cast<long long>(alphabet.amplitude(pos)) *
                       alphabet.amplitude(pos);
  if (energy + remaining * a2 > best_energy) return;  // cheapest completion too hot
  if (pos == alphabet.size() - 1) {
    counts[pos] = remaining;
    const long long e = energy + remaining * a2;
    const double l = ml(n, counts);
    if ((e < best_energy || (e == best_energy && l > best_log2)) &&
        feasible(alphabet, n, counts, threshold_log2, ml)) {
      best_energy = e;
      best_log2 = l;
      best = counts;
    }
    return;
  }
  for (int c = remaining; c >= 0; --c)
  {
    counts[pos] = c;
    search_rec(alphabet, n, threshold_log2, ml, counts, pos + 1, remaining - c,
               energy + c * a2, best_energy, best_log2, best);
  }
  counts[pos] = 0;
}

Composition search_composition(const AmplitudeAlphabet& alphabet, int n,
                               double threshold_log2) {
  const MultinomialLog ml(n);

  // Size of the composition space ~ C(n + q - 1, q - 1).
  double space = 1.0;
  for (int i = 1; i < alphabet.size(); ++i)
    space *= static_cast<double>(n + i) / i;

  if (space <= 8e6) {
    std::vector<int> counts(alphabet.size(), 0), best;
    long long best_energy = static_cast<long long>(n) * alphabet.max_amplitude() *
                                alphabet.max_amplitude() + 1;
    double best_log2 = -1.0;
    search_rec(alphabet, n, threshold_log2, ml, counts, 0, n, 0, best_energy,
               best_log2, best);
    if (best.empty())
      throw ParameterError("no composition reaches the requested codebook size");
    return Composition(alphabet, std::move(best));
  }

  // Heuristic fallback for large spaces: start from the energy-matched
  // rounding of a Maxwell-Boltzmann pmf at the feasibility boundary,
  // then descend with unit exchanges while the codebook stays big enough.
  const double uniform_energy = [&] {
    double e = 0;
    for (int a : alphabet.amplitudes()) e += static_cast<double>(a) * a;
    return e / alphabet.size();
  }();
  double lo = 1.0, hi = uniform_energy;
  std::vector<int> start;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto pmf = mb_pmf(alphabet, mb_fit_energy(alphabet, mid)).pmf;
    auto cand = mb_composition(alphabet, n, pmf).counts();
    if (feasible(alphabet, n, cand, threshold_log2, ml)) {
      start = std::move(cand);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (start.empty())
    throw ParameterError("no composition reaches the requested codebook size");

  bool improved = true;
  std::vector<int> cur = start;
  auto energy_of = [&](const std::vector<int>& c) {
    long long e = 0;
    for (int i = 0; i < alphabet.size(); ++i)
      e += static_cast<long long>(c[i]) * alphabet.amplitude(i) * alphabet.amplitude(i);
    return e;
  };
  while (improved) {
    improved = false;
    long long cur_e = energy_of(cur);
    for (int from = 0; from < alphabet.size(); ++from) {
      for (int to = 0; to < alphabet.size(); ++to) {
        for (int step = 1; step <= 2; ++step) {
          if (from == to || cur[from] < step) continue;
          auto cand = cur;
          cand[from] -= step;
          cand[to] += step;
          const long long e = energy_of(cand);
          if (e < cur_e && feasible(alphabet, n, cand, threshold_log2, ml)) {
            cur = std::move(cand);
            cur_e = e;
            improved = true;
          }
        }
      }
    }
  }
  return Composition(alphabet, std::move(cur));
}

}  // namespace

Composition find_cc_composition(const AmplitudeAlphabet& alphabet, int n,
                                int input_bits) {
  if (input_bits < 0) throw ParameterError("negative input length");
  return search_composition(alphabet, n, static_cast<double>(input_bits));
}

Composition find_cc_composition_rate(const AmplitudeAlphabet& alphabet, int n,
                                     double rate) {
  return search_composition(alphabet, n, rate * n);
}

OperationalEnergy operational_energy(const EncodeFn& encode, int input_bits,
                                     std::uint64_t seed, std::uint64_t mc_samples) {
  OperationalEnergy result;
  auto energy_of = [](const std::vector<int>& seq) {
    long long e = 0;
    for (int s : seq) e += static_cast<long long>(s) * s;
    return static_cast<double>(e);
  };

  if (input_bits <= 20) {
    const std::uint64_t total = 1ull << input_bits;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < total; ++i) sum += energy_of(encode(BigInt(i)));
    result.mean = sum / static_cast<double>(total);
    result.samples = total;
    result.exact = true;
    return result;
  }

  Rng rng(Rng::stream_seed(seed, 0x0e5a11ull));
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t s = 0; s < mc_samples; ++s) {
    BigInt index = 0;
    int remaining = input_bits;
    while (remaining > 0) {
      const int take = remaining >= 64 ? 64 : remaining;
      index <<= take;
      index |= BigInt(rng.next_u64() >> (64 - take));
      remaining -= take;
    }
    const double e = energy_of(encode(index));
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / static_cast<double>(mc_samples);
  const double var =
      (sumsq - sum * mean) / static_cast<double>(mc_samples - 1);
  result.mean = mean;
  result.ci_half_width = 1.959964 * std::sqrt(var / static_cast<double>(mc_samples));
  result.samples = mc_samples;
  return result;
}

ShapedCodeSummary summarize(const EnergyTrellis& trellis) {
  ShapedCodeSummary s;
  const BigInt& count = trellis.sequence_count();
  s.input_bits = input_length(count);
  s.operational_rate =
      static_cast<double>(s.input_bits) / trellis.block_length();
  s.shaping_rate = log2_big(count) / trellis.block_length();
  s.average_energy = trellis.average_energy();
  s.shaping_gain_db =
      shaping_gain_db(s.shaping_rate, s.average_energy, trellis.block_length());
  return s;
}

}  // namespace ess

#include "ess/alphabet.hpp"

#include "ess/errors.hpp"

namespace ess {

AmplitudeAlphabet::AmplitudeAlphabet(int bits_per_symbol) : m_(bits_per_symbol) {
  if (m_ < 2 || m_ > 16)
    throw ParameterError("bits per symbol must be in [2, 16]");
  const int half = 1 << (m_ - 1);
  amplitudes_.reserve(half);
  for (int i = 0; i < half; ++i) amplitudes_.push_back(2 * i + 1);
}

int AmplitudeAlphabet::index_of(int amplitude) const {
  if (amplitude < 1 || amplitude > max_amplitude() || amplitude % 2 == 0)
    return -1;
  return (amplitude - 1) / 2;
}

namespace {
unsigned gray(unsigned x) { return x ^ (x >> 1); }
}  // namespace

GrayLabeling::GrayLabeling(const AmplitudeAlphabet& alphabet)
    : m_(alphabet.bits_per_symbol()), amplitudes_(alphabet.amplitudes()) {
  const int half = alphabet.size();
  const int total = 2 * half;
  points_.resize(total);
  labels_.resize(total);
  for (int j = 0; j < total; ++j) {
    // Points sorted ascending: j < half are the negative amplitudes in
    // descending magnitude, then the positive half.
    points_[j] = j < half ? -amplitudes_[half - 1 - j] : amplitudes_[j - half];
    labels_[j] = gray(static_cast<unsigned>(j));
  }
  amp_from_bits_.assign(half, -1);
  for (int t = 0; t < half; ++t)
    amp_from_bits_[amplitude_bits(t)] = t;
}

unsigned GrayLabeling::amplitude_bits(int amp_index) const {
  const unsigned half_mask = (1u << (m_ - 1)) - 1;
  // Positive points occupy the reflected upper half of the code.
  return gray(half_mask - static_cast<unsigned>(amp_index)) & half_mask;
}

int GrayLabeling::amp_index_from_bits(unsigned bits) const {
  return amp_from_bits_[bits];
}

int GrayLabeling::point_value(int sign_bit, int amp_index) const {
  const int a = amplitudes_[amp_index];
  return sign_bit ? a : -a;
}

}  // namespace ess

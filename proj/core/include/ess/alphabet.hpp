#pragma once

#include <vector>

namespace ess {

// Amplitude alphabet of a 2^m-ASK constellation: the odd integers
// 1, 3, ..., 2^m - 1. Amplitudes are kept sorted ascending.
class AmplitudeAlphabet {
 public:
  explicit AmplitudeAlphabet(int bits_per_symbol);

  int bits_per_symbol() const { return m_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }
  const std::vector<int>& amplitudes() const { return amplitudes_; }
  int amplitude(int index) const { return amplitudes_[index]; }
  int max_amplitude() const { return amplitudes_.back(); }

  // Index of an amplitude in the alphabet, -1 if not a member.
  int index_of(int amplitude) const;

 private:
  int m_;
  std::vector<int> amplitudes_;
};

// Binary reflected Gray labeling of the signed constellation
// {-(2^m-1), ..., -1, +1, ..., 2^m-1}. Label bit 0 is the sign bit
// (1 for the positive half); bits 1..m-1 identify the amplitude and are
// shared between +a and -a.
class GrayLabeling {
 public:
  explicit GrayLabeling(const AmplitudeAlphabet& alphabet);

  int bits_per_symbol() const { return m_; }
  int num_points() const { return static_cast<int>(points_.size()); }
  int point(int j) const { return points_[j]; }
  unsigned label(int j) const { return labels_[j]; }

  // i-th label bit of point j; i = 0 is the sign bit.
  int bit(int j, int i) const { return (labels_[j] >> (m_ - 1 - i)) & 1u; }

  // The m-1 amplitude label bits (MSB first) of the amplitude with the
  // given alphabet index.
  unsigned amplitude_bits(int amp_index) const;
  int amp_index_from_bits(unsigned bits) const;

  // Signed constellation point from a sign bit and an amplitude index.
  int point_value(int sign_bit, int amp_index) const;

 private:
  int m_;
  std::vector<int> points_;        // sorted ascending, 2^m entries
  std::vector<unsigned> labels_;   // labels_[j] = BRGC label of points_[j]
  std::vector<int> amp_from_bits_; // inverse of amplitude_bits
  std::vector<int> amplitudes_;
};

}  // namespace ess

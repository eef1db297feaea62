#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ess {

// Rate-1/2 non-systematic convolutional mother code of IEEE 802.11
// (constraint length 7, generators 133/171 octal):
//   v1[t] = u[t] + u[t-2] + u[t-3] + u[t-5] + u[t-6]
//   v2[t] = u[t] + u[t-1] + u[t-2] + u[t-3] + u[t-6]
// State bit i holds u[t-1-i].
class ConvEncoder {
 public:
  static constexpr int kStates = 64;

  struct Output {
    int v1;
    int v2;
  };

  static int output_v1(int u, unsigned s) {
    return u ^ ((s >> 1) & 1) ^ ((s >> 2) & 1) ^ ((s >> 4) & 1) ^ ((s >> 5) & 1);
  }
  static int output_v2(int u, unsigned s) {
    return u ^ (s & 1) ^ ((s >> 1) & 1) ^ ((s >> 2) & 1) ^ ((s >> 5) & 1);
  }
  static unsigned next_state(unsigned s, int u) {
    return ((s << 1) | static_cast<unsigned>(u)) & 0x3fu;
  }

  Output step(int u) {
    const Output out{output_v1(u, state_), output_v2(u, state_)};
    state_ = next_state(state_, u);
    return out;
  }

  unsigned state() const { return state_; }
  void reset(unsigned s = 0) { state_ = s; }

 private:
  unsigned state_ = 0;
};

// Encode a bit sequence from the all-zero state; six zero tail bits are
// appended when terminate is set. Returns the two unpunctured output
// streams.
std::pair<std::vector<int>, std::vector<int>> conv_encode(std::span<const int> bits,
                                                          bool terminate);

// Input-select functions: the encoder input that forces the prescribed
// bit onto one of the two output branches in the current state.
inline int select_input_for_v2(int b, unsigned s) {
  return b ^ (s & 1) ^ ((s >> 1) & 1) ^ ((s >> 2) & 1) ^ ((s >> 5) & 1);
}
inline int select_input_for_v1(int b, unsigned s) {
  return b ^ ((s >> 1) & 1) ^ ((s >> 2) & 1) ^ ((s >> 4) & 1) ^ ((s >> 5) & 1);
}

// Standard puncturing patterns of the 802.11 family. keep_v1/keep_v2
// flag which outputs survive in each period position.
struct PuncturePattern {
  int rate_num = 1;
  int rate_den = 2;
  std::vector<int> keep_v1;
  std::vector<int> keep_v2;

  int period() const { return static_cast<int>(keep_v1.size()); }
  int kept_per_period() const;

  // Supported rates: 1/2, 2/3, 3/4, 5/6.
  static PuncturePattern for_rate(int num, int den);
};

// Soft-input maximum-likelihood decoder over the 64-state trellis.
// llr1/llr2 hold one value per time step (sign convention
// log P(bit=0)/P(bit=1)); punctured positions must carry exactly 0.
// With terminated set, the traceback is forced to end in state 0.
std::vector<int> viterbi_decode(std::span<const double> llr1,
                                std::span<const double> llr2, bool terminated);

}  // namespace ess

#include "ess/convcode.hpp"

#include <algorithm>
#include <limits>

#include "ess/errors.hpp"

namespace ess {

std::pair<std::vector<int>, std::vector<int>> conv_encode(std::span<const int> bits,
                                                          bool terminate) {
  ConvEncoder enc;
  const std::size_t total = bits.size() + (terminate ? 6 : 0);
  std::vector<int> v1(total), v2(total);
  for (std::size_t t = 0; t < total; ++t) {
    const int u = t < bits.size() ? (bits[t] & 1) : 0;
    const auto out = enc.step(u);
    v1[t] = out.v1;
    v2[t] = out.v2;
  }
  return {std::move(v1), std::move(v2)};
}

int PuncturePattern::kept_per_period() const {
  int k = 0;
  for (std::size_t i = 0; i < keep_v1.size(); ++i) k += keep_v1[i] + keep_v2[i];
  return k;
}

PuncturePattern PuncturePattern::for_rate(int num, int den) {
  PuncturePattern p;
  p.rate_num = num;
  p.rate_den = den;
  if (num == 1 && den == 2) {
    p.keep_v1 = {1};
    p.keep_v2 = {1};
  } else if (num == 2 && den == 3) {
    p.keep_v1 = {1, 1};
    p.keep_v2 = {1, 0};
  } else if (num == 3 && den == 4) {
    p.keep_v1 = {1, 1, 0};
    p.keep_v2 = {1, 0, 1};
  } else if (num == 5 && den == 6) {
    p.keep_v1 = {1, 1, 0, 1, 0};
    p.keep_v2 = {1, 0, 1, 0, 1};
  } else {
    throw ParameterError("unsupported code rate (use 1/2, 2/3, 3/4 or 5/6)");
  }
  return p;
}

std::vector<int> viterbi_decode(std::span<const double> llr1,
                                std::span<const double> llr2, bool terminated) {
  if (llr1.size() != llr2.size())
    throw ParameterError("branch LLR streams differ in length");
  const int steps = static_cast<int>(llr1.size());
  constexpr int kStates = ConvEncoder::kStates;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Static tables of outputs and successors.
  static const auto tables = [] {
    struct T {
      unsigned next[kStates][2];
      int v1[kStates][2];
      int v2[kStates][2];
    } t{};
    for (unsigned s = 0; s < kStates; ++s) {
      for (int u = 0; u < 2; ++u) {
        t.next[s][u] = ConvEncoder::next_state(s, u);
        t.v1[s][u] = ConvEncoder::output_v1(u, s);
        t.v2[s][u] = ConvEncoder::output_v2(u, s);
      }
    }
    return t;
  }();

  std::vector<double> metric(kStates, kNegInf), next_metric(kStates, kNegInf);
  metric[0] = 0.0;
  std::vector<std::uint8_t> prev(static_cast<std::size_t>(steps) * kStates);

  for (int t = 0; t < steps; ++t) {
    std::fill(next_metric.begin(), next_metric.end(), kNegInf);
    const double l1 = llr1[t];
    const double l2 = llr2[t];
    for (int s = 0; s < kStates; ++s) {
      const double base = metric[s];
      if (base == kNegInf) continue;
      for (int u = 0; u < 2; ++u) {
        // Agreement metric: positive LLR favors bit 0.
        const double m = base + (tables.v1[s][u] ? -l1 : l1) +
                         (tables.v2[s][u] ? -l2 : l2);
        const unsigned ns = tables.next[s][u];
        if (m > next_metric[ns]) {
          next_metric[ns] = m;
          prev[static_cast<std::size_t>(t) * kStates + ns] =
              static_cast<std::uint8_t>(s);
        }
      }
    }
    std::swap(metric, next_metric);
  }

  int state = 0;
  if (!terminated) {
    state = static_cast<int>(
        std::max_element(metric.begin(), metric.end()) - metric.begin());
  }

  std::vector<int> decoded(steps);
  for (int t = steps - 1; t >= 0; --t) {
    decoded[t] = state & 1;  // the newest state bit is the input
    state = prev[static_cast<std::size_t>(t) * kStates + state];
  }
  return decoded;
}

}  // namespace ess

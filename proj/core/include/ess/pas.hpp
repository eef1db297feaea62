#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ess/alphabet.hpp"
#include "ess/convcode.hpp"
#include "ess/rng.hpp"
#include "ess/trellis.hpp"

namespace ess {

// Everything needed to run one shaped (or uniform baseline) frame end
// to end over the AWGN channel.
struct PASConfig {
  std::string scheme = "ess";  // "ess" | "uniform"
  int m = 3;
  int shaping_length = 96;     // amplitudes per shaping block (ess)
  long long max_energy = 1120;
  int blocks_per_frame = 8;
  int code_rate_num = 5;
  int code_rate_den = 6;
  bool termination = true;
  Precision precision = Precision::full();
  std::uint64_t seed = 1;
  int threads = 1;

  double code_rate() const {
    return static_cast<double>(code_rate_num) / code_rate_den;
  }
  // Fraction of sign bits carrying extra data.
  double gamma() const { return m * code_rate() - (m - 1); }
  int frame_symbols() const { return shaping_length * blocks_per_frame; }

  // Throws ConfigError listing every violation.
  void validate() const;
};

// Per-input-slot role of the selector schedule, repeating with the
// puncture period aligned to symbol labels.
struct SlotRole {
  bool prescribe_v1 = false;
  bool prescribe_v2 = false;
  bool free_data = false;
};

// Maps amplitude bits and extra data bits onto convolutional encoder
// inputs so that every amplitude bit reappears verbatim at its output
// position. Throws when the (m, rate) combination would need to pin
// both outputs of one time step.
class SelectorSchedule {
 public:
  SelectorSchedule(int m, const PuncturePattern& pattern);

  const std::vector<SlotRole>& slots() const { return slots_; }
  int inputs_per_period() const { return static_cast<int>(slots_.size()); }
  int symbols_per_period() const { return symbols_per_period_; }
  int free_per_period() const { return free_per_period_; }
  const PuncturePattern& pattern() const { return pattern_; }

 private:
  PuncturePattern pattern_;
  std::vector<SlotRole> slots_;
  int symbols_per_period_ = 0;
  int free_per_period_ = 0;
};

// Log-likelihood ratios log(P(bit=0|y)/P(bit=1|y)) for every label bit
// of every received symbol, symbol-major. px is indexed like
// labeling.point(); prior probabilities enter the metric. A zero noise
// variance degrades to hard +/- clamped values.
std::vector<double> llr_demap(std::span<const double> y, double noise_var,
                              std::span<const double> px,
                              const GrayLabeling& labeling);

// y = x + n with n ~ N(0, noise_var) i.i.d.; deterministic under the rng.
std::vector<double> awgn_add(std::span<const double> x, double noise_var, Rng& rng);

class PASSystem {
 public:
  explicit PASSystem(const PASConfig& config);

  const PASConfig& config() const { return config_; }
  int input_bits() const { return input_bits_; }  // k, per shaping block
  std::size_t data_bits_per_frame() const { return data_bits_; }
  std::size_t symbols_per_frame() const { return symbols_total_; }
  std::size_t coded_slots_per_frame() const { return slots_total_; }
  double expected_symbol_energy() const { return expected_symbol_energy_; }
  const EnergyTrellis* trellis() const { return trellis_.get(); }
  const GrayLabeling& labeling() const { return labeling_; }
  const std::vector<double>& channel_pmf() const { return px_; }

  std::vector<double> transmit(std::span<const std::uint8_t> data) const;

  struct ReceiveResult {
    std::vector<std::uint8_t> data;
    bool valid = true;  // false when a decoded block left the sphere
  };
  ReceiveResult receive(std::span<const double> y, double noise_var) const;

  // Encoder-side streams of one frame, exposed so tests can check that
  // prescribed output positions carry the shaper's amplitude bits.
  struct FrameTrace {
    std::vector<int> amplitude_bits;   // what the shaper prescribed
    std::vector<int> selected_inputs;  // encoder input stream (incl. tail)
    std::vector<int> kept_bits;        // punctured output stream
    std::vector<int> prescribed_positions;  // indices into kept_bits
  };
  FrameTrace trace(std::span<const std::uint8_t> data) const;

 private:
  std::vector<int> shape_amplitudes(std::span<const std::uint8_t> data) const;
  std::vector<double> modulate(const std::vector<int>& kept_bits) const;

  PASConfig config_;
  AmplitudeAlphabet alphabet_;
  GrayLabeling labeling_;
  std::unique_ptr<EnergyTrellis> trellis_;
  std::optional<SelectorSchedule> schedule_;
  PuncturePattern pattern_;
  int input_bits_ = 0;
  std::size_t data_bits_ = 0;
  std::size_t slots_shaped_ = 0;   // encoder inputs covering the frame body
  std::size_t slots_total_ = 0;    // plus termination tail
  std::size_t kept_total_ = 0;     // coded bits after puncturing
  std::size_t symbols_total_ = 0;  // frame body plus tail symbols
  std::size_t filler_bits_ = 0;    // zero-padding in the last tail symbol
  double expected_symbol_energy_ = 0.0;
  std::vector<double> px_;
};

struct FerPoint {
  double snr_db = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t frame_errors = 0;
  double fer = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct FerOptions {
  std::vector<double> snr_db;
  std::uint64_t max_frames = 100000;
  std::uint64_t target_errors = 100;
};

// Monte Carlo frame-error-rate scan. Per-frame random streams are
// derived from (seed, frame index), so results do not depend on thread
// count or scheduling; stopping is checked at fixed batch boundaries.
std::vector<FerPoint> fer_sim(const PASConfig& config, const FerOptions& options,
                              std::ostream* progress = nullptr);

// 95% confidence interval for a binomial proportion (Wilson score).
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials);

}  // namespace ess

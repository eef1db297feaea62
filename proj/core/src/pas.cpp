#include "ess/pas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "ess/analysis.hpp"
#include "ess/codecs.hpp"
#include "ess/errors.hpp"

namespace ess {

namespace {
constexpr double kHardLlr = 1e6;
}

SelectorSchedule::SelectorSchedule(int m, const PuncturePattern& pattern)
    : pattern_(pattern) {
  const int period = pattern.period();
  const int kept = pattern.kept_per_period();
  const int cycle = std::lcm(kept, m);  // label bits until phases realign
  const int inputs = (cycle / kept) * period;
  symbols_per_period_ = cycle / m;
  slots_.resize(inputs);

  int kidx = 0;
  for (int t = 0; t < inputs; ++t) {
    SlotRole& slot = slots_[t];
    const int pp = t % period;
    if (pattern.keep_v1[pp]) {
      if (kidx % m >= 1) slot.prescribe_v1 = true;
      ++kidx;
    }
    if (pattern.keep_v2[pp]) {
      if (kidx % m >= 1) {
        if (slot.prescribe_v1)
          throw ParameterError(
              "unsupported constellation/rate combination: both encoder outputs "
              "of one step would need pinning");
        slot.prescribe_v2 = true;
      }
      ++kidx;
    }
    if (!slot.prescribe_v1 && !slot.prescribe_v2) {
      slot.free_data = true;
      ++free_per_period_;
    }
  }

  // Bookkeeping must close: prescriptions cover the amplitude bits and
  // free slots carry gamma extra bits per symbol.
  const int prescribed = inputs - free_per_period_;
  if (prescribed != (m - 1) * symbols_per_period_)
    throw ParameterError("selector schedule does not cover the amplitude bits");
}

void PASConfig::validate() const {
  std::vector<std::string> problems;
  const bool ess_scheme = scheme == "ess";
  if (!ess_scheme && scheme != "uniform")
    problems.push_back("scheme must be 'ess' or 'uniform'");
  if (m < 2 || m > 8) problems.push_back("m must be in [2, 8]");
  if (blocks_per_frame < 1) problems.push_back("blocks_per_frame must be >= 1");
  if (threads < 1) problems.push_back("threads must be >= 1");

  PuncturePattern pattern;
  bool have_pattern = false;
  try {
    pattern = PuncturePattern::for_rate(code_rate_num, code_rate_den);
    have_pattern = true;
  } catch (const ParameterError& e) {
    problems.push_back(e.what());
  }

  if (m >= 2 && m <= 8) {
    if (ess_scheme) {
      if (shaping_length < 1) problems.push_back("shaping length must be >= 1");
      if (max_energy < shaping_length)
        problems.push_back("energy bound below the shaping block length");
      const double g = gamma();
      if (g < -1e-9 || g > 1.0 + 1e-9)
        problems.push_back("code rate incompatible with PAS: gamma outside [0, 1]");
      if (precision.is_bounded() && precision.mantissa_bits < 2)
        problems.push_back("bounded precision needs a mantissa of >= 2 bits");
      if (precision.is_bounded() && precision.exponent_bits < 1)
        problems.push_back("bounded precision needs an exponent of >= 1 bit");
      if (have_pattern && g >= -1e-9 && g <= 1.0 + 1e-9) {
        try {
          const SelectorSchedule schedule(m, pattern);
          if (shaping_length >= 1 &&
              frame_symbols() % schedule.symbols_per_period() != 0)
            problems.push_back("frame symbol count must be a multiple of " +
                               std::to_string(schedule.symbols_per_period()) +
                               " for this rate");
        } catch (const ParameterError& e) {
          problems.push_back(e.what());
        }
      }
    } else if (have_pattern) {
      if (shaping_length < 1) problems.push_back("shaping length must be >= 1");
      if ((static_cast<long long>(m) * frame_symbols()) % pattern.kept_per_period() != 0)
        problems.push_back("coded bits per frame must be a multiple of the puncture period");
    }
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::vector<double> awgn_add(std::span<const double> x, double noise_var, Rng& rng) {
  std::vector<double> y(x.begin(), x.end());
  if (noise_var > 0.0) {
    const double sigma = std::sqrt(noise_var);
    for (double& v : y) v += sigma * rng.next_gaussian();
  }
  return y;
}

std::vector<double> llr_demap(std::span<const double> y, double noise_var,
                              std::span<const double> px,
                              const GrayLabeling& labeling) {
  const int m = labeling.bits_per_symbol();
  const int points = labeling.num_points();
  if (static_cast<int>(px.size()) != points)
    throw ParameterError("pmf size does not match the constellation");

  std::vector<double> llrs(y.size() * m);
  std::vector<double> logw(points);
  std::vector<double> log_prior(points);
  for (int j = 0; j < points; ++j)
    log_prior[j] = px[j] > 0.0 ? std::log(px[j])
                               : -std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < y.size(); ++s) {
    if (noise_var <= 0.0) {
      // Noiseless channel: decide from the nearest admissible point.
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < points; ++j) {
        if (px[j] <= 0.0) continue;
        const double d = std::fabs(y[s] - labeling.point(j));
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      for (int i = 0; i < m; ++i)
        llrs[s * m + i] = labeling.bit(best, i) ? -kHardLlr : kHardLlr;
      continue;
    }

    for (int j = 0; j < points; ++j) {
      const double d = y[s] - labeling.point(j);
      logw[j] = log_prior[j] - d * d / (2.0 * noise_var);
    }
    for (int i = 0; i < m; ++i) {
      // Jacobian logsumexp per bit hypothesis.
      double max0 = -std::numeric_limits<double>::infinity();
      double max1 = max0;
      for (int j = 0; j < points; ++j)
        (labeling.bit(j, i) ? max1 : max0) = std::max(
            labeling.bit(j, i) ? max1 : max0, logw[j]);
      double sum0 = 0.0, sum1 = 0.0;
      for (int j = 0; j < points; ++j) {
        if (!std::isfinite(logw[j])) continue;
        if (labeling.bit(j, i))
          sum1 += std::exp(logw[j] - max1);
        else
          sum0 += std::exp(logw[j] - max0);
      }
      double llr;
      if (sum0 == 0.0)
        llr = -kHardLlr;
      else if (sum1 == 0.0)
        llr = kHardLlr;
      else
        llr = (max0 + std::log(sum0)) - (max1 + std::log(sum1));
      llrs[s * m + i] = llr;
    }
  }
  return llrs;
}

PASSystem::PASSystem(const PASConfig& config)
    : config_(config), alphabet_(config.m), labeling_(alphabet_),
      pattern_(PuncturePattern::for_rate(config.code_rate_num, config.code_rate_den)) {
  config_.validate();
  const int m = config_.m;
  const std::size_t frame_symbols = config_.frame_symbols();

  if (config_.scheme == "ess") {
    trellis_ = std::make_unique<EnergyTrellis>(EnergyTrellis::build(
        alphabet_, config_.shaping_length, config_.max_energy, config_.precision));
    input_bits_ = input_length(trellis_->sequence_count());
    schedule_.emplace(m, pattern_);
    const std::size_t periods = frame_symbols / schedule_->symbols_per_period();
    slots_shaped_ = periods * schedule_->inputs_per_period();
    data_bits_ = static_cast<std::size_t>(config_.blocks_per_frame) * input_bits_ +
                 periods * schedule_->free_per_period();
    px_ = px_from_amplitude_pmf(trellis_->amplitude_distribution());
    expected_symbol_energy_ = trellis_->average_energy() / config_.shaping_length;
  } else {
    const std::size_t coded_bits = frame_symbols * m;
    const std::size_t periods = coded_bits / pattern_.kept_per_period();
    slots_shaped_ = periods * pattern_.period();
    data_bits_ = slots_shaped_;
    px_.assign(labeling_.num_points(), 1.0 / labeling_.num_points());
    double e = 0.0;
    for (int j = 0; j < labeling_.num_points(); ++j)
      e += px_[j] * labeling_.point(j) * labeling_.point(j);
    expected_symbol_energy_ = e;
  }

  std::size_t kept_tail = 0;
  slots_total_ = slots_shaped_;
  if (config_.termination) {
    for (std::size_t t = slots_shaped_; t < slots_shaped_ + 6; ++t) {
      const int pp = static_cast<int>(t % pattern_.period());
      kept_tail += pattern_.keep_v1[pp] + pattern_.keep_v2[pp];
    }
    slots_total_ += 6;
  }
  kept_total_ = frame_symbols * m + kept_tail;
  symbols_total_ = frame_symbols + (kept_tail + m - 1) / m;
  filler_bits_ = symbols_total_ * m - kept_total_;
}

std::vector<int> PASSystem::shape_amplitudes(std::span<const std::uint8_t> data) const {
  const int n = config_.shaping_length;
  std::vector<int> amplitudes;
  amplitudes.reserve(static_cast<std::size_t>(n) * config_.blocks_per_frame);
  for (int b = 0; b < config_.blocks_per_frame; ++b) {
    BigInt index = 0;
    for (int j = 0; j < input_bits_; ++j) {
      index <<= 1;
      index |= static_cast<unsigned>(data[static_cast<std::size_t>(b) * input_bits_ + j] & 1);
    }
    const auto block = ess_encode(*trellis_, index);
    amplitudes.insert(amplitudes.end(), block.begin(), block.end());
  }
  return amplitudes;
}

std::vector<double> PASSystem::modulate(const std::vector<int>& kept_bits) const {
  const int m = config_.m;
  std::vector<double> x(symbols_total_);
  for (std::size_t s = 0; s < symbols_total_; ++s) {
    const int sign = kept_bits[s * m];
    unsigned amp_bits = 0;
    for (int i = 1; i < m; ++i)
      amp_bits = (amp_bits << 1) | static_cast<unsigned>(kept_bits[s * m + i]);
    x[s] = labeling_.point_value(sign, labeling_.amp_index_from_bits(amp_bits));
  }
  return x;
}

PASSystem::FrameTrace PASSystem::trace(std::span<const std::uint8_t> data) const {
  if (data.size() != data_bits_)
    throw ParameterError("frame data length mismatch");
  FrameTrace out;
  const int m = config_.m;

  if (config_.scheme == "ess") {
    const auto amplitudes = shape_amplitudes(data);
    out.amplitude_bits.reserve(amplitudes.size() * (m - 1));
    for (int a : amplitudes) {
      const unsigned bits = labeling_.amplitude_bits(alphabet_.index_of(a));
      for (int i = m - 2; i >= 0; --i)
        out.amplitude_bits.push_back(static_cast<int>((bits >> i) & 1u));
    }
    std::span<const std::uint8_t> extra =
        data.subspan(static_cast<std::size_t>(config_.blocks_per_frame) * input_bits_);

    ConvEncoder enc;
    std::size_t amp_pos = 0, extra_pos = 0;
    const auto& slots = schedule_->slots();
    for (std::size_t t = 0; t < slots_total_; ++t) {
      int u = 0;
      bool presc_v1 = false, presc_v2 = false;
      if (t < slots_shaped_) {
        const SlotRole& role = slots[t % slots.size()];
        if (role.prescribe_v1) {
          u = select_input_for_v1(out.amplitude_bits[amp_pos++], enc.state());
          presc_v1 = true;
        } else if (role.prescribe_v2) {
          u = select_input_for_v2(out.amplitude_bits[amp_pos++], enc.state());
          presc_v2 = true;
        } else {
          u = extra[extra_pos++] & 1;
        }
      }
      const auto o = enc.step(u);
      out.selected_inputs.push_back(u);
      const int pp = static_cast<int>(t % pattern_.period());
      if (pattern_.keep_v1[pp]) {
        if (presc_v1)
          out.prescribed_positions.push_back(static_cast<int>(out.kept_bits.size()));
        out.kept_bits.push_back(o.v1);
      }
      if (pattern_.keep_v2[pp]) {
        if (presc_v2)
          out.prescribed_positions.push_back(static_cast<int>(out.kept_bits.size()));
        out.kept_bits.push_back(o.v2);
      }
    }
  } else {
    ConvEncoder enc;
    for (std::size_t t = 0; t < slots_total_; ++t) {
      const int u = t < data_bits_ ? (data[t] & 1) : 0;
      const auto o = enc.step(u);
      out.selected_inputs.push_back(u);
      const int pp = static_cast<int>(t % pattern_.period());
      if (pattern_.keep_v1[pp]) out.kept_bits.push_back(o.v1);
      if (pattern_.keep_v2[pp]) out.kept_bits.push_back(o.v2);
    }
  }
  out.kept_bits.resize(symbols_total_ * m, 0);  // filler for the last tail symbol
  return out;
}

std::vector<double> PASSystem::transmit(std::span<const std::uint8_t> data) const {
  return modulate(trace(data).kept_bits);
}

PASSystem::ReceiveResult PASSystem::receive(std::span<const double> y,
                                            double noise_var) const {
  if (y.size() != symbols_total_)
    throw ParameterError("received frame length mismatch");
  const int m = config_.m;
  // Termination symbols carry raw encoder output, not shaped
  // amplitudes; demap them with a uniform prior.
  const std::size_t body = config_.frame_symbols();
  auto llrs = llr_demap(y.first(body), noise_var, px_, labeling_);
  if (symbols_total_ > body) {
    const std::vector<double> uniform(labeling_.num_points(),
                                      1.0 / labeling_.num_points());
    const auto tail =
        llr_demap(y.subspan(body), noise_var, uniform, labeling_);
    llrs.insert(llrs.end(), tail.begin(), tail.end());
  }

  // Depuncture the kept-bit LLRs back onto the two mother branches.
  std::vector<double> l1(slots_total_, 0.0), l2(slots_total_, 0.0);
  std::size_t kidx = 0;
  for (std::size_t t = 0; t < slots_total_; ++t) {
    const int pp = static_cast<int>(t % pattern_.period());
    if (pattern_.keep_v1[pp]) l1[t] = llrs[kidx++];
    if (pattern_.keep_v2[pp]) l2[t] = llrs[kidx++];
  }

  const auto u_hat = viterbi_decode(l1, l2, config_.termination);

  ReceiveResult result;
  if (config_.scheme == "uniform") {
    result.data.assign(u_hat.begin(), u_hat.begin() + data_bits_);
    for (auto& b : result.data) b &= 1;
    return result;
  }

  // Re-run the encoder on the decoded inputs; prescribed output
  // positions reproduce the amplitude bits, free slots the extra data.
  ConvEncoder enc;
  std::vector<int> amp_bits;
  amp_bits.reserve(static_cast<std::size_t>(config_.frame_symbols()) * (m - 1));
  std::vector<std::uint8_t> extra_bits;
  const auto& slots = schedule_->slots();
  for (std::size_t t = 0; t < slots_shaped_; ++t) {
    const SlotRole& role = slots[t % slots.size()];
    const int u = u_hat[t];
    const auto o = enc.step(u);
    if (role.prescribe_v1)
      amp_bits.push_back(o.v1);
    else if (role.prescribe_v2)
      amp_bits.push_back(o.v2);
    else
      extra_bits.push_back(static_cast<std::uint8_t>(u));
  }

  result.data.assign(data_bits_, 0);
  const int n = config_.shaping_length;
  std::vector<int> block(n);
  for (int b = 0; b < config_.blocks_per_frame; ++b) {
    for (int j = 0; j < n; ++j) {
      unsigned bits = 0;
      const std::size_t sym = static_cast<std::size_t>(b) * n + j;
      for (int i = 0; i < m - 1; ++i)
        bits = (bits << 1) |
               static_cast<unsigned>(amp_bits[sym * (m - 1) + i]);
      block[j] = alphabet_.amplitude(labeling_.amp_index_from_bits(bits));
    }
    try {
      BigInt index = ess_decode(*trellis_, block);
      if (bit_length(index) > static_cast<std::size_t>(input_bits_)) {
        result.valid = false;
        continue;
      }
      for (int j = input_bits_ - 1; j >= 0; --j) {
        result.data[static_cast<std::size_t>(b) * input_bits_ + j] =
            static_cast<std::uint8_t>(index & 1);
        index >>= 1;
      }
    } catch (const InvalidSequenceError&) {
      result.valid = false;  // decoded block left the sphere
    }
  }
  std::copy(extra_bits.begin(), extra_bits.end(),
            result.data.begin() +
                static_cast<std::size_t>(config_.blocks_per_frame) * input_bits_);
  return result;
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963985;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

// One frame end to end; returns true on a frame error.
bool run_frame(const PASSystem& sys, double noise_var, std::uint64_t seed,
               std::uint64_t frame_index) {
  Rng rng(Rng::stream_seed(seed, frame_index));
  std::vector<std::uint8_t> data(sys.data_bits_per_frame());
  for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_bit());
  const auto x = sys.transmit(data);
  const auto y = awgn_add(x, noise_var, rng);
  const auto res = sys.receive(y, noise_var);
  return !res.valid || res.data != data;
}

}  // namespace

std::vector<FerPoint> fer_sim(const PASConfig& config, const FerOptions& options,
                              std::ostream* progress) {
  const PASSystem sys(config);
  constexpr std::uint64_t kBatch = 256;

  std::vector<FerPoint> points;
  for (double snr_db : options.snr_db) {
    const double noise_var =
        sys.expected_symbol_energy() / std::pow(10.0, snr_db / 10.0);
    std::uint64_t frames = 0, errors = 0;
    while (frames < options.max_frames && errors < options.target_errors) {
      const std::uint64_t batch = std::min(kBatch, options.max_frames - frames);
      std::vector<std::uint8_t> err(batch, 0);
      if (config.threads <= 1) {
        for (std::uint64_t i = 0; i < batch; ++i)
          err[i] = run_frame(sys, noise_var, config.seed, frames + i);
      } else {
        std::vector<std::thread> pool;
        const int workers = config.threads;
        for (int w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < batch; i += workers)
              err[i] = run_frame(sys, noise_var, config.seed, frames + i);
          });
        }
        for (auto& th : pool) th.join();
      }
      for (std::uint64_t i = 0; i < batch; ++i) errors += err[i];
      frames += batch;
    }
    FerPoint p;
    p.snr_db = snr_db;
    p.frames = frames;
    p.frame_errors = errors;
    p.fer = frames ? static_cast<double>(errors) / frames : 0.0;
    std::tie(p.ci_low, p.ci_high) = wilson_interval(errors, frames);
    points.push_back(p);
    if (progress)
      *progress << "snr " << snr_db << " dB: " << errors << "/" << frames
                << " frame errors (fer " << p.fer << ")\n";
  }
  return points;
}

}  // namespace ess

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ess/alphabet.hpp"
#include "ess/trellis.hpp"

namespace ess {

// Maxwell-Boltzmann distribution over an amplitude alphabet:
// P(a) proportional to exp(-lambda * a^2).
struct MBDistribution {
  double lambda = 0.0;
  std::vector<double> pmf;
  double entropy_bits = 0.0;
  double mean_energy = 0.0;  // per symbol
};

MBDistribution mb_pmf(const AmplitudeAlphabet& alphabet, double lambda);

// Fit lambda so the distribution hits a target per-symbol energy or
// entropy (both strictly decreasing in lambda). Bisection to 1e-10.
double mb_fit_energy(const AmplitudeAlphabet& alphabet, double target_energy);
double mb_fit_entropy(const AmplitudeAlphabet& alphabet, double target_entropy);

// Entropy shortfall of a shaping code against the energy-matched
// Maxwell-Boltzmann distribution; never negative.
double rate_loss(double rate, double per_symbol_energy,
                 const AmplitudeAlphabet& alphabet);

// Energy reduction of shaping versus uniform signaling of the same rate.
double shaping_gain_db(double rate, double avg_sequence_energy, int block_length);

// Upper bound on the rate loss caused by a bounded-precision trellis.
double bp_rate_loss_bound(int mantissa_bits);

enum class ShapingMethod { ess, laroia1, shell_mapping };

struct ComplexityBounds {
  double bit_ops_per_dim = 0.0;
  std::uint64_t storage_bits = 0;
};

// Closed-form arithmetic/storage bounds per shaping method.
ComplexityBounds complexity_bounds(ShapingMethod method, int block_length,
                                   double rate, int levels, int alphabet_size,
                                   const Precision& precision);

// Achievable rate of a bit-metric decoder for the given channel-input
// pmf (over the signed constellation) at the given SNR, in bit/1-D.
double rbmd(double snr_db, std::span<const double> px, const GrayLabeling& labeling);

// SNR (dB) at which rbmd reaches the target rate; bisection to 1e-4 bits.
double snr_at_rate(std::span<const double> px, const GrayLabeling& labeling,
                   double target_rate);

// SNR (dB) at which the AWGN capacity equals the target rate.
double awgn_capacity_snr_db(double target_rate);

// Channel-input pmf of a sign-symmetric constellation shaped by an
// amplitude pmf: P(x) = P(|x|) / 2.
std::vector<double> px_from_amplitude_pmf(std::span<const double> pa);

struct WachsmannPoint {
  double hx = 0.0;            // channel input entropy H(X)
  double delta_snr_db = 0.0;  // gap to capacity (capped when unbounded)
  double code_rate = 0.0;     // (m + Rt - H(X)) / m
  double gamma = 0.0;         // m * Rc - (m - 1)
  bool unbounded = false;     // target rate unreachable at this shaping
};

// Gap-to-capacity sweep over a grid of channel-input entropies for
// 2^m-ASK at a fixed target rate.
std::vector<WachsmannPoint> wachsmann_sweep(int m, double target_rate,
                                            std::span<const double> hx_grid);

// Rate losses of the three shaping architectures at one block length,
// each sized to hold at least 2^(n * rate) sequences. Infeasible
// architectures come back empty.
struct RateLossPoint {
  int block_length = 0;
  std::optional<double> sphere;
  std::optional<double> shell;
  std::optional<double> cc;
};
RateLossPoint rate_loss_point(const AmplitudeAlphabet& alphabet, int block_length,
                              double target_rate);

}  // namespace ess

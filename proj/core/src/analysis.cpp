#include "ess/analysis.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ess/codecs.hpp"
#include "ess/errors.hpp"

namespace ess {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double entropy_bits(std::span<const double> pmf) {
  double h = 0.0;
  for (double p : pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

std::uint64_t ceil_with_tolerance(double x) {
  const double r = std::round(x);
  if (std::fabs(x - r) < 1e-9) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace

MBDistribution mb_pmf(const AmplitudeAlphabet& alphabet, double lambda) {
  if (lambda < 0.0) throw ParameterError("lambda must be non-negative");
  MBDistribution d;
  d.lambda = lambda;
  d.pmf.resize(alphabet.size());
  // Shift by the smallest energy so large lambda cannot underflow to an
  // all-zero weight vector.
  double total = 0.0;
  for (int i = 0; i < alphabet.size(); ++i) {
    const double a2 = static_cast<double>(alphabet.amplitude(i)) * alphabet.amplitude(i);
    d.pmf[i] = std::exp(-lambda * (a2 - 1.0));
    total += d.pmf[i];
  }
  for (double& p : d.pmf) p /= total;
  d.entropy_bits = entropy_bits(d.pmf);
  for (int i = 0; i < alphabet.size(); ++i)
    d.mean_energy += d.pmf[i] * alphabet.amplitude(i) * alphabet.amplitude(i);
  return d;
}

namespace {

template <typename F>
double bisect_lambda(F&& value_at, double target, double at_zero) {
  // value_at is strictly decreasing in lambda and equals at_zero at 0.
  if (target > at_zero + 1e-12) throw ParameterError("target above the uniform value");
  if (target >= at_zero) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (value_at(hi) > target) {
    hi *= 2.0;
    if (hi > 1e6) throw ParameterError("target out of reach");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) > target)
      lo = mid;
    else
      hi = mid;
    if (std::fabs(value_at(mid) - target) <= 1e-10) return mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double mb_fit_energy(const AmplitudeAlphabet& alphabet, double target_energy) {
  double uniform = 0.0;
  for (int a : alphabet.amplitudes()) uniform += static_cast<double>(a) * a;
  uniform /= alphabet.size();
  if (target_energy <= 1.0)
    throw ParameterError("target energy at or below the minimum amplitude energy");
  return bisect_lambda(
      [&](double l) { return mb_pmf(alphabet, l).mean_energy; }, target_energy,
      uniform);
}

double mb_fit_entropy(const AmplitudeAlphabet& alphabet, double target_entropy) {
  if (target_entropy <= 0.0) throw ParameterError("target entropy must be positive");
  return bisect_lambda(
      [&](double l) { return mb_pmf(alphabet, l).entropy_bits; }, target_entropy,
      std::log2(static_cast<double>(alphabet.size())));
}

double rate_loss(double rate, double per_symbol_energy,
                 const AmplitudeAlphabet& alphabet) {
  const double lambda = mb_fit_energy(alphabet, per_symbol_energy);
  double loss = mb_pmf(alphabet, lambda).entropy_bits - rate;
  if (loss < 0.0 && loss > -1e-9) loss = 0.0;
  return loss;
}

double shaping_gain_db(double rate, double avg_sequence_energy, int block_length) {
  if (avg_sequence_energy <= 0.0) throw ParameterError("energy must be positive");
  const double uniform_energy = (std::exp2(2.0 * (rate + 1.0)) - 1.0) / 3.0;
  return 10.0 * std::log10(uniform_energy /
                           (avg_sequence_energy / block_length));
}

double bp_rate_loss_bound(int mantissa_bits) {
  if (mantissa_bits < 2) throw ParameterError("mantissa must have at least 2 bits");
  return -std::log2(1.0 - std::exp2(1.0 - mantissa_bits));
}

ComplexityBounds complexity_bounds(ShapingMethod method, int block_length,
                                   double rate, int levels, int alphabet_size,
                                   const Precision& precision) {
  ComplexityBounds b;
  const double width =
      static_cast<double>(ceil_with_tolerance(block_length * rate));
  const bool bounded = precision.is_bounded();
  const double nm = bounded ? precision.mantissa_bits : 0.0;
  switch (method) {
    case ShapingMethod::ess:
      b.bit_ops_per_dim = bounded ? nm * (alphabet_size - 1)
                                  : (alphabet_size - 1) * width;
      b.storage_bits = storage_bound_bits(block_length, levels, rate, precision);
      break;
    case ShapingMethod::laroia1:
      // Enumerative cost plus the shell search: L-1 extra operations per
      // block on the same word width.
      b.bit_ops_per_dim =
          (bounded ? nm * (alphabet_size - 1) : (alphabet_size - 1) * width) +
          (bounded ? nm : width) * (levels - 1) / block_length;
      b.storage_bits = storage_bound_bits(block_length, levels, rate, precision);
      break;
    case ShapingMethod::shell_mapping:
      b.bit_ops_per_dim = bounded ? nm * nm * levels : width * width * levels;
      b.storage_bits =
          storage_bound_bits(block_length, levels, rate, precision, true);
      break;
  }
  return b;
}

std::vector<double> px_from_amplitude_pmf(std::span<const double> pa) {
  const int half = static_cast<int>(pa.size());
  std::vector<double> px(2 * half);
  for (int t = 0; t < half; ++t) {
    px[half - 1 - t] = pa[t] / 2.0;  // -a
    px[half + t] = pa[t] / 2.0;      // +a
  }
  return px;
}

double rbmd(double snr_db, std::span<const double> px, const GrayLabeling& labeling) {
  const int m = labeling.bits_per_symbol();
  const int points = labeling.num_points();
  if (static_cast<int>(px.size()) != points)
    throw ParameterError("pmf size does not match the constellation");

  double es = 0.0;
  for (int j = 0; j < points; ++j)
    es += px[j] * labeling.point(j) * labeling.point(j);
  const double noise_var = es / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_var);
  const double hx = entropy_bits(px);

  const double log_norm = -0.5 * std::log(2.0 * M_PI * noise_var);
  std::vector<double> logw(points), p0(m);

  auto integrand = [&](double y) {
    double max_l = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < points; ++j) {
      const double d = y - labeling.point(j);
      logw[j] = px[j] > 0.0
                    ? std::log(px[j]) - d * d / (2.0 * noise_var)
                    : -std::numeric_limits<double>::infinity();
      max_l = std::max(max_l, logw[j]);
    }
    if (!std::isfinite(max_l)) return 0.0;
    double total = 0.0;
    std::fill(p0.begin(), p0.end(), 0.0);
    for (int j = 0; j < points; ++j) {
      const double w = std::exp(logw[j] - max_l);
      total += w;
      for (int i = 0; i < m; ++i)
        if (labeling.bit(j, i) == 0) p0[i] += w;
    }
    double cond_entropy = 0.0;
    for (int i = 0; i < m; ++i) {
      const double p = p0[i] / total;
      if (p > 0.0 && p < 1.0)
        cond_entropy -= p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p);
    }
    const double fy = std::exp(max_l + std::log(total) + log_norm);
    return fy * cond_entropy;
  };

  const double lo = labeling.point(0) - 8.0 * sigma;
  const double hi = labeling.point(points - 1) + 8.0 * sigma;
  double error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          integrand, lo, hi, 15, 1e-9, &error);
  if (error > 1e-6)
    throw std::runtime_error("bit-metric rate integration did not converge");
  return std::max(0.0, hx - integral);
}

double awgn_capacity_snr_db(double target_rate) {
  if (target_rate <= 0.0) throw ParameterError("rate must be positive");
  return 10.0 * std::log10(std::exp2(2.0 * target_rate) - 1.0);
}

double snr_at_rate(std::span<const double> px, const GrayLabeling& labeling,
                   double target_rate) {
  if (target_rate <= 0.0) throw ParameterError("rate must be positive");
  if (target_rate >= entropy_bits(px) - 1e-12)
    throw ParameterError("target rate at or above the input entropy");
  double lo = -40.0, hi = 60.0;
  if (rbmd(hi, px, labeling) < target_rate)
    throw ParameterError("target rate unreachable below 60 dB");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = rbmd(mid, px, labeling);
    if (std::fabs(r - target_rate) <= 1e-4) return mid;
    if (r < target_rate)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<WachsmannPoint> wachsmann_sweep(int m, double target_rate,
                                            std::span<const double> hx_grid) {
  const AmplitudeAlphabet alphabet(m);
  const GrayLabeling labeling(alphabet);
  const double cap_snr = awgn_capacity_snr_db(target_rate);
  constexpr double kCapDb = 40.0;

  std::vector<WachsmannPoint> out;
  out.reserve(hx_grid.size());
  for (double hx : hx_grid) {
    if (hx <= target_rate || hx > m + 1e-12)
      throw ParameterError("entropy grid must lie in (Rt, m]");
    WachsmannPoint p;
    p.hx = hx;
    p.code_rate = (m + target_rate - hx) / m;
    p.gamma = m * p.code_rate - (m - 1);
    const double lambda = mb_fit_entropy(alphabet, hx - 1.0);
    const auto px = px_from_amplitude_pmf(mb_pmf(alphabet, lambda).pmf);
    try {
      p.delta_snr_db = snr_at_rate(px, labeling, target_rate) - cap_snr;
      if (p.delta_snr_db > kCapDb) {
        p.delta_snr_db = kCapDb;
        p.unbounded = true;
      }
    } catch (const ParameterError&) {
      p.delta_snr_db = kCapDb;
      p.unbounded = true;
    }
    out.push_back(p);
  }
  return out;
}

RateLossPoint rate_loss_point(const AmplitudeAlphabet& alphabet, int block_length,
                              double target_rate) {
  RateLossPoint point;
  point.block_length = block_length;
  const double target_log2 = target_rate * block_length;
  const long long amax2 = static_cast<long long>(alphabet.max_amplitude()) *
                          alphabet.max_amplitude();

  auto reaches = [&](const BigInt& count) {
    return !count.is_zero() && log2_big(count) >= target_log2 - 1e-9;
  };

  // Sphere: smallest energy bound whose ball is big enough.
  {
    const int max_levels =
        static_cast<int>((amax2 * block_length - block_length) / 8) + 1;
    int lo = 1, hi = max_levels;
    if (reaches(EnergyTrellis::build(alphabet, block_length,
                                     block_length + 8ll * (hi - 1))
                    .sequence_count())) {
      while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        const auto t = EnergyTrellis::build(alphabet, block_length,
                                            block_length + 8ll * (mid - 1));
        if (reaches(t.sequence_count()))
          hi = mid;
        else
          lo = mid + 1;
      }
      const auto t = EnergyTrellis::build(alphabet, block_length,
                                          block_length + 8ll * (lo - 1));
      const double rs = log2_big(t.sequence_count()) / block_length;
      point.sphere = rate_loss(rs, t.average_energy() / block_length, alphabet);
    }
  }

  // Single shell: smallest radius whose surface alone is big enough.
  {
    const auto fwd =
        ForwardTrellis::build(alphabet, block_length, amax2 * block_length);
    for (int l = 0; l < fwd.levels(); ++l) {
      const BigInt& g = fwd.shell_count(l);
      if (reaches(g)) {
        const double rs = log2_big(g) / block_length;
        const double energy = static_cast<double>(block_length + 8ll * l);
        point.shell = rate_loss(rs, energy / block_length, alphabet);
        break;
      }
    }
  }

  // Constant composition: most energy-efficient composition of that size.
  try {
    const auto comp = find_cc_composition_rate(alphabet, block_length, target_rate);
    point.cc = rate_loss(cc_rate(comp),
                         static_cast<double>(comp.sequence_energy()) / block_length,
                         alphabet);
  } catch (const ParameterError&) {
    // infeasible at this block length
  }
  return point;
}

}  // namespace ess

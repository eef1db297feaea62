#include <benchmark/benchmark.h>

#include <vector>

#include "ess/analysis.hpp"
#include "ess/codecs.hpp"
#include "ess/pas.hpp"
#include "ess/rng.hpp"
#include "ess/trellis.hpp"

namespace {

const ess::AmplitudeAlphabet& alphabet8() {
  static const ess::AmplitudeAlphabet a(3);
  return a;
}

void BM_build_trellis_full(benchmark::State& state) {
  for (auto _ : state) {
    auto t = ess::EnergyTrellis::build(alphabet8(), 96, 1120);
    benchmark::DoNotOptimize(t.sequence_count());
  }
}
BENCHMARK(BM_build_trellis_full);

void BM_build_trellis_bounded(benchmark::State& state) {
  for (auto _ : state) {
    auto t = ess::EnergyTrellis::build(alphabet8(), 96, 1120,
                                       ess::Precision::bounded(12, 8));
    benchmark::DoNotOptimize(t.sequence_count());
  }
}
BENCHMARK(BM_build_trellis_bounded);

void BM_ess_roundtrip(benchmark::State& state) {
  const auto trellis = ess::EnergyTrellis::build(
      alphabet8(), 96, 1120,
      state.range(0) ? ess::Precision::bounded(12, 8) : ess::Precision::full());
  ess::Rng rng(1);
  ess::BigInt index = 0;
  for (int i = 0; i < 3; ++i) {
    index <<= 56;
    index |= rng.next_u64() >> 8;
  }
  for (auto _ : state) {
    const auto seq = ess::ess_encode(trellis, index);
    benchmark::DoNotOptimize(ess::ess_decode(trellis, seq));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ess_roundtrip)->Arg(0)->Arg(1);

void BM_cc_roundtrip(benchmark::State& state) {
  const ess::Composition comp(alphabet8(), {37, 30, 19, 10});
  ess::BigInt index = ess::multinomial(comp) / 3;
  for (auto _ : state) {
    const auto seq = ess::cc_encode(comp, index);
    benchmark::DoNotOptimize(ess::cc_decode(comp, seq));
  }
}
BENCHMARK(BM_cc_roundtrip);

void BM_rbmd_quadrature(benchmark::State& state) {
  const ess::GrayLabeling labeling(alphabet8());
  const std::vector<double> uniform(8, 0.125);
  for (auto _ : state)
    benchmark::DoNotOptimize(ess::rbmd(10.0, uniform, labeling));
}
BENCHMARK(BM_rbmd_quadrature);

void BM_pas_frame(benchmark::State& state) {
  ess::PASConfig cfg;
  cfg.scheme = "ess";
  cfg.m = 3;
  cfg.shaping_length = 96;
  cfg.max_energy = 1120;
  cfg.blocks_per_frame = 8;
  cfg.code_rate_num = 5;
  cfg.code_rate_den = 6;
  const ess::PASSystem sys(cfg);
  const double noise_var = sys.expected_symbol_energy() / 50.0;  // ~17 dB

  ess::Rng rng(2);
  std::vector<std::uint8_t> data(sys.data_bits_per_frame());
  for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_bit());

  for (auto _ : state) {
    const auto x = sys.transmit(data);
    const auto y = ess::awgn_add(x, noise_var, rng);
    benchmark::DoNotOptimize(sys.receive(y, noise_var));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_pas_frame);

}  // namespace

BENCHMARK_MAIN();

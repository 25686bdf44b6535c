#include <benchmark/benchmark.h>

#include "qkdlab/handshake.hpp"
#include "qkdlab/privacy_amplification.hpp"
#include "qkdlab/protocols.hpp"
#include "qkdlab/reconciliation.hpp"

using namespace qkdlab;

namespace {

Bits random_bits(std::size_t n, RandomStream& rng) {
  Bits b(n);
  for (auto& x : b) x = rng.bit();
  return b;
}

void BM_Exchange(benchmark::State& state, Protocol protocol) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  for (auto _ : state) {
    channel::ClassicalChannel ch;
    auto record = protocols::exchange(protocol, n, channel::ChannelConfig::ideal(), channel::EveStrategy::none(), rng);
    benchmark::DoNotOptimize(protocols::sift(record, ch, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Exchange, bb84, Protocol::BB84)->Arg(20000)->Arg(100000);
BENCHMARK_CAPTURE(BM_Exchange, sarg04, Protocol::SARG04)->Arg(20000)->Arg(100000);

void BM_Cascade(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(2);
  const auto a = random_bits(n, rng);
  auto b = a;
  for (auto& x : b) x ^= static_cast<std::uint8_t>(rng.bernoulli(0.05));
  for (auto _ : state) {
    channel::ClassicalChannel ch;
    benchmark::DoNotOptimize(post::cascade_reconcile(a, b, 0.05, ch, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cascade)->Arg(1000)->Arg(10000);

void BM_Winnow(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(3);
  const auto a = random_bits(n, rng);
  auto b = a;
  for (auto& x : b) x ^= static_cast<std::uint8_t>(rng.bernoulli(0.02));
  for (auto _ : state) {
    channel::ClassicalChannel ch;
    benchmark::DoNotOptimize(post::winnow_reconcile(a, b, ch, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Winnow)->Arg(10000);

void BM_Toeplitz(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = n / 2;
  RandomStream rng(4);
  const auto key = random_bits(n, rng);
  const auto seed = random_bits(n + m - 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(post::toeplitz_hash(key, seed, m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Toeplitz)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_StandardHandshake(benchmark::State& state) {
  RandomStream rng(5);
  const auto pmk = handshake::random_pmk(rng);
  for (auto _ : state) {
    channel::ClassicalChannel ch;
    benchmark::DoNotOptimize(handshake::run_standard_handshake(pmk, pmk, ch, rng));
  }
}
BENCHMARK(BM_StandardHandshake);

void BM_QuantumHandshake(benchmark::State& state) {
  RandomStream rng(6);
  const auto pmk = handshake::random_pmk(rng);
  QkdParams params;
  params.n_pulses = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    channel::ClassicalChannel ch;
    benchmark::DoNotOptimize(handshake::run_quantum_handshake(pmk, pmk, params, channel::ChannelConfig::ideal(),
                                                              channel::EveStrategy::none(), ch, rng));
  }
}
BENCHMARK(BM_QuantumHandshake)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();

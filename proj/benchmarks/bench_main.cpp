#include <benchmark/benchmark.h>

#include "meshqos/pdu.hpp"
#include "meshqos/radio.hpp"
#include "meshqos/scenario.hpp"
#include "meshqos/simulator.hpp"

namespace {

void BM_encode_network_pdu(benchmark::State& state) {
  meshqos::NetworkPdu pdu;
  pdu.src = 0x0012;
  pdu.dst = 0xC004;
  pdu.ttl = 7;
  pdu.seq = 0x1234;
  pdu.priority = 2;
  pdu.payload = {0x01, 0x02, 0x03, 0x04};
  for (auto _ : state) {
    benchmark::DoNotOptimize(meshqos::encode_network_pdu(pdu));
  }
}
BENCHMARK(BM_encode_network_pdu);

void BM_decode_network_pdu(benchmark::State& state) {
  meshqos::NetworkPdu pdu;
  pdu.src = 0x0012;
  pdu.dst = 0xC004;
  pdu.ttl = 7;
  pdu.seq = 0x1234;
  pdu.priority = 2;
  pdu.payload = {0x01, 0x02, 0x03, 0x04};
  const std::vector<std::uint8_t> bytes = meshqos::encode_network_pdu(pdu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(meshqos::decode_network_pdu(bytes));
  }
}
BENCHMARK(BM_decode_network_pdu);

void BM_link_rssi(benchmark::State& state) {
  const meshqos::RadioModel model;
  const meshqos::Position a{0.0, 0.0};
  const meshqos::Position b{17.0, 23.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(meshqos::link_rssi(model, a, b, 4.0));
  }
}
BENCHMARK(BM_link_rssi);

void BM_grid_simulation(benchmark::State& state) {
  meshqos::Scenario scenario = meshqos::experiment1();
  for (meshqos::TrafficFlow& flow : scenario.flows) {
    flow.packets = static_cast<int>(state.range(0));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(meshqos::run_simulation(scenario, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_grid_simulation)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

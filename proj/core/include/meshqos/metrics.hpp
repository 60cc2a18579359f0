#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meshqos/errors.hpp"

namespace meshqos {

// One row of the result dataset: the fate of a single originated packet
// at its flow's destination.
struct PacketRecord {
  std::int64_t timestamp_ms = 0;   // origination time, ms since run start
  int test_id = 0;                 // 1-based flow index
  std::int64_t packet_id = 0;      // 0-based origination index within flow
  std::uint16_t sender = 0;        // originating element address
  std::uint16_t receiver = 0;      // destination address of the pdu
  int ttl = 0;                     // initial ttl
  int tx_power_dbm = 0;            // power class used at origination
  int priority = 0;                // priority class
  bool delivered = false;
  int number_of_hops = 0;          // relays traversed by the first copy
  std::optional<std::int64_t> pdt_ms;  // delivery time, set iff delivered

  bool operator==(const PacketRecord&) const = default;
};

// Per-priority key performance indicators. Latency statistics cover
// delivered packets only; pdt_std is the population standard deviation.
struct KpiRow {
  int total = 0;
  int delivered = 0;
  double pdr = 0.0;
  std::optional<double> hops_avg;
  std::optional<double> pdt_avg_ms;
  std::optional<double> pdt_std_ms;
  std::optional<std::int64_t> pdt_min_ms;
  std::optional<std::int64_t> pdt_max_ms;

  bool operator==(const KpiRow&) const = default;
};

using KpiTable = std::map<int, KpiRow>;         // priority -> KPIs
using KpiReport = std::map<int, KpiTable>;      // test id -> table

// Number of relays a delivered packet traversed. Throws Error when
// ttl_at_delivery exceeds the initial ttl or either value is negative.
int hops_from_ttl(int initial_ttl, int ttl_at_delivery);

// KPIs over one group of records, keyed by priority class. Throws Error
// on an empty span.
KpiTable compute_kpis(std::span<const PacketRecord> records);

// Tables for every test id present, in test id order.
KpiReport compute_kpi_report(std::span<const PacketRecord> records);

// Empirical CDF of the samples: strictly increasing values with the
// cumulative fraction at each, ending at exactly 1. Duplicates collapse
// onto the upper step. Empty input yields an empty curve.
std::vector<std::pair<std::int64_t, double>> ecdf(
    std::vector<std::int64_t> samples_ms);

// Dataset CSV header, fixed byte-for-byte.
extern const char kDatasetHeader[];

// Writes records as CSV under the fixed header. Delivered flags render
// as 0/1, addresses as 0x-prefixed hex, and PDT is empty for undelivered
// rows (their Timestamp column is the origination time; delivered rows
// carry origination + PDT, i.e. the reception time). Throws Error when
// the file cannot be written.
void export_dataset(std::span<const PacketRecord> records,
                    const std::filesystem::path& path);
std::string dataset_to_csv(std::span<const PacketRecord> records);

// Exact inverse of export_dataset. Throws DatasetError naming the column
// on a header mismatch and describing the row on malformed data.
std::vector<PacketRecord> import_dataset(const std::filesystem::path& path);
std::vector<PacketRecord> dataset_from_csv(const std::string& csv);

// KPI report rendered as JSON (stable key order, two-space indent,
// trailing newline) and a fixed-width text table for terminals.
std::string kpi_report_json(const KpiReport& report);
std::string kpi_report_text(const KpiReport& report);

// Two-column "pdt_ms,fraction" CSV for one eCDF curve.
std::string ecdf_to_csv(const std::vector<std::pair<std::int64_t, double>>& curve);

}  // namespace meshqos

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meshqos/errors.hpp"
#include "meshqos/metrics.hpp"

using namespace meshqos;

namespace {

PacketRecord make_record(int priority, bool delivered, std::int64_t pdt_ms,
                         int hops, std::int64_t packet_id) {
  PacketRecord r;
  r.timestamp_ms = packet_id * 1000;
  r.test_id = 1;
  r.packet_id = packet_id;
  r.sender = 0x0091;
  r.receiver = 0xC001;
  r.ttl = 7;
  r.tx_power_dbm = 4;
  r.priority = priority;
  r.delivered = delivered;
  r.number_of_hops = delivered ? hops : 0;
  if (delivered) r.pdt_ms = pdt_ms;
  return r;
}

}  // namespace

TEST_CASE("hops derive from the ttl spent in flight") {
  CHECK(hops_from_ttl(7, 7) == 0);
  CHECK(hops_from_ttl(7, 6) == 1);
  CHECK(hops_from_ttl(3, 1) == 2);
  CHECK_THROWS_AS(hops_from_ttl(3, 4), Error);
  CHECK_THROWS_AS(hops_from_ttl(-1, -1), Error);
}

TEST_CASE("kpis over a hand-checked record set") {
  std::vector<PacketRecord> records;
  records.push_back(make_record(1, true, 10, 1, 0));
  records.push_back(make_record(1, true, 20, 2, 1));
  records.push_back(make_record(1, false, 0, 0, 2));
  records.push_back(make_record(3, false, 0, 0, 3));

  const KpiTable table = compute_kpis(records);
  REQUIRE(table.size() == 2);

  const KpiRow& p1 = table.at(1);
  CHECK(p1.total == 3);
  CHECK(p1.delivered == 2);
  CHECK(p1.pdr == doctest::Approx(2.0 / 3.0));
  CHECK(p1.hops_avg == doctest::Approx(1.5));
  CHECK(p1.pdt_avg_ms == doctest::Approx(15.0));
  // Population standard deviation: sqrt(((10-15)^2 + (20-15)^2) / 2).
  CHECK(p1.pdt_std_ms == doctest::Approx(5.0));
  CHECK(p1.pdt_min_ms == 10);
  CHECK(p1.pdt_max_ms == 20);

  const KpiRow& p3 = table.at(3);
  CHECK(p3.total == 1);
  CHECK(p3.delivered == 0);
  CHECK(p3.pdr == 0.0);
  CHECK_FALSE(p3.hops_avg.has_value());
  CHECK_FALSE(p3.pdt_avg_ms.has_value());
  CHECK_FALSE(p3.pdt_std_ms.has_value());
  CHECK_FALSE(p3.pdt_min_ms.has_value());
  CHECK_FALSE(p3.pdt_max_ms.has_value());

  CHECK_THROWS_AS(compute_kpis({}), Error);
}

TEST_CASE("report groups by test id") {
  std::vector<PacketRecord> records;
  records.push_back(make_record(1, true, 10, 1, 0));
  PacketRecord second_test = make_record(2, true, 30, 2, 0);
  second_test.test_id = 2;
  records.push_back(second_test);

  const KpiReport report = compute_kpi_report(records);
  REQUIRE(report.size() == 2);
  CHECK(report.at(1).at(1).delivered == 1);
  CHECK(report.at(2).at(2).pdt_avg_ms == doctest::Approx(30.0));

  CHECK(compute_kpi_report({}).empty());
}

TEST_CASE("ecdf steps through the sorted samples") {
  const auto curve = ecdf({5, 3, 3, 8});
  REQUIRE(curve.size() == 3);
  CHECK(curve[0] == std::pair<std::int64_t, double>{3, 0.5});
  CHECK(curve[1] == std::pair<std::int64_t, double>{5, 0.75});
  CHECK(curve[2] == std::pair<std::int64_t, double>{8, 1.0});

  CHECK(ecdf({}).empty());

  const auto single = ecdf({42});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == std::pair<std::int64_t, double>{42, 1.0});

  // Monotone and capped at one, whatever goes in.
  const auto big = ecdf({9, 1, 1, 1, 7, 7, 2, 0, 0, 4});
  double last = 0.0;
  for (const auto& [value, fraction] : big) {
    CHECK(fraction > last);
    last = fraction;
  }
  CHECK(last == 1.0);
}

TEST_CASE("dataset header spells the columns exactly") {
  CHECK(std::string(kDatasetHeader) ==
        "Timestamp (ms),Test Id,Packet Id,Sender Address,Receiver Address,"
        "TTL,Tx Power (dBm),Priority Class,Delivered,Number of hops,"
        "PDT (ms)");
}

TEST_CASE("csv round-trips records exactly") {
  std::vector<PacketRecord> records;
  records.push_back(make_record(1, true, 10, 1, 0));
  records.push_back(make_record(2, false, 0, 0, 1));
  records.push_back(make_record(3, true, 1234, 2, 2));

  const std::string csv = dataset_to_csv(records);
  const std::vector<std::string> lines = [&] {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < csv.size()) {
      const std::size_t nl = csv.find('\n', start);
      out.push_back(csv.substr(start, nl - start));
      start = nl + 1;
    }
    return out;
  }();

  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == kDatasetHeader);
  // Delivered rows stamp reception time (origination + pdt).
  CHECK(lines[1] == "10,1,0,0x0091,0xC001,7,4,1,1,1,10");
  // Undelivered rows keep the origination stamp and an empty pdt.
  CHECK(lines[2] == "1000,1,1,0x0091,0xC001,7,4,2,0,0,");
  CHECK(lines[3] == "3234,1,2,0x0091,0xC001,7,4,3,1,2,1234");

  CHECK(dataset_from_csv(csv) == records);
}

TEST_CASE("csv export and import through a file") {
  std::vector<PacketRecord> records;
  for (int i = 0; i < 50; ++i) {
    records.push_back(make_record(1 + i % 3, i % 4 != 0, 10 + i, i % 3, i));
  }
  const auto path =
      std::filesystem::temp_directory_path() / "meshqos_metrics_rt.csv";
  export_dataset(records, path);
  CHECK(import_dataset(path) == records);
  std::filesystem::remove(path);
}

TEST_CASE("malformed datasets are rejected with the offending detail") {
  const std::string good_header(kDatasetHeader);

  CHECK_THROWS_AS(dataset_from_csv(""), DatasetError);

  CHECK_THROWS_WITH_AS(
      dataset_from_csv("Timestamp (ms),Test Id\n"),
      doctest::Contains("Packet Id"), DatasetError);

  // Field count mismatch.
  CHECK_THROWS_AS(dataset_from_csv(good_header + "\n1,2,3\n"), DatasetError);

  // Delivered flag outside 0/1.
  CHECK_THROWS_AS(
      dataset_from_csv(good_header + "\n0,1,0,0x0001,0xC000,3,4,1,2,0,\n"),
      DatasetError);

  // Delivered row without a pdt.
  CHECK_THROWS_AS(
      dataset_from_csv(good_header + "\n0,1,0,0x0001,0xC000,3,4,1,1,0,\n"),
      DatasetError);

  // Undelivered row with a pdt.
  CHECK_THROWS_AS(
      dataset_from_csv(good_header + "\n5,1,0,0x0001,0xC000,3,4,1,0,0,5\n"),
      DatasetError);

  // Addresses must be 0x-prefixed 16-bit hex.
  CHECK_THROWS_AS(
      dataset_from_csv(good_header + "\n0,1,0,145,0xC000,3,4,1,0,0,\n"),
      DatasetError);

  // Numbers must parse fully.
  CHECK_THROWS_AS(
      dataset_from_csv(good_header + "\n0,x,0,0x0001,0xC000,3,4,1,0,0,\n"),
      DatasetError);

  CHECK_THROWS_AS(import_dataset("/nonexistent/dir/data.csv"), Error);
}

TEST_CASE("kpi json is stable, ordered and machine-readable") {
  std::vector<PacketRecord> records;
  records.push_back(make_record(1, true, 10, 1, 0));
  records.push_back(make_record(1, true, 20, 2, 1));
  records.push_back(make_record(3, false, 0, 0, 2));

  const KpiReport report = compute_kpi_report(records);
  const std::string json = kpi_report_json(report);

  CHECK(json == kpi_report_json(report));  // byte-stable
  CHECK(json.back() == '\n');

  const auto parsed = nlohmann::json::parse(json);
  const auto& p1 = parsed.at("tests").at("1").at("priorities").at("1");
  CHECK(p1.at("total") == 2);
  CHECK(p1.at("delivered") == 2);
  CHECK(p1.at("pdr") == doctest::Approx(1.0));
  CHECK(p1.at("pdt_avg_ms") == doctest::Approx(15.0));
  CHECK(p1.at("pdt_min_ms") == 10);
  CHECK(p1.at("pdt_max_ms") == 20);

  const auto& p3 = parsed.at("tests").at("1").at("priorities").at("3");
  CHECK(p3.at("pdr") == doctest::Approx(0.0));
  CHECK(p3.at("pdt_avg_ms").is_null());
  CHECK(p3.at("hops_avg").is_null());
}

TEST_CASE("text table lists every class") {
  std::vector<PacketRecord> records;
  records.push_back(make_record(1, true, 10, 1, 0));
  records.push_back(make_record(2, false, 0, 0, 1));

  const std::string text = kpi_report_text(compute_kpi_report(records));
  CHECK(text.find("Test 1") != std::string::npos);
  CHECK(text.find("priority") != std::string::npos);
  CHECK(text.find("PDR") != std::string::npos);
}

TEST_CASE("ecdf csv lists one step per distinct value") {
  const std::string csv = ecdf_to_csv(ecdf({3, 3, 5}));
  CHECK(csv.find("pdt_ms,fraction\n") == 0);
  CHECK(csv.find("3,0.666666667\n") != std::string::npos);
  CHECK(csv.find("5,1.000000000\n") != std::string::npos);
}

#include "meshqos/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace meshqos {

const char kDatasetHeader[] =
    "Timestamp (ms),Test Id,Packet Id,Sender Address,Receiver Address,TTL,"
    "Tx Power (dBm),Priority Class,Delivered,Number of hops,PDT (ms)";

int hops_from_ttl(int initial_ttl, int ttl_at_delivery) {
  if (initial_ttl < 0 || ttl_at_delivery < 0) {
    throw Error("ttl values cannot be negative");
  }
  if (ttl_at_delivery > initial_ttl) {
    throw Error("ttl at delivery " + std::to_string(ttl_at_delivery) +
                " exceeds initial ttl " + std::to_string(initial_ttl));
  }
  return initial_ttl - ttl_at_delivery;
}

KpiTable compute_kpis(std::span<const PacketRecord> records) {
  if (records.empty()) {
    throw Error("cannot compute KPIs over an empty record set");
  }
  KpiTable table;
  for (const PacketRecord& r : records) {
    KpiRow& row = table[r.priority];
    ++row.total;
    if (r.delivered) ++row.delivered;
  }
  for (auto& [priority, row] : table) {
    row.pdr = static_cast<double>(row.delivered) / row.total;
    if (row.delivered == 0) continue;

    double hops_sum = 0.0;
    double pdt_sum = 0.0;
    std::int64_t pdt_min = 0;
    std::int64_t pdt_max = 0;
    bool first = true;
    for (const PacketRecord& r : records) {
      if (r.priority != priority || !r.delivered) continue;
      hops_sum += r.number_of_hops;
      const std::int64_t pdt = r.pdt_ms.value();
      pdt_sum += static_cast<double>(pdt);
      pdt_min = first ? pdt : std::min(pdt_min, pdt);
      pdt_max = first ? pdt : std::max(pdt_max, pdt);
      first = false;
    }
    const double mean = pdt_sum / row.delivered;
    double var_sum = 0.0;
    for (const PacketRecord& r : records) {
      if (r.priority != priority || !r.delivered) continue;
      const double d = static_cast<double>(r.pdt_ms.value()) - mean;
      var_sum += d * d;
    }
    row.hops_avg = hops_sum / row.delivered;
    row.pdt_avg_ms = mean;
    row.pdt_std_ms = std::sqrt(var_sum / row.delivered);
    row.pdt_min_ms = pdt_min;
    row.pdt_max_ms = pdt_max;
  }
  return table;
}

KpiReport compute_kpi_report(std::span<const PacketRecord> records) {
  std::map<int, std::vector<PacketRecord>> by_test;
  for (const PacketRecord& r : records) by_test[r.test_id].push_back(r);
  KpiReport report;
  for (const auto& [test_id, group] : by_test) {
    report[test_id] = compute_kpis(group);
  }
  return report;
}

std::vector<std::pair<std::int64_t, double>> ecdf(
    std::vector<std::int64_t> samples_ms) {
  std::vector<std::pair<std::int64_t, double>> curve;
  if (samples_ms.empty()) return curve;
  std::sort(samples_ms.begin(), samples_ms.end());
  const double n = static_cast<double>(samples_ms.size());
  for (std::size_t i = 0; i < samples_ms.size(); ++i) {
    // Collapse duplicates onto the final (upper) step for the value.
    if (i + 1 < samples_ms.size() && samples_ms[i + 1] == samples_ms[i]) {
      continue;
    }
    curve.emplace_back(samples_ms[i], static_cast<double>(i + 1) / n);
  }
  curve.back().second = 1.0;  // guard against accumulated rounding
  return curve;
}

namespace {

std::string hex_address(std::uint16_t a) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", a);
  return buf;
}

}  // namespace

std::string dataset_to_csv(std::span<const PacketRecord> records) {
  std::string out = kDatasetHeader;
  out += '\n';
  for (const PacketRecord& r : records) {
    // Delivered rows stamp the reception time; undelivered rows keep the
    // origination time (there was no reception).
    const std::int64_t stamp =
        r.delivered ? r.timestamp_ms + r.pdt_ms.value() : r.timestamp_ms;
    out += std::to_string(stamp);
    out += ',' + std::to_string(r.test_id);
    out += ',' + std::to_string(r.packet_id);
    out += ',' + hex_address(r.sender);
    out += ',' + hex_address(r.receiver);
    out += ',' + std::to_string(r.ttl);
    out += ',' + std::to_string(r.tx_power_dbm);
    out += ',' + std::to_string(r.priority);
    out += ',' + std::string(r.delivered ? "1" : "0");
    out += ',' + std::to_string(r.number_of_hops);
    out += ',';
    if (r.delivered) out += std::to_string(r.pdt_ms.value());
    out += '\n';
  }
  return out;
}

void export_dataset(std::span<const PacketRecord> records,
                    const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  file << dataset_to_csv(records);
  if (!file.flush()) {
    throw Error("failed writing " + path.string());
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_int(const std::string& field, int row,
                       const char* column) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DatasetError("row " + std::to_string(row) + ": '" + field +
                       "' is not an integer in column " + column);
  }
  return value;
}

std::uint16_t parse_address(const std::string& field, int row,
                            const char* column) {
  if (field.size() != 6 || field[0] != '0' || field[1] != 'x') {
    throw DatasetError("row " + std::to_string(row) + ": '" + field +
                       "' is not a 0x-prefixed address in column " + column);
  }
  std::uint16_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data() + 2, field.data() + 6, value, 16);
  if (ec != std::errc{} || ptr != field.data() + 6) {
    throw DatasetError("row " + std::to_string(row) + ": '" + field +
                       "' is not a 0x-prefixed address in column " + column);
  }
  return value;
}

}  // namespace

std::vector<PacketRecord> dataset_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw DatasetError("dataset is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> expected = split_fields(kDatasetHeader);
  const std::vector<std::string> got = split_fields(line);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= got.size() || got[i] != expected[i]) {
      throw DatasetError("dataset missing column '" + expected[i] + "'");
    }
  }
  if (got.size() != expected.size()) {
    throw DatasetError("dataset has " + std::to_string(got.size()) +
                       " columns, expected " +
                       std::to_string(expected.size()));
  }

  std::vector<PacketRecord> records;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != expected.size()) {
      throw DatasetError("row " + std::to_string(row) + " has " +
                         std::to_string(f.size()) + " fields, expected " +
                         std::to_string(expected.size()));
    }
    PacketRecord r;
    const std::int64_t stamp = parse_int(f[0], row, "Timestamp (ms)");
    r.test_id = static_cast<int>(parse_int(f[1], row, "Test Id"));
    r.packet_id = parse_int(f[2], row, "Packet Id");
    r.sender = parse_address(f[3], row, "Sender Address");
    r.receiver = parse_address(f[4], row, "Receiver Address");
    r.ttl = static_cast<int>(parse_int(f[5], row, "TTL"));
    r.tx_power_dbm = static_cast<int>(parse_int(f[6], row, "Tx Power (dBm)"));
    r.priority = static_cast<int>(parse_int(f[7], row, "Priority Class"));
    const std::int64_t delivered = parse_int(f[8], row, "Delivered");
    if (delivered != 0 && delivered != 1) {
      throw DatasetError("row " + std::to_string(row) +
                         ": Delivered must be 0 or 1");
    }
    r.delivered = delivered == 1;
    r.number_of_hops = static_cast<int>(parse_int(f[9], row, "Number of hops"));
    if (r.delivered) {
      if (f[10].empty()) {
        throw DatasetError("row " + std::to_string(row) +
                           ": delivered row lacks a PDT value");
      }
      r.pdt_ms = parse_int(f[10], row, "PDT (ms)");
      r.timestamp_ms = stamp - r.pdt_ms.value();
    } else {
      if (!f[10].empty()) {
        throw DatasetError("row " + std::to_string(row) +
                           ": undelivered row carries a PDT value");
      }
      r.timestamp_ms = stamp;
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PacketRecord> import_dataset(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error("cannot open " + path.string() + " for reading");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return dataset_from_csv(buffer.str());
}

std::string kpi_report_json(const KpiReport& report) {
  nlohmann::ordered_json root;
  auto& tests = root["tests"];
  tests = nlohmann::ordered_json::object();
  for (const auto& [test_id, table] : report) {
    nlohmann::ordered_json priorities = nlohmann::ordered_json::object();
    for (const auto& [priority, row] : table) {
      nlohmann::ordered_json j;
      j["total"] = row.total;
      j["delivered"] = row.delivered;
      j["pdr"] = row.pdr;
      j["hops_avg"] = row.hops_avg ? nlohmann::ordered_json(*row.hops_avg)
                                   : nlohmann::ordered_json(nullptr);
      j["pdt_avg_ms"] = row.pdt_avg_ms
                            ? nlohmann::ordered_json(*row.pdt_avg_ms)
                            : nlohmann::ordered_json(nullptr);
      j["pdt_std_ms"] = row.pdt_std_ms
                            ? nlohmann::ordered_json(*row.pdt_std_ms)
                            : nlohmann::ordered_json(nullptr);
      j["pdt_min_ms"] = row.pdt_min_ms
                            ? nlohmann::ordered_json(*row.pdt_min_ms)
                            : nlohmann::ordered_json(nullptr);
      j["pdt_max_ms"] = row.pdt_max_ms
                            ? nlohmann::ordered_json(*row.pdt_max_ms)
                            : nlohmann::ordered_json(nullptr);
      priorities[std::to_string(priority)] = std::move(j);
    }
    tests[std::to_string(test_id)]["priorities"] = std::move(priorities);
  }
  return root.dump(2) + "\n";
}

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string opt_fixed(const std::optional<double>& v, int precision) {
  return v ? fixed(*v, precision) : std::string("-");
}

std::string opt_int(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string("-");
}

}  // namespace

std::string kpi_report_text(const KpiReport& report) {
  std::ostringstream out;
  for (const auto& [test_id, table] : report) {
    out << "Test " << test_id << "\n";
    out << "  priority   total  delivered    PDR    hops avg    PDT avg"
           "    PDT std    PDT min    PDT max\n";
    for (const auto& [priority, row] : table) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "  %8d  %6d  %9d  %5s  %10s  %9s  %9s  %9s  %9s\n",
                    priority, row.total, row.delivered,
                    fixed(row.pdr, 3).c_str(),
                    opt_fixed(row.hops_avg, 3).c_str(),
                    opt_fixed(row.pdt_avg_ms, 3).c_str(),
                    opt_fixed(row.pdt_std_ms, 3).c_str(),
                    opt_int(row.pdt_min_ms).c_str(),
                    opt_int(row.pdt_max_ms).c_str());
      out << line;
    }
  }
  return out.str();
}

std::string ecdf_to_csv(
    const std::vector<std::pair<std::int64_t, double>>& curve) {
  std::string out = "pdt_ms,fraction\n";
  for (const auto& [value, fraction] : curve) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld,%.9f\n",
                  static_cast<long long>(value), fraction);
    out += buf;
  }
  return out;
}

}  // namespace meshqos

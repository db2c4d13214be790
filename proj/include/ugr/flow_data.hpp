#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ugr {

// Row label. Codes follow the lexicographic order of the column strings
// {A, S, SS}.
enum class ThreatClass : int { Anomaly = 0, Signature = 1, SyntheticSignature = 2 };

inline constexpr int kThreatClassCount = 3;

std::string_view to_string(ThreatClass c) noexcept;
std::optional<ThreatClass> parse_threat_class(std::string_view text) noexcept;
ThreatClass threat_class_from_code(int code);

// The fourteen dataset columns in canonical order.
enum class Column : int {
  Time,
  Protocol,
  Flag,
  Family,
  Clusters,
  SeedAddress,
  ExpAddress,
  Btc,
  Usd,
  NetflowBytes,
  IpClass,
  Threat,
  Port,
  Prediction,
};

inline constexpr std::size_t kColumnCount = 14;

inline constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "Time", "Protocol", "Flag", "Family", "Clusters", "SeedAddress", "ExpAddress",
    "BTC",  "USD",      "Netflow_Bytes", "IPaddress", "Threats", "Port", "Prediction",
};

std::string_view column_name(Column c) noexcept;
bool is_categorical(Column c) noexcept;

inline constexpr std::array<std::string_view, 3> kProtocols = {"ICMP", "TCP", "UDP"};

struct FlowRecord {
  std::int64_t time = 0;
  std::string protocol;
  std::string flag;
  std::string family;
  std::int64_t clusters = 0;
  std::string seed_address;
  std::string exp_address;
  std::int64_t btc = 0;
  std::int64_t usd = 0;
  std::int64_t netflow_bytes = 0;
  std::string ip_class;
  std::string threat;
  std::int64_t port = 0;
  // Empty when the source had no Prediction column.
  std::optional<ThreatClass> prediction;

  bool operator==(const FlowRecord&) const = default;
};

// Field accessors by column. numeric_field throws std::invalid_argument for
// categorical columns and vice versa.
std::int64_t numeric_field(const FlowRecord& r, Column c);
std::string_view categorical_field(const FlowRecord& r, Column c);

// Expected set of columns. Binding is by header name; order in the file is
// free.
struct Schema {
  std::vector<Column> columns;

  static Schema canonical();
  // All columns except Prediction, for unlabeled input.
  static Schema unlabeled();
  bool has(Column c) const;
};

// Parses a UTF-8 CSV with a mandatory header row. A leading unnamed index
// column is dropped. Throws SchemaError for header problems and RowError for
// the first bad data row.
std::vector<FlowRecord> parse_dataset(std::istream& source, const Schema& schema = Schema::canonical());
std::vector<FlowRecord> parse_dataset_file(const std::string& path,
                                           const Schema& schema = Schema::canonical());

// Writes records under the canonical header (Prediction omitted when no
// record carries a label).
void write_dataset(std::ostream& out, std::span<const FlowRecord> records);

struct DatasetSummary {
  std::size_t row_count = 0;
  std::map<std::string, std::size_t> distinct_values;  // column name -> distinct count
  std::map<std::string, std::size_t> family_histogram;
  std::array<std::size_t, kThreatClassCount> class_histogram{};
  std::size_t unlabeled = 0;

  std::size_t distinct_families() const { return family_histogram.size(); }
};

DatasetSummary summarize(std::span<const FlowRecord> records);

}  // namespace ugr

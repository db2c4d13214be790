#include "ugr/flow_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "csv.hpp"
#include "ugr/error.hpp"

namespace ugr {

namespace {

constexpr std::array<std::string_view, kThreatClassCount> kClassStrings = {"A", "S", "SS"};

// Alternate spellings seen in public exports of the dataset.
struct Alias {
  std::string_view name;
  Column column;
};
constexpr std::array<Alias, 1> kHeaderAliases = {{{"Protcol", Column::Protocol}}};

std::optional<Column> column_from_header(std::string_view name) {
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (kColumnNames[i] == name) return static_cast<Column>(i);
  }
  for (const auto& alias : kHeaderAliases) {
    if (alias.name == name) return alias.column;
  }
  return std::nullopt;
}

bool is_index_header(std::string_view name) {
  return name.empty() || name.starts_with("Unnamed");
}

std::int64_t parse_integer(std::string_view text, std::size_t row, Column c) {
  text = csv::trim(text);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw RowError(row, std::string(column_name(c)), "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

void require_range(std::int64_t value, std::int64_t lo, std::int64_t hi, std::size_t row, Column c) {
  if (value < lo || value > hi) {
    throw RowError(row, std::string(column_name(c)),
                   "value " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
}

constexpr std::int64_t kMaxCount = std::numeric_limits<std::int64_t>::max();

void assign_field(FlowRecord& r, Column c, std::string_view text, std::size_t row) {
  switch (c) {
    case Column::Time:
      r.time = parse_integer(text, row, c);
      require_range(r.time, 0, kMaxCount, row, c);
      break;
    case Column::Clusters:
      r.clusters = parse_integer(text, row, c);
      break;
    case Column::Btc:
      r.btc = parse_integer(text, row, c);
      require_range(r.btc, 0, kMaxCount, row, c);
      break;
    case Column::Usd:
      r.usd = parse_integer(text, row, c);
      require_range(r.usd, 0, kMaxCount, row, c);
      break;
    case Column::NetflowBytes:
      r.netflow_bytes = parse_integer(text, row, c);
      require_range(r.netflow_bytes, 0, kMaxCount, row, c);
      break;
    case Column::Port:
      r.port = parse_integer(text, row, c);
      require_range(r.port, 0, 65535, row, c);
      break;
    case Column::Protocol:
      if (std::find(kProtocols.begin(), kProtocols.end(), text) == kProtocols.end()) {
        throw RowError(row, "Protocol", "unknown protocol '" + std::string(text) + "'");
      }
      r.protocol = std::string(text);
      break;
    case Column::Flag:
      r.flag = std::string(text);
      break;
    case Column::Family:
      r.family = std::string(text);
      break;
    case Column::SeedAddress:
      r.seed_address = std::string(text);
      break;
    case Column::ExpAddress:
      r.exp_address = std::string(text);
      break;
    case Column::IpClass:
      r.ip_class = std::string(text);
      break;
    case Column::Threat:
      r.threat = std::string(text);
      break;
    case Column::Prediction: {
      auto label = parse_threat_class(csv::trim(text));
      if (!label) throw RowError(row, "Prediction", "unknown prediction label '" + std::string(text) + "'");
      r.prediction = *label;
      break;
    }
  }
}

}  // namespace

std::string_view to_string(ThreatClass c) noexcept { return kClassStrings[static_cast<int>(c)]; }

std::optional<ThreatClass> parse_threat_class(std::string_view text) noexcept {
  for (int i = 0; i < kThreatClassCount; ++i) {
    if (kClassStrings[i] == text) return static_cast<ThreatClass>(i);
  }
  return std::nullopt;
}

ThreatClass threat_class_from_code(int code) {
  if (code < 0 || code >= kThreatClassCount) {
    throw std::out_of_range("threat class code " + std::to_string(code) + " out of range");
  }
  return static_cast<ThreatClass>(code);
}

std::string_view column_name(Column c) noexcept { return kColumnNames[static_cast<std::size_t>(c)]; }

bool is_categorical(Column c) noexcept {
  switch (c) {
    case Column::Protocol:
    case Column::Flag:
    case Column::Family:
    case Column::SeedAddress:
    case Column::ExpAddress:
    case Column::IpClass:
    case Column::Threat:
    case Column::Prediction:
      return true;
    default:
      return false;
  }
}

std::int64_t numeric_field(const FlowRecord& r, Column c) {
  switch (c) {
    case Column::Time: return r.time;
    case Column::Clusters: return r.clusters;
    case Column::Btc: return r.btc;
    case Column::Usd: return r.usd;
    case Column::NetflowBytes: return r.netflow_bytes;
    case Column::Port: return r.port;
    default: throw std::invalid_argument(std::string(column_name(c)) + " is not numeric");
  }
}

std::string_view categorical_field(const FlowRecord& r, Column c) {
  switch (c) {
    case Column::Protocol: return r.protocol;
    case Column::Flag: return r.flag;
    case Column::Family: return r.family;
    case Column::SeedAddress: return r.seed_address;
    case Column::ExpAddress: return r.exp_address;
    case Column::IpClass: return r.ip_class;
    case Column::Threat: return r.threat;
    case Column::Prediction:
      if (!r.prediction) return {};
      return to_string(*r.prediction);
    default: throw std::invalid_argument(std::string(column_name(c)) + " is not categorical");
  }
}

Schema Schema::canonical() {
  Schema s;
  for (std::size_t i = 0; i < kColumnCount; ++i) s.columns.push_back(static_cast<Column>(i));
  return s;
}

Schema Schema::unlabeled() {
  Schema s = canonical();
  s.columns.pop_back();
  return s;
}

bool Schema::has(Column c) const { return std::find(columns.begin(), columns.end(), c) != columns.end(); }

std::vector<FlowRecord> parse_dataset(std::istream& source, const Schema& schema) {
  std::string line;
  if (!std::getline(source, line)) throw SchemaError("", "input is empty: a header row is required");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  std::vector<std::string> fields;
  if (!csv::split_line(line, fields)) throw SchemaError("", "unterminated quote in header");

  // binding[i] = column bound to field i, or nullopt for a dropped index column.
  std::vector<std::optional<Column>> binding;
  std::set<Column> seen;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string_view name = csv::trim(fields[i]);
    if (i == 0 && is_index_header(name)) {
      binding.push_back(std::nullopt);
      continue;
    }
    const auto column = column_from_header(name);
    if (!column || !schema.has(*column)) {
      throw SchemaError(std::string(name), "unexpected column '" + std::string(name) + "'");
    }
    if (!seen.insert(*column).second) {
      throw SchemaError(std::string(name), "duplicate column '" + std::string(name) + "'");
    }
    binding.push_back(column);
  }
  for (Column c : schema.columns) {
    if (!seen.contains(c)) {
      throw SchemaError(std::string(column_name(c)), "missing column '" + std::string(column_name(c)) + "'");
    }
  }

  std::vector<FlowRecord> records;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    ++row;
    if (!csv::split_line(line, fields)) throw RowError(row, "", "unterminated quote");
    if (fields.size() != binding.size()) {
      throw RowError(row, "", "expected " + std::to_string(binding.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    FlowRecord record;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (binding[i]) assign_field(record, *binding[i], fields[i], row);
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<FlowRecord> parse_dataset_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "': file not found or unreadable");
  return parse_dataset(in, schema);
}

void write_dataset(std::ostream& out, std::span<const FlowRecord> records) {
  const bool labeled =
      std::any_of(records.begin(), records.end(), [](const FlowRecord& r) { return r.prediction.has_value(); });
  const std::size_t columns = labeled ? kColumnCount : kColumnCount - 1;
  for (std::size_t i = 0; i < columns; ++i) {
    if (i) out << ',';
    out << kColumnNames[i];
  }
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < columns; ++i) {
      const auto c = static_cast<Column>(i);
      if (i) out << ',';
      if (is_categorical(c)) {
        out << csv::escape(categorical_field(r, c));
      } else {
        out << numeric_field(r, c);
      }
    }
    out << '\n';
  }
}

DatasetSummary summarize(std::span<const FlowRecord> records) {
  DatasetSummary summary;
  summary.row_count = records.size();
  std::array<std::set<std::string>, kColumnCount> distinct;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      const auto c = static_cast<Column>(i);
      if (c == Column::Prediction && !r.prediction) continue;
      distinct[i].insert(is_categorical(c) ? std::string(categorical_field(r, c))
                                           : std::to_string(numeric_field(r, c)));
    }
    ++summary.family_histogram[r.family];
    if (r.prediction) {
      ++summary.class_histogram[static_cast<int>(*r.prediction)];
    } else {
      ++summary.unlabeled;
    }
  }
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    summary.distinct_values[std::string(kColumnNames[i])] = distinct[i].size();
  }
  return summary;
}

}  // namespace ugr

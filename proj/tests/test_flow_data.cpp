#include <algorithm>
#include <array>
#include <sstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "ugr/error.hpp"
#include "ugr/flow_data.hpp"
#include "ugr/synth.hpp"

using namespace ugr;
using testing::kHeader;
using testing::parse;

namespace {
const std::string kRow0 = "50,TCP,A,WannaCry,1,1DA11mPS,1BonuSr7,1,500,5,A,Botnet,5061,SS";
}

TEST_CASE("first row of the published dataset parses field by field") {
  const auto records = parse(kHeader + "\n" + kRow0 + "\n");
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.time == 50);
  CHECK(r.protocol == "TCP");
  CHECK(r.flag == "A");
  CHECK(r.family == "WannaCry");
  CHECK(r.clusters == 1);
  CHECK(r.seed_address == "1DA11mPS");
  CHECK(r.exp_address == "1BonuSr7");
  CHECK(r.btc == 1);
  CHECK(r.usd == 500);
  CHECK(r.netflow_bytes == 5);
  CHECK(r.ip_class == "A");
  CHECK(r.threat == "Botnet");
  CHECK(r.port == 5061);
  CHECK(r.prediction == ThreatClass::SyntheticSignature);
}

TEST_CASE("header without data rows gives no records") {
  CHECK(parse(kHeader + "\n").empty());
  CHECK(parse(kHeader).empty());
}

TEST_CASE("input without a header is a schema error") { CHECK_THROWS_AS(parse(""), SchemaError); }

TEST_CASE("port outside the 16-bit range is a row error") {
  const std::string bad = "50,TCP,A,WannaCry,1,1DA11mPS,1BonuSr7,1,500,5,A,Botnet,99999,SS";
  try {
    parse(kHeader + "\n" + kRow0 + "\n" + bad + "\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == "Port");
  }
}

TEST_CASE("negative amounts are rejected") {
  for (const std::string bad : {"-1,TCP,A,W,1,a,b,1,500,5,A,Botnet,5061,SS", "1,TCP,A,W,1,a,b,-1,500,5,A,Botnet,5061,SS",
                                "1,TCP,A,W,1,a,b,1,-500,5,A,Botnet,5061,SS", "1,TCP,A,W,1,a,b,1,500,-5,A,Botnet,5061,SS",
                                "1,TCP,A,W,1,a,b,1,500,5,A,Botnet,-1,SS"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse(kHeader + "\n" + bad + "\n"), RowError);
  }
}

TEST_CASE("non-integer numeric fields report the row number") {
  const std::string bad = "50,TCP,A,WannaCry,1,1DA11mPS,1BonuSr7,1.5,500,5,A,Botnet,5061,SS";
  try {
    parse(kHeader + "\n" + kRow0 + "\n" + kRow0 + "\n" + bad + "\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == "BTC");
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("unknown labels and protocols are row errors") {
  CHECK_THROWS_AS(parse(kHeader + "\n50,TCP,A,W,1,a,b,1,500,5,A,Botnet,5061,X\n"), RowError);
  CHECK_THROWS_AS(parse(kHeader + "\n50,SCTP,A,W,1,a,b,1,500,5,A,Botnet,5061,A\n"), RowError);
}

TEST_CASE("wrong field count is a row error") {
  CHECK_THROWS_AS(parse(kHeader + "\n50,TCP,A,W,1,a,b,1,500,5,A,Botnet,5061\n"), RowError);
  CHECK_THROWS_AS(parse(kHeader + "\n" + kRow0 + ",extra\n"), RowError);
}

TEST_CASE("schema errors name the offending column") {
  SUBCASE("missing") {
    try {
      parse("Time,Protocol,Flag,Family,Clusters,SeedAddress,ExpAddress,BTC,USD,IPaddress,Threats,Port,Prediction\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "Netflow_Bytes");
    }
  }
  SUBCASE("extra") {
    try {
      parse(kHeader + ",Bogus\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "Bogus");
    }
  }
  SUBCASE("duplicate") {
    try {
      parse(kHeader + ",Port\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "Port");
    }
  }
}

TEST_CASE("binding follows the header, not the position") {
  const auto canonical = parse(kHeader + "\n" + kRow0 + "\n");
  const auto shuffled = parse(
      "Prediction,Port,Threats,IPaddress,Netflow_Bytes,USD,BTC,ExpAddress,SeedAddress,Clusters,Family,Flag,Protocol,"
      "Time\nSS,5061,Botnet,A,5,500,1,1BonuSr7,1DA11mPS,1,WannaCry,A,TCP,50\n");
  CHECK(canonical == shuffled);
}

TEST_CASE("leading unnamed index column is dropped") {
  const auto plain = parse(kHeader + "\n" + kRow0 + "\n");
  CHECK(parse("," + kHeader + "\n0," + kRow0 + "\n") == plain);
  CHECK(parse("Unnamed: 0," + kHeader + "\n0," + kRow0 + "\n") == plain);
}

TEST_CASE("BOM, CRLF, blank lines and the Protcol spelling are tolerated") {
  const auto plain = parse(kHeader + "\n" + kRow0 + "\n");
  CHECK(parse("\xEF\xBB\xBF" + kHeader + "\r\n" + kRow0 + "\r\n\r\n") == plain);
  std::string alias = kHeader;
  alias.replace(alias.find("Protocol"), 8, "Protcol");
  CHECK(parse(alias + "\n" + kRow0 + "\n") == plain);
}

TEST_CASE("quoted fields are unquoted") {
  const auto records = parse(kHeader + "\n50,TCP,\"A\",\"Wanna,Cry\",1,a,b,1,500,5,A,Botnet,5061,S\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].family == "Wanna,Cry");
}

TEST_CASE("threat class codes are the lexicographic rank of the class strings") {
  std::array<std::string, 3> names = {"SS", "A", "S"};
  std::sort(names.begin(), names.end());
  for (int rank = 0; rank < 3; ++rank) {
    const auto parsed = parse_threat_class(names[static_cast<std::size_t>(rank)]);
    REQUIRE(parsed.has_value());
    CHECK(static_cast<int>(*parsed) == rank);
    CHECK(to_string(threat_class_from_code(rank)) == names[static_cast<std::size_t>(rank)]);
  }
  CHECK_FALSE(parse_threat_class("B").has_value());
  CHECK_THROWS(threat_class_from_code(3));
}

TEST_CASE("write then parse round-trips every field") {
  const auto records = synthesize({500, 3, 0.7});
  std::ostringstream out;
  write_dataset(out, records);
  CHECK(parse(out.str()) == records);
}

TEST_CASE("unlabeled files parse under the unlabeled schema") {
  std::string header = kHeader.substr(0, kHeader.rfind(','));
  std::string row = kRow0.substr(0, kRow0.rfind(','));
  std::istringstream in(header + "\n" + row + "\n");
  const auto records = parse_dataset(in, Schema::unlabeled());
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].prediction.has_value());
  std::ostringstream out;
  write_dataset(out, records);
  CHECK(out.str() == header + "\n" + row + "\n");
}

TEST_CASE("missing file is a data error") {
  CHECK_THROWS_AS(parse_dataset_file("/nonexistent/ugransome.csv"), DataError);
}

TEST_CASE("summarize") {
  SUBCASE("empty input gives zero counts") {
    const auto s = summarize({});
    CHECK(s.row_count == 0);
    CHECK(s.distinct_families() == 0);
    CHECK(s.class_histogram == std::array<std::size_t, 3>{0, 0, 0});
  }
  SUBCASE("family histogram counts by hand") {
    auto records = parse(kHeader + "\n" + kRow0 + "\n" + kRow0 + "\n" + kRow0 + "\n");
    records[0].family = "X";
    records[1].family = "X";
    records[2].family = "Y";
    const auto s = summarize(records);
    CHECK(s.family_histogram == std::map<std::string, std::size_t>{{"X", 2}, {"Y", 1}});
    CHECK(s.distinct_values.at("Family") == 2);
    CHECK(s.distinct_values.at("Time") == 1);
  }
  SUBCASE("row count equals data lines and histograms sum to it") {
    const auto records = synthesize({1234, 9, 0.5});
    std::ostringstream out;
    write_dataset(out, records);
    const auto text = out.str();
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
    const auto s = summarize(parse(text));
    CHECK(s.row_count == lines);
    std::size_t families = 0, classes = 0;
    for (const auto& [_, n] : s.family_histogram) families += n;
    for (auto n : s.class_histogram) classes += n;
    CHECK(families == lines);
    CHECK(classes == lines);
    CHECK(s.distinct_families() == 17);
  }
}

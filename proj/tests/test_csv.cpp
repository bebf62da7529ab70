#include <doctest.h>

#include "warden/csv.hpp"

using namespace warden;

TEST_SUITE("csv") {
  TEST_CASE("plain rows") {
    const auto rows = csv::parse("a,b,c\nd,e,f\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"d", "e", "f"});
  }

  TEST_CASE("quoted fields keep commas and newlines") {
    const auto rows = csv::parse("\"a,b\",\"line1\nline2\",c\n");
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 3);
    CHECK(rows[0][0] == "a,b");
    CHECK(rows[0][1] == "line1\nline2");
    CHECK(rows[0][2] == "c");
  }

  TEST_CASE("doubled quotes unescape") {
    const auto rows = csv::parse("\"say \"\"hi\"\"\",x\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "say \"hi\"");
  }

  TEST_CASE("crlf endings and missing final newline") {
    const auto rows = csv::parse("a,b\r\nc,d");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == std::vector<std::string>{"c", "d"});
  }

  TEST_CASE("utf-8 bom is skipped") {
    const auto rows = csv::parse("\xEF\xBB\xBFh1,h2\nv1,v2\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "h1");
  }

  TEST_CASE("blank lines are skipped") {
    const auto rows = csv::parse("a,b\n\n\nc,d\n");
    REQUIRE(rows.size() == 2);
  }

  TEST_CASE("empty fields survive") {
    const auto rows = csv::parse("a,,c\n");
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 3);
    CHECK(rows[0][1] == "");
  }

  TEST_CASE("escape_field round-trips through parse") {
    const std::string nasty = "a,\"b\"\nc";
    const std::string line = csv::escape_field(nasty) + "," + csv::escape_field("plain") + "\n";
    const auto rows = csv::parse(line);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == nasty);
    CHECK(rows[0][1] == "plain");
  }
}

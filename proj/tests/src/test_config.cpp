#include "doctest.h"

#include "config.hpp"

#include <orbistab/types.hpp>

using namespace orbistab;
using namespace orbistab::cli;

TEST_CASE("parse, serialize, parse is the identity") {
  const std::string text =
      "# leading comment\n"
      "top = 1\n"
      "\n"
      "[system]\n"
      "kind = furuta\n"
      "mass = 0.0679\n"
      "; another comment style\n"
      "x0 = 0.1 0.2 0 0\n"
      "\n"
      "[gains]\n"
      "gamma1 = 5\n"
      "gamma1 = 7\n";
  const Config a = parse_config_text(text);
  const std::string round = serialize_config(a);
  const Config b = parse_config_text(round);
  REQUIRE(a.sections.size() == b.sections.size());
  for (std::size_t i = 0; i < a.sections.size(); ++i) {
    CHECK(a.sections[i].name == b.sections[i].name);
    REQUIRE(a.sections[i].entries.size() == b.sections[i].entries.size());
    for (std::size_t j = 0; j < a.sections[i].entries.size(); ++j) {
      CHECK(a.sections[i].entries[j].key == b.sections[i].entries[j].key);
      CHECK(a.sections[i].entries[j].value == b.sections[i].entries[j].value);
    }
  }
  CHECK(serialize_config(b) == round);
}

TEST_CASE("lookup semantics") {
  const Config c = parse_config_text(
      "pre = 0\n[a]\nx = 1\nx = 2\ny = hello world\n[b]\nx = 3\n[a]\nz = 9\n");

  SUBCASE("duplicates resolve to the last occurrence") {
    REQUIRE(c.find("a", "x") != nullptr);
    CHECK(*c.find("a", "x") == "2");
  }
  SUBCASE("sections with the same name merge for lookup") {
    CHECK(*c.find("a", "z") == "9");
  }
  SUBCASE("values keep interior spaces") {
    CHECK(*c.find("a", "y") == "hello world");
  }
  SUBCASE("keys before any header live in the unnamed section") {
    CHECK(*c.find("", "pre") == "0");
  }
  SUBCASE("missing keys return null / false") {
    CHECK(c.find("a", "nope") == nullptr);
    CHECK(c.find("zzz", "x") == nullptr);
    CHECK(!c.has("a", "nope"));
    CHECK(c.has("b", "x"));
  }
}

TEST_CASE("set overwrites the occurrence lookup sees") {
  Config c = parse_config_text("[a]\nx = 1\nx = 2\n");
  c.set("a", "x", "5");
  CHECK(*c.find("a", "x") == "5");
  CHECK(c.sections[0].entries[0].value == "1");  // earlier duplicate untouched
  c.set("a", "fresh", "v");
  CHECK(*c.find("a", "fresh") == "v");
  c.set("new", "k", "w");
  CHECK(*c.find("new", "k") == "w");
}

TEST_CASE("CRLF input parses the same as LF") {
  const Config c = parse_config_text("[a]\r\nx = 1\r\ny = 2\r\n");
  CHECK(*c.find("a", "x") == "1");
  CHECK(*c.find("a", "y") == "2");
}

TEST_CASE("malformed lines are rejected with source and line number") {
  const auto message_of = [](const std::string& text) {
    try {
      parse_config_text(text, "probe.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  SUBCASE("unterminated section header") {
    const std::string msg = message_of("[a]\n[broken\n");
    CHECK(msg.find("probe.cfg:2") != std::string::npos);
    CHECK(msg.find("unterminated") != std::string::npos);
  }
  SUBCASE("line without an equals sign") {
    const std::string msg = message_of("[a]\nx = 1\njust words\n");
    CHECK(msg.find("probe.cfg:3") != std::string::npos);
  }
  SUBCASE("empty key") {
    const std::string msg = message_of("[a]\n = 1\n");
    CHECK(msg.find("probe.cfg:2") != std::string::npos);
    CHECK(msg.find("empty key") != std::string::npos);
  }
}

TEST_CASE("typed getters") {
  const Config c = parse_config_text(
      "[n]\n"
      "d = 2.5\n"
      "i = 7\n"
      "frac = 7.5\n"
      "bad = 12abc\n"
      "list = 1, 2.5,3 4\n"
      "t1 = true\nt2 = YES\nt3 = on\nt4 = 1\n"
      "f1 = false\nf2 = No\nf3 = off\nf4 = 0\n"
      "maybe = si\n");

  SUBCASE("doubles, required and defaulted") {
    CHECK(get_double(c, "n", "d") == 2.5);
    CHECK(get_double(c, "n", "absent", -1.0) == -1.0);
    CHECK_THROWS_AS(get_double(c, "n", "absent"), ConfigError);
    CHECK_THROWS_AS(get_double(c, "n", "bad"), ConfigError);
  }
  SUBCASE("ints reject fractional values") {
    CHECK(get_int(c, "n", "i", 0) == 7);
    CHECK(get_int(c, "n", "absent", 3) == 3);
    CHECK_THROWS_AS(get_int(c, "n", "frac", 0), ConfigError);
  }
  SUBCASE("bools accept the usual spellings") {
    for (const char* k : {"t1", "t2", "t3", "t4"}) CHECK(get_bool(c, "n", k, false));
    for (const char* k : {"f1", "f2", "f3", "f4"}) CHECK(!get_bool(c, "n", k, true));
    CHECK(get_bool(c, "n", "absent", true));
    CHECK_THROWS_AS(get_bool(c, "n", "maybe", false), ConfigError);
  }
  SUBCASE("number lists split on commas and whitespace alike") {
    const std::vector<double> v = get_doubles(c, "n", "list");
    REQUIRE(v.size() == 4);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 2.5);
    CHECK(v[2] == 3.0);
    CHECK(v[3] == 4.0);
  }
  SUBCASE("strings, required and defaulted") {
    CHECK(get_string(c, "n", "bad") == "12abc");
    CHECK(get_string(c, "n", "absent", "dflt") == "dflt");
    CHECK_THROWS_AS(get_string(c, "n", "absent"), ConfigError);
  }
}

TEST_CASE("scalar parsing helpers") {
  CHECK(parse_double(" 3.25 ", "w") == 3.25);
  CHECK(parse_double("-1e-3", "w") == -1e-3);
  CHECK_THROWS_AS(parse_double("", "w"), ConfigError);
  CHECK_THROWS_AS(parse_double("1.2.3", "w"), ConfigError);

  const std::vector<double> v = parse_doubles("0.1,0.2 ,0.3", "w");
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 0.3);
  CHECK(parse_doubles("", "w").empty());
  CHECK_THROWS_AS(parse_doubles("1 nope 3", "w"), ConfigError);
}

TEST_CASE("file round trip") {
  Config c;
  c.set("sim", "t_end", "30");
  c.set("sim", "method", "rk45");
  c.set("gains", "gamma1", "5");
  const std::string path = "/tmp/orbistab_cfg_test.cfg";
  write_config_file(c, path);
  const Config back = parse_config_file(path);
  CHECK(*back.find("sim", "t_end") == "30");
  CHECK(*back.find("sim", "method") == "rk45");
  CHECK(*back.find("gains", "gamma1") == "5");
  CHECK(serialize_config(back) == serialize_config(c));

  CHECK_THROWS_AS(parse_config_file("/tmp/orbistab_no_such_file.cfg"),
                  ConfigError);
}

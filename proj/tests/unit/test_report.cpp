#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "nehari/config.hpp"
#include "nehari/report.hpp"

using namespace nehari;

TEST_SUITE("report") {

TEST_CASE("objects keep insertion order and overwrite in place") {
  Json o = Json::object();
  o.set("zebra", Json::integer(1));
  o.set("apple", Json::integer(2));
  o.set("mid", Json::integer(3));
  o.set("apple", Json::integer(9));  // overwrite must not move the key
  CHECK(o.dump(0) == "{\"zebra\": 1,\"apple\": 9,\"mid\": 3}\n");
}

TEST_CASE("reals print with 17 significant digits") {
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(-0.0) == "-0");
  // One ulp differences must survive the round trip.  Read back with strtod:
  // std::stod throws out_of_range whenever strtod flags ERANGE, which glibc
  // does even for representable subnormal results.
  auto read_back = [](const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
  };
  const double a = 0.1;
  const double b = std::nextafter(a, 1.0);
  CHECK(format_real(a) != format_real(b));
  CHECK(read_back(format_real(a)) == a);
  CHECK(read_back(format_real(3.141592653589793)) == 3.141592653589793);
  CHECK(read_back(format_real(1e-308)) == 1e-308);
}

TEST_CASE("extended reals: infinities as strings, NaN as null") {
  Json o = Json::object();
  o.set("up", Json::real(std::numeric_limits<double>::infinity()));
  o.set("down", Json::real(-std::numeric_limits<double>::infinity()));
  o.set("gap", Json::real(std::numeric_limits<double>::quiet_NaN()));
  CHECK(o.dump(0) == "{\"up\": \"inf\",\"down\": \"-inf\",\"gap\": null}\n");
}

TEST_CASE("strings escape control characters and quotes") {
  Json o = Json::object();
  o.set("s", Json::str("a\"b\\c\nd\te\x01"));
  CHECK(o.dump(0) == "{\"s\": \"a\\\"b\\\\c\\nd\\te\\u0001\"}\n");
}

TEST_CASE("arrays, booleans, nesting, and indented layout") {
  Json arr = Json::array();
  arr.push(Json::boolean(true));
  arr.push(Json::null());
  Json inner = Json::object();
  inner.set("k", Json::real(2.5));
  arr.push(std::move(inner));
  Json root = Json::object();
  root.set("list", std::move(arr));
  CHECK(root.dump(2) ==
        "{\n"
        "  \"list\": [\n"
        "    true,\n"
        "    null,\n"
        "    {\n"
        "      \"k\": 2.5\n"
        "    }\n"
        "  ]\n"
        "}\n");
}

TEST_CASE("dump always ends with exactly one newline") {
  CHECK(Json::integer(7).dump(0) == "7\n");
  Json empty = Json::object();
  CHECK(empty.dump(2) == "{}\n");
  CHECK(Json::array().dump(2) == "[]\n");
}

TEST_CASE("condition report serialization is stable across repeats") {
  const EnergyModel model = fixtures::smooth_model(31, 0.0, 2.0);
  ConditionOptions o;
  o.tau_samples = 2;
  o.tau_m_samples = 4;
  const std::string once = to_json(check_conditions(model, o)).dump();
  const std::string twice = to_json(check_conditions(model, o)).dump();
  CHECK(once == twice);
  CHECK(once.find("\"verdict_f2\": \"holds\"") != std::string::npos);
  CHECK(once.find("\"essinf_beta\": \"inf\"") != std::string::npos);
}

TEST_CASE("config digest ignores layout, comments, and key order") {
  const ConfigFile a = ConfigFile::parse_string(
      "[domain]\n"
      "dim = 1\n"
      "lengths = 3.14\n"
      "nodes = 64\n"
      "[nonlinearity]\n"
      "family = smooth-saturation\n"
      "alpha = 0\n"
      "eta = 2\n");
  const ConfigFile b = ConfigFile::parse_string(
      "# reordered and noisy\n"
      "[nonlinearity]\n"
      "eta   =    2\n"
      "alpha = 0\n"
      "family = smooth-saturation   # same family\n"
      "\n"
      "[domain]\n"
      "nodes = 64\n"
      "lengths = 3.14\n"
      "dim = 1\n");
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);

  const ConfigFile c = ConfigFile::parse_string(
      "[domain]\n"
      "dim = 1\n"
      "lengths = 3.14\n"
      "nodes = 65\n"
      "[nonlinearity]\n"
      "family = smooth-saturation\n"
      "alpha = 0\n"
      "eta = 2\n");
  CHECK(a.digest() != c.digest());
}

TEST_CASE("config digest is blind to the output destination") {
  ConfigFile a = ConfigFile::parse_string(
      "[domain]\n"
      "dim = 1\n"
      "lengths = 3.14\n"
      "nodes = 64\n");
  ConfigFile b = a;
  a.set("output", "directory", "/tmp/run-a");
  b.set("output", "directory", "/tmp/run-b");
  CHECK(a.digest() == b.digest());
}

TEST_CASE("text files are written byte-exact") {
  const std::string path = "/tmp/nehari_report_test.txt";
  write_text_file(path, "line1\nline2\n");
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char buf[64] = {};
  const std::size_t got = std::fread(buf, 1, sizeof buf, f);
  std::fclose(f);
  std::remove(path.c_str());
  CHECK(std::string(buf, got) == "line1\nline2\n");
}

}  // TEST_SUITE

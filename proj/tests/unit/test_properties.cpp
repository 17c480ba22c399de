#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "nehari/properties.hpp"

using namespace nehari;

TEST_SUITE("properties") {

TEST_CASE("every suite passes a short randomized battery") {
  PropertyOptions po;
  po.seed = 2024;
  po.trials = 25;
  const std::vector<PropertyResult> results = run_properties(po);
  const std::vector<std::string> names = property_names();
  REQUIRE(results.size() == names.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    INFO("suite: ", results[i].name);
    CHECK(results[i].name == names[i]);
    CHECK(results[i].trials > 0);
    CHECK(results[i].failures == 0);
    CHECK(results[i].first_failure.empty());
  }
}

TEST_CASE("results are reproducible and thread-count invariant") {
  PropertyOptions po;
  po.seed = 7;
  po.trials = 10;
  const auto a = run_properties(po);
  const auto b = run_properties(po);
  po.threads = 3;
  const auto c = run_properties(po);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].trials == b[i].trials);
    CHECK(a[i].failures == b[i].failures);
    CHECK(a[i].first_failure == b[i].first_failure);
    CHECK(a[i].trials == c[i].trials);
    CHECK(a[i].failures == c[i].failures);
  }
}

TEST_CASE("the filter narrows the battery by substring") {
  PropertyOptions po;
  po.seed = 1;
  po.trials = 5;
  po.filter = "fibering";
  const auto results = run_properties(po);
  CHECK(!results.empty());
  for (const PropertyResult& r : results)
    CHECK(r.name.find("fibering") != std::string::npos);

  const std::vector<std::string> names = property_names();
  const auto expected = std::count_if(
      names.begin(), names.end(),
      [](const std::string& n) { return n.find("fibering") != std::string::npos; });
  CHECK(static_cast<std::ptrdiff_t>(results.size()) == expected);
}

}  // TEST_SUITE

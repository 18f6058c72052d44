#include <catch2/catch_amalgamated.hpp>

#include "mixstab/validate.hpp"

using namespace mixstab;

TEST_CASE("built-in validation suite passes", "[validate]") {
  const auto checks = run_validation();
  REQUIRE(checks.size() >= 15);
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
  REQUIRE(all_passed(checks));
}

TEST_CASE("every check carries a name and a measurement detail", "[validate]") {
  for (const auto& c : run_validation()) {
    REQUIRE_FALSE(c.name.empty());
    REQUIRE_FALSE(c.detail.empty());
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "ddsm/checks.hpp"
#include "ddsm/common.hpp"

using namespace ddsm;

TEST_CASE("numeric formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 123456789.123456789,
                   -0.0, 3.141592653589793}) {
    std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("content hash is stable") {
  // frozen digest: manifests must not silently change meaning across builds
  const char* data = "0\t1\t1\n";
  CHECK(fnv1a(data, 6) == fnv1a(data, 6));
  CHECK(fnv1a("a", 1) != fnv1a("b", 1));
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ull);
}

TEST_CASE("suite dispatch") {
  CHECK_THROWS_WITH(run_suite("nope"),
                    Catch::Matchers::ContainsSubstring("unknown suite"));
  json r = suite_gradient(5);
  CHECK(r["suite"] == "gradient");
  CHECK(r["pass"].get<bool>());
  REQUIRE(r["checks"].is_array());
  CHECK(r["checks"][0]["instances"] == 5);
  // serialization is deterministic
  CHECK(r.dump(2) == suite_gradient(5).dump(2));
}

TEST_CASE("small suite runs pass") {
  CHECK(suite_bounds(10, 3)["pass"].get<bool>());
  CHECK(suite_limits(3, 5)["pass"].get<bool>());
  CHECK(suite_oracle(3)["pass"].get<bool>());
  CHECK(suite_eigen(3)["pass"].get<bool>());
  CHECK(suite_stability(10)["pass"].get<bool>());
}

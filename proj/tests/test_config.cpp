#include <doctest.h>

#include "driftlab/config.hpp"

using namespace driftlab;

static const char* kSample = R"(# sample
[mesh]
dim = 2
divisions = 16, 16   # trailing comment
box_lo = 0, 0
box_hi = 1, 1

[drift]
kind = oscillatory
e0 = 0.5 ; 0.25
beta = 1.0
)";

TEST_CASE("parse and typed access") {
  const Config cfg = Config::parse_string(kSample);
  CHECK(cfg.get_int("mesh", "dim", 0) == 2);
  CHECK(cfg.get_int_list("mesh", "divisions", {}) == std::vector<int>{16, 16});
  CHECK(cfg.get_real("drift", "beta", 0.0) == doctest::Approx(1.0));
  CHECK(cfg.get_string("drift", "kind", "") == "oscillatory");
  const auto exprs = cfg.get_expr_list("drift", "e0", {});
  REQUIRE(exprs.size() == 2);
  CHECK(exprs[0] == "0.5");
  CHECK(exprs[1] == "0.25");
}

TEST_CASE("fallbacks for absent keys") {
  const Config cfg = Config::parse_string(kSample);
  CHECK(cfg.get_real("mesh", "absent", 7.5) == doctest::Approx(7.5));
  CHECK(cfg.get_int("nosuch", "key", -3) == -3);
  CHECK_FALSE(cfg.has("mesh", "absent"));
  CHECK(cfg.has("mesh", "dim"));
}

TEST_CASE("round trip: parse -> serialize -> parse is identity") {
  const Config a = Config::parse_string(kSample);
  const Config b = Config::parse_string(a.serialize());
  CHECK(a == b);
  CHECK(a.serialize() == b.serialize());
  CHECK(a.hash() == b.hash());
}

TEST_CASE("hash is sensitive to values") {
  Config a = Config::parse_string(kSample);
  Config b = Config::parse_string(kSample);
  b.set("drift", "beta", "2.0");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("fnv1a known values") {
  // Standard FNV-1a 64-bit test vectors.
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("unknown keys are named in the error") {
  const Config cfg = Config::parse_string("[mesh]\ndim = 2\ntypo_key = 1\n");
  CHECK_THROWS_WITH_AS(cfg.require_known("mesh", {"dim"}),
                       doctest::Contains("typo_key"), ConfigError);
  CHECK_NOTHROW(cfg.require_known("mesh", {"dim", "typo_key"}));
  CHECK_THROWS_AS(cfg.require_sections({"drift"}), ConfigError);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(Config::parse_string("[mesh\ndim=2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("dim = 2\n"), ConfigError);  // key outside section
  CHECK_THROWS_AS(Config::parse_string("[m]\nnot a pair\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_file("/nonexistent/driftlab.cfg"), ConfigError);
  const Config cfg = Config::parse_string("[m]\nk = abc\n");
  CHECK_THROWS_AS(cfg.get_real("m", "k", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("m", "k", 0), ConfigError);
}

TEST_CASE("set inserts and overwrites") {
  Config cfg;
  cfg.set("s", "k", "1");
  cfg.set("s", "k", "2");
  cfg.set("s", "j", "3");
  CHECK(cfg.get_int("s", "k", 0) == 2);
  CHECK(cfg.serialize() == "[s]\nk = 2\nj = 3\n");
}

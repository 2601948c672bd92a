#include <doctest.h>

#include <sstream>

#include "mfed/error.hpp"
#include "mfed/trace_io.hpp"
#include "support.hpp"

using namespace mfed;

TEST_SUITE("io") {
  TEST_CASE("four-row trace") {
    std::istringstream in("t_ms,ax,ay,az\n0,-1.5,0.25,9.8\n40,-2,0,9.81\n80,0,1e-3,9.7\n120,3,-4,5\n");
    const auto s = read_trace(in, 25);
    REQUIRE(s.size() == 4);
    CHECK(s.rate == 25);
    CHECK(s.samples[1].t == doctest::Approx(0.04));
    CHECK(s.samples[0].ax == -1.5);
    CHECK(s.samples[2].ay == 1e-3);
    CHECK(s.samples[3].az == 5);
  }

  TEST_CASE("non-monotonic timestamp reports its line") {
    std::istringstream in("t_ms,ax,ay,az\n0,0,0,0\n40,0,0,0\n40,0,0,0\n");
    try {
      read_trace(in, 25);
      FAIL("expected NonMonotonicTimestamp");
    } catch (const NonMonotonicTimestamp& e) {
      CHECK(e.line() == 4);
    }
  }

  TEST_CASE("malformed rows") {
    std::istringstream bad_field("t_ms,ax,ay,az\n0,0,x,0\n");
    CHECK_THROWS_AS(read_trace(bad_field, 25), ParseError);
    std::istringstream short_row("t_ms,ax,ay,az\n0,0,0\n");
    CHECK_THROWS_AS(read_trace(short_row, 25), ParseError);
    std::istringstream no_header("0,0,0,0\n");
    CHECK_THROWS_AS(read_trace(no_header, 25), ParseError);
    CHECK_THROWS_AS(load_trace("/nonexistent/trace.csv", 25), FormatError);
  }

  TEST_CASE("annotations") {
    std::istringstream empty("");
    CHECK(read_annotations(empty).empty());
    std::istringstream header_only("t_ms\n");
    CHECK(read_annotations(header_only).empty());
    std::istringstream two("t_ms\n1000\n1000\n");
    CHECK(read_annotations(two) == std::vector<Seconds>{1.0, 1.0});
    std::istringstream back("t_ms\n2000\n1000\n");
    CHECK_THROWS_AS(read_annotations(back), NonMonotonicTimestamp);
  }

  TEST_CASE("round trip through files") {
    testing::TempDir dir;
    std::mt19937_64 rng(1);
    auto s = testing::random_trace(rng);
    for (auto& p : s.samples) p.t = to_ms(p.t) / 1000.0;
    save_trace(dir.file("t.csv"), s);
    const auto back = load_trace(dir.file("t.csv"), 25);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      REQUIRE(back.samples[i].t == s.samples[i].t);
      REQUIRE(back.samples[i].ax == s.samples[i].ax);
      REQUIRE(back.samples[i].az == s.samples[i].az);
    }
    save_annotations(dir.file("a.csv"), {1.5, 2.25});
    CHECK(load_annotations(dir.file("a.csv")) == std::vector<Seconds>{1.5, 2.25});
  }

  TEST_CASE("millisecond rounding") {
    CHECK(to_ms(0.0005) == 1);
    CHECK(to_ms(1.2344) == 1234);
    CHECK(to_ms(-0.0005) == -1);
  }
}

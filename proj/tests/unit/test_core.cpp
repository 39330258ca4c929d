#include "doctest.h"

#include "bsedepth/core.hpp"
#include "bsedepth/rng.hpp"

using namespace bsedepth;

TEST_CASE("raster rejects a buffer of the wrong size") {
  CHECK_THROWS_AS(GrayImage(3, 2, std::vector<std::uint8_t>(5)), StructuralError);
  CHECK_THROWS_AS(GrayImage(0, 2, std::vector<std::uint8_t>{}), StructuralError);
  GrayImage ok(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
  CHECK(ok(2, 1) == 6);
  CHECK(ok.row(1)[0] == 4);
}

TEST_CASE("binary masks only hold 0 and 1") {
  CHECK_THROWS_AS(BinaryMask(2, 1, std::vector<std::uint8_t>{0, 2}), StructuralError);
  CHECK(mask_count(make_mask(2, 2, {true, false, true, true})) == 3);
}

TEST_CASE("mask pair shapes must agree") {
  CHECK_THROWS_AS(MaskPair(BinaryMask(4, 4, std::uint8_t{1}), BinaryMask(4, 5, std::uint8_t{1})), StructuralError);
}

TEST_CASE("enum names round trip") {
  for (auto q : kAllQuadrants) CHECK(parse_quadrant(to_string(q)) == q);
  for (auto c : kAllCups) CHECK(parse_cup(to_string(c)) == c);
  for (auto l : kAllLevels) CHECK(parse_pressure_level(to_string(l)) == l);
  CHECK(to_string(Quadrant::LeftQ2) == "Left_Q2");
  CHECK_FALSE(parse_quadrant("Left_Q1").has_value());
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(0), b(0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(Rng(0).next_u64() != Rng(1).next_u64());
}

TEST_CASE("rng split gives reproducible, distinct streams") {
  Rng parent1(42), parent2(42);
  Rng c1 = parent1.split(), c2 = parent2.split();
  std::vector<std::uint64_t> s1, s2, p;
  for (int i = 0; i < 20; ++i) {
    s1.push_back(c1.next_u64());
    s2.push_back(c2.next_u64());
    p.push_back(parent1.next_u64());
  }
  CHECK(s1 == s2);
  CHECK(s1 != p);
}

TEST_CASE("rng draws stay in range") {
  Rng r(3);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
    sum += r.normal();
  }
  CHECK(std::abs(sum / 10000) < 0.05);
}

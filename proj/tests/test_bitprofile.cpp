#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "p2plab/bitprofile.hpp"

using namespace p2plab;

TEST_CASE("profile bit basics") {
  PieceProfile p(5);
  CHECK(p.k() == 5);
  CHECK(p.empty());
  CHECK(p.count() == 0);
  p.set(0);
  p.set(3);
  CHECK(p.has(0));
  CHECK(!p.has(1));
  CHECK(p.has(3));
  CHECK(p.count() == 2);
  p.reset(3);
  CHECK(!p.has(3));
  CHECK(p.count() == 1);
  CHECK(!p.is_complete());
}

TEST_CASE("complete profile") {
  auto p = PieceProfile::complete(7);
  CHECK(p.count() == 7);
  CHECK(p.is_complete());
  p.reset(6);
  CHECK(!p.is_complete());
}

TEST_CASE("string round trip") {
  auto p = PieceProfile::from_string("10110");
  CHECK(p.k() == 5);
  CHECK(p.has(0));
  CHECK(!p.has(1));
  CHECK(p.has(2));
  CHECK(p.has(3));
  CHECK(!p.has(4));
  CHECK(p.to_string() == "10110");
  CHECK_THROWS_AS(PieceProfile::from_string("10x"), std::invalid_argument);
}

TEST_CASE("width limits") {
  CHECK_THROWS_AS(PieceProfile(0), std::invalid_argument);
  CHECK_THROWS_AS(PieceProfile(129), std::invalid_argument);
  PieceProfile wide(128);
  wide.set(127);
  CHECK(wide.has(127));
  CHECK(wide.count() == 1);
  CHECK(wide.word(1) == (1ULL << 63));
}

TEST_CASE("profile equality and with") {
  auto a = PieceProfile::from_string("10");
  auto b = PieceProfile::from_string("10");
  CHECK(a == b);
  CHECK(a.with(1) != b);
  CHECK(a.with(1).is_complete());
  CHECK(a.count() == 1);  // with() copies

  // Same bits, different width: distinct profiles.
  PieceProfile k2(2), k3(3);
  CHECK(k2 != k3);
  CHECK(ProfileHash{}(k2) != ProfileHash{}(k3));
}

TEST_CASE("useful piece sets") {
  SUBCASE("superset uploader") {
    auto u = useful_pieces(PieceProfile::from_string("11"), PieceProfile::from_string("00"));
    CHECK(u.count() == 2);
    CHECK(u.indices() == std::vector<int>{0, 1});
  }
  SUBCASE("identical profiles") {
    auto u = useful_pieces(PieceProfile::from_string("10"), PieceProfile::from_string("10"));
    CHECK(u.empty());
    CHECK(u.indices().empty());
  }
  SUBCASE("bitwise and-not") {
    auto u = useful_pieces(PieceProfile::from_string("101"), PieceProfile::from_string("011"));
    CHECK(u.count() == 1);
    CHECK(u.contains(0));
    CHECK(!u.contains(2));
    CHECK(u.nth(0) == 0);
  }
  SUBCASE("width mismatch is a contract violation") {
    CHECK_THROWS_AS(useful_pieces(PieceProfile(2), PieceProfile(3)), std::invalid_argument);
  }
}

TEST_CASE("useful set nth spans both words") {
  PieceProfile u(128), t(128);
  u.set(3);
  u.set(70);
  u.set(127);
  t.set(3);
  auto s = useful_pieces(u, t);
  CHECK(s.count() == 2);
  CHECK(s.nth(0) == 70);
  CHECK(s.nth(1) == 127);
  CHECK(s.indices() == std::vector<int>{70, 127});
}

TEST_CASE("emptiness characterizes subset") {
  // useful_pieces(u, t) empty iff u's pieces are all held by t.
  for (int u_bits = 0; u_bits < 8; ++u_bits)
    for (int t_bits = 0; t_bits < 8; ++t_bits) {
      PieceProfile u(3), t(3);
      for (int i = 0; i < 3; ++i) {
        if (u_bits & (1 << i)) u.set(i);
        if (t_bits & (1 << i)) t.set(i);
      }
      const bool subset = (u_bits & ~t_bits) == 0;
      CHECK(useful_pieces(u, t).empty() == subset);
    }
}

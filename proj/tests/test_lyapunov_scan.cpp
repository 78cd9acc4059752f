#include "doctest.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "p2plab/lyapunov.hpp"

using namespace p2plab;

namespace {

const LyapunovConstants kUnit{1, 1, 1, 1, Rational(1, 4)};
const LyapunovConstants kSkewed{2, 8, 1, Rational(1, 2), Rational(1, 18)};
const Rates kSlowArrivals{Rational(1, 10), 2, 1};

Rational naive_shell_max(long long s, const LyapunovConstants& c, const Rates& r) {
  Rational best = drift({s, 0, 0}, c, r);
  for (long long n0 = 0; n0 <= s; ++n0)
    for (long long n1 = 0; n0 + n1 <= s; ++n1)
      best = std::max(best, drift({n0, n1, s - n0 - n1}, c, r));
  return best;
}

}  // namespace

TEST_CASE("full scan with a known sign change at shell one") {
  auto res = drift_scan(kUnit, kSlowArrivals, {0, 1, 2, 3, 4, 5}, ScanMode::full);
  REQUIRE(res.shells.size() == 6);
  CHECK(res.mode == ScanMode::full);

  CHECK(res.shells[0].max_dv == Rational(3, 10));
  CHECK(res.shells[0].argmax == TypeCountState{0, 0, 0});
  CHECK(res.shells[1].max_dv == Rational(-11, 10));
  CHECK(res.shells[1].argmax == TypeCountState{1, 0, 0});
  for (std::size_t i = 1; i < res.shells.size(); ++i) CHECK(res.shells[i].max_dv < 0);

  REQUIRE(res.s0.has_value());
  CHECK(*res.s0 == 1);
  REQUIRE(res.epsilon.has_value());
  CHECK(*res.epsilon == Rational(11, 10));
  REQUIRE(res.b_bound.has_value());
  CHECK(*res.b_bound == Rational(3, 10));
  REQUIRE(res.b_argmax.has_value());
  CHECK(*res.b_argmax == TypeCountState{0, 0, 0});
}

TEST_CASE("full scan maxima match plain enumeration") {
  std::vector<long long> shells;
  for (long long s = 1; s <= 12; ++s) shells.push_back(s);
  auto res = drift_scan(kSkewed, kSlowArrivals, shells, ScanMode::full);
  REQUIRE(res.shells.size() == shells.size());
  for (const auto& stat : res.shells) {
    CHECK(stat.max_dv == naive_shell_max(stat.s, kSkewed, kSlowArrivals));
    CHECK(drift(stat.argmax, kSkewed, kSlowArrivals) == stat.max_dv);
    CHECK(stat.argmax.s() == stat.s);
  }

  // Re-derive the tail bookkeeping from the reported maxima.
  std::size_t first_neg = res.shells.size();
  while (first_neg > 0 && res.shells[first_neg - 1].max_dv < 0) --first_neg;
  if (first_neg == res.shells.size()) {
    CHECK(!res.s0.has_value());
    CHECK(!res.epsilon.has_value());
    CHECK(!res.b_bound.has_value());
  } else {
    REQUIRE(res.s0.has_value());
    CHECK(*res.s0 == res.shells[first_neg].s);
    Rational tail = res.shells[first_neg].max_dv;
    for (std::size_t i = first_neg; i < res.shells.size(); ++i)
      tail = std::max(tail, res.shells[i].max_dv);
    CHECK(*res.epsilon == -tail);
  }
}

TEST_CASE("scan survives constants too large for the fast path") {
  LyapunovConstants huge = kUnit;
  huge.c2 = Rational(BigInt("10000000000000000000"));  // over 63 bits once scaled
  auto res = drift_scan(huge, kSlowArrivals, {3, 4}, ScanMode::full);
  REQUIRE(res.shells.size() == 2);
  CHECK(res.shells[0].max_dv == naive_shell_max(3, huge, kSlowArrivals));
  CHECK(res.shells[1].max_dv == naive_shell_max(4, huge, kSlowArrivals));
}

TEST_CASE("grid scan equals the full scan while the lattice is dense") {
  // Below s = 20 the interior lattice step is 1, so the grid covers the
  // whole shell and every reported number must coincide.
  auto full = drift_scan(kUnit, kSlowArrivals, {0, 1, 2, 3, 4, 5}, ScanMode::full);
  auto grid = drift_scan(kUnit, kSlowArrivals, {0, 1, 2, 3, 4, 5}, ScanMode::grid);
  CHECK(grid.mode == ScanMode::grid);
  REQUIRE(grid.shells.size() == full.shells.size());
  for (std::size_t i = 0; i < full.shells.size(); ++i)
    CHECK(grid.shells[i].max_dv == full.shells[i].max_dv);
  CHECK(grid.s0 == full.s0);
  CHECK(grid.epsilon == full.epsilon);
  REQUIRE(grid.b_bound.has_value());
  CHECK(*grid.b_bound == Rational(3, 10));
}

TEST_CASE("sparse grid is a subset with a dominated maximum") {
  const long long s = 45;
  auto states = scan_grid_states(s);
  REQUIRE(!states.empty());
  std::set<std::array<long long, 3>> seen;
  for (const auto& st : states) {
    CHECK(st.n0 + st.n1 + st.n2 == s);
    CHECK(st.n0 >= 0);
    CHECK(st.n1 >= 0);
    CHECK(st.n2 >= 0);
    CHECK(seen.insert({st.n0, st.n1, st.n2}).second);  // deduplicated
  }
  CHECK(states.size() < static_cast<std::size_t>((s + 1) * (s + 2) / 2));
  CHECK(seen.count({45, 0, 0}) == 1);
  CHECK(seen.count({0, 45, 0}) == 1);
  CHECK(seen.count({0, 0, 45}) == 1);
  CHECK(seen.count({22, 23, 0}) == 1);
  CHECK(seen.count({0, 22, 23}) == 1);
  CHECK(seen.count({15, 15, 15}) == 1);
  CHECK(seen.count({16, 15, 14}) == 1);

  auto full = drift_scan(kSkewed, kSlowArrivals, {s}, ScanMode::full);
  auto grid = drift_scan(kSkewed, kSlowArrivals, {s}, ScanMode::grid);
  CHECK(grid.shells[0].max_dv <= full.shells[0].max_dv);
  Rational naive_grid = drift(states.front(), kSkewed, kSlowArrivals);
  for (const auto& st : states)
    naive_grid = std::max(naive_grid, drift(st, kSkewed, kSlowArrivals));
  CHECK(grid.shells[0].max_dv == naive_grid);
}

TEST_CASE("shell list hygiene") {
  CHECK_THROWS_AS(drift_scan(kUnit, kSlowArrivals, {}, ScanMode::full),
                  std::invalid_argument);
  CHECK_THROWS_AS(drift_scan(kUnit, kSlowArrivals, {-1, 3}, ScanMode::full),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan_grid_states(-2), std::invalid_argument);

  auto res = drift_scan(kUnit, kSlowArrivals, {5, 3, 3, 5}, ScanMode::full);
  REQUIRE(res.shells.size() == 2);
  CHECK(res.shells[0].s == 3);
  CHECK(res.shells[1].s == 5);
}

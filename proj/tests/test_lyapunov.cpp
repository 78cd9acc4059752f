#include "doctest.h"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2plab/lyapunov.hpp"

using namespace p2plab;

namespace {

LyapunovConstants paper_scale_constants() {
  return {32, 9693, 20, 10, Rational(1, 19388)};
}

Rates unit_rates(Rational lambda, Rational us) { return {lambda, us, 1}; }

Rational rate_sum(const std::vector<std::pair<Rational, TypeCountState>>& entries,
                  const TypeCountState& next) {
  Rational sum = 0;
  for (const auto& [rate, st] : entries)
    if (st == next) sum += rate;
  return sum;
}

}  // namespace

TEST_CASE("potential terms at pinned states") {
  const auto c = paper_scale_constants();

  SUBCASE("mixed state with deeply negative squares") {
    auto pt = potential({1, 2, 3}, c);
    CHECK(pt.a == Rational(-29045));
    CHECK(pt.b == Rational(-19320));
    CHECK(pt.d == Rational(70));
    CHECK(pt.V == Rational(4900));
  }
  SUBCASE("pure type-0 states") {
    CHECK(potential({1, 0, 0}, c).V == Rational(402));
    CHECK(potential({2, 0, 0}, c).V == Rational(1608));
  }
  SUBCASE("single one-piece peer, both types") {
    auto p1 = potential({0, 1, 0}, c);
    CHECK(p1.a == Rational(32));
    CHECK(p1.b == Rational(-9693));
    CHECK(p1.d == Rational(10));
    CHECK(p1.V == Rational(1124));
    CHECK(potential({0, 0, 1}, c).V == Rational(1124));
  }
  SUBCASE("min and plus parts combine") {
    LyapunovConstants tiny{1, 1, 1, 1, Rational(1, 4)};
    CHECK(potential({2, 3, 1}, tiny).a == Rational(4));
  }
  SUBCASE("origin") { CHECK(potential({0, 0, 0}, c).V == Rational(0)); }
}

TEST_CASE("transition list of the suppression chain") {
  const Rates r = unit_rates(4, 2);

  SUBCASE("empty system only admits arrivals") {
    auto gen = gs_generator_k2({0, 0, 0}, r);
    REQUIRE(gen.size() == 1);
    CHECK(gen[0].first == Rational(4));
    CHECK(gen[0].second == TypeCountState{1, 0, 0});
  }
  SUBCASE("single empty peer") {
    auto gen = gs_generator_k2({1, 0, 0}, r);
    CHECK(gen.size() == 3);
    CHECK(rate_sum(gen, {2, 0, 0}) == Rational(4));
    CHECK(rate_sum(gen, {0, 1, 0}) == Rational(1));
    CHECK(rate_sum(gen, {0, 0, 1}) == Rational(1));
  }
  SUBCASE("dominant type 1 is muted") {
    auto gen = gs_generator_k2({2, 3, 1}, r);
    for (const auto& [rate, next] : gen) CHECK(rate > 0);
    CHECK(rate_sum(gen, {3, 3, 1}) == Rational(4));
    CHECK(rate_sum(gen, {1, 4, 1}) == Rational(1));
    CHECK(rate_sum(gen, {1, 3, 2}) == Rational(4, 3));
    CHECK(rate_sum(gen, {2, 2, 1}) == Rational(1, 2));
    CHECK(rate_sum(gen, {2, 3, 0}) == Rational(0));  // muted completion
    Rational total = 0;
    for (const auto& [rate, next] : gen) total += rate;
    CHECK(total == Rational(41, 6));
  }
  SUBCASE("no empty peers: the seed serves a uniform one-piece target") {
    auto gen = gs_generator_k2({0, 2, 1}, r);
    CHECK(rate_sum(gen, {1, 2, 1}) == Rational(4));
    CHECK(rate_sum(gen, {0, 1, 1}) == Rational(2));  // seed 4/3 + peer 2/3
    CHECK(rate_sum(gen, {0, 2, 0}) == Rational(2, 3));
  }
  SUBCASE("a tie frees every group") {
    auto gen = gs_generator_k2({1, 2, 2}, r);
    // Both one-piece groups upload: four peer transfers on top of arrival
    // and the two seeding halves.
    CHECK(gen.size() == 7);
    CHECK(rate_sum(gen, {1, 2, 1}) == Rational(4, 5));  // type1 completes type2
    CHECK(rate_sum(gen, {1, 1, 2}) == Rational(4, 5));
  }
}

TEST_CASE("drift matches the hand-computed value at a pinned state") {
  const auto c = paper_scale_constants();
  const Rates r = unit_rates(4, 2);
  CHECK(drift({1, 0, 0}, c, r) == Rational(6268));
}

TEST_CASE("constant search at the published operating point") {
  auto consts = find_constants(4, 2);
  CHECK(consts.c1 == Rational(32));
  CHECK(consts.c2 == Rational(9693));
  CHECK(consts.c3 == Rational(20));
  CHECK(consts.c4 == Rational(10));
  CHECK(consts.p == Rational(1, 19388));
  auto ok = check_conditions(consts, 4, 2);
  for (bool b : ok) CHECK(b);
}

TEST_CASE("constant search on a light preset") {
  ConstantPreset preset{20, Rational(25, 2), Rational(25, 4)};
  auto consts = find_constants(Rational(1, 2), 2, preset);
  CHECK(consts.c2 == Rational(525));
  CHECK(consts.p == Rational(1, 1052));
  auto ok = check_conditions(consts, Rational(1, 2), 2);
  for (bool b : ok) CHECK(b);
}

TEST_CASE("constant search rejects impossible presets and rates") {
  CHECK_THROWS_AS(find_constants(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(find_constants(4, -1), std::invalid_argument);
  // c4 >= c3 can never be repaired by growing c2.
  CHECK_THROWS_AS(find_constants(4, 2, ConstantPreset{32, 10, 20}),
                  std::invalid_argument);
  // c1 <= 2 fails the same way.
  CHECK_THROWS_AS(find_constants(4, 2, ConstantPreset{2, 20, 10}),
                  std::invalid_argument);
}

TEST_CASE("individual conditions react to broken constants") {
  auto good = find_constants(Rational(1, 2), 2,
                             ConstantPreset{20, Rational(25, 2), Rational(25, 4)});

  auto broken = good;
  broken.p = Rational(1, 2);
  auto ok = check_conditions(broken, Rational(1, 2), 2);
  CHECK(ok[0]);
  CHECK(!ok[1]);

  broken = good;
  broken.c4 = broken.c3;
  ok = check_conditions(broken, Rational(1, 2), 2);
  CHECK(!ok[2]);

  broken = good;
  broken.c2 = 10;  // below 3 c1
  ok = check_conditions(broken, Rational(1, 2), 2);
  CHECK(!ok[4]);
}

TEST_CASE("potential and drift are blind to the piece labels") {
  const auto c = find_constants(Rational(1, 200), 2);
  const Rates r = unit_rates(4, 2);
  for (long long s = 0; s <= 30; ++s) {
    for (long long n0 = 0; n0 <= s; ++n0) {
      for (long long n1 = 0; n0 + n1 <= s; ++n1) {
        const TypeCountState st{n0, n1, s - n0 - n1};
        const TypeCountState sw{n0, st.n2, st.n1};
        CHECK(potential(st, c).V == potential(sw, c).V);
        CHECK(drift(st, c, r) == drift(sw, c, r));
      }
    }
  }
}

TEST_CASE("term-by-term drift formulas agree with the generator") {
  const auto c = find_constants(Rational(1, 200), 2);
  REQUIRE(c.c2 == Rational(105));
  const Rates r{Rational(1, 200), 2, 1};

  SUBCASE("case labels at pinned states") {
    CHECK(closed_form_case({120, 0, 0}, c) == std::string("1"));
    CHECK(closed_form_case({1, 118, 1}, c) == std::string("3.1"));
    CHECK(closed_form_case({0, 119, 1}, c) == std::string("3.2"));
    CHECK(closed_form_case({2, 59, 59}, c) == std::string("4.3"));
    CHECK(closed_form_case({0, 60, 60}, c) == std::string("4.4"));
    CHECK(closed_form_case({1, 1, 118}, c) == std::string("3.1m"));
    CHECK(closed_form_case({0, 1, 119}, c) == std::string("3.2m"));
    CHECK(!closed_form_case({1, 2, 1}, c).has_value());
    CHECK(!closed_form_case({50, 35, 35}, c).has_value());
  }

  SUBCASE("exact equality across a whole shell") {
    std::set<std::string> labels;
    const long long s = 120;
    long long covered = 0;
    for (long long n0 = 0; n0 <= s; ++n0) {
      for (long long n1 = 0; n0 + n1 <= s; ++n1) {
        const TypeCountState st{n0, n1, s - n0 - n1};
        auto label = closed_form_case(st, c);
        auto formula = closed_form_drift(st, c, r);
        REQUIRE(label.has_value() == formula.has_value());
        if (!formula) continue;
        labels.insert(*label);
        ++covered;
        CHECK(*formula == drift(st, c, r));
      }
    }
    CHECK(covered > 1000);
    CHECK(labels == std::set<std::string>{"1", "3.1", "3.2", "4.3", "4.4", "3.1m",
                                          "3.2m"});
  }
}

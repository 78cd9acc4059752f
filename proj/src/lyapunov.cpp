#include "p2plab/lyapunov.hpp"

#include <algorithm>
#include <stdexcept>

namespace p2plab {

namespace {

Rational plus(const Rational& x) { return x > 0 ? x : Rational(0); }

// Strictly largest type among the present groups; -1 on tie or empty system.
// Type 0 counts as a group of its own.
int strictly_largest_type(const TypeCountState& st) {
  long long best = std::max({st.n0, st.n1, st.n2});
  if (best == 0) return -1;
  int who = -1;
  int hits = 0;
  for (int i = 0; i < 3; ++i) {
    long long n = i == 0 ? st.n0 : (i == 1 ? st.n1 : st.n2);
    if (n == best) {
      ++hits;
      who = i;
    }
  }
  return hits == 1 ? who : -1;
}

}  // namespace

PotentialTerms potential(const TypeCountState& st, const LyapunovConstants& c) {
  Rational n0(st.n0), n1(st.n1), n2(st.n2);
  Rational a = n0 + std::min(st.n0, st.n1) + c.c1 * plus(n1 - n0) - c.c2 * n2;
  Rational b = n0 + std::min(st.n0, st.n2) + c.c1 * plus(n2 - n0) - c.c2 * n1;
  Rational d = c.c3 * n0 + c.c4 * n1 + c.c4 * n2;
  Rational ap = plus(a), bp = plus(b);
  return {a, b, d, ap * ap + bp * bp + d * d};
}

std::vector<std::pair<Rational, TypeCountState>> gs_generator_k2(const TypeCountState& st,
                                                                 const Rates& r) {
  std::vector<std::pair<Rational, TypeCountState>> out;
  const long long s = st.s();

  out.push_back({r.lambda, {st.n0 + 1, st.n1, st.n2}});

  if (st.n0 > 0) {
    // Most-deprived seeding: a type-0 peer gets piece 1 or piece 2.
    out.push_back({r.us / 2, {st.n0 - 1, st.n1 + 1, st.n2}});
    out.push_back({r.us / 2, {st.n0 - 1, st.n1, st.n2 + 1}});
  } else if (s > 0) {
    // Everyone holds one piece; the seed's uniform target departs.
    if (st.n1 > 0) out.push_back({r.us * st.n1 / s, {st.n0, st.n1 - 1, st.n2}});
    if (st.n2 > 0) out.push_back({r.us * st.n2 / s, {st.n0, st.n1, st.n2 - 1}});
  }

  if (s > 0) {
    const int club = strictly_largest_type(st);
    // Type-1 uploads piece 1: a type-0 target joins type 1, a type-2 target
    // completes and departs. Suppressed while type 1 is the strict largest.
    if (club != 1) {
      if (st.n1 > 0 && st.n0 > 0)
        out.push_back({r.mu * st.n1 * st.n0 / s, {st.n0 - 1, st.n1 + 1, st.n2}});
      if (st.n1 > 0 && st.n2 > 0)
        out.push_back({r.mu * st.n1 * st.n2 / s, {st.n0, st.n1, st.n2 - 1}});
    }
    if (club != 2) {
      if (st.n2 > 0 && st.n0 > 0)
        out.push_back({r.mu * st.n2 * st.n0 / s, {st.n0 - 1, st.n1, st.n2 + 1}});
      if (st.n2 > 0 && st.n1 > 0)
        out.push_back({r.mu * st.n2 * st.n1 / s, {st.n0, st.n1 - 1, st.n2}});
    }
  }

  return out;
}

Rational drift(const TypeCountState& st, const LyapunovConstants& c, const Rates& r) {
  const Rational v0 = potential(st, c).V;
  Rational dv = 0;
  for (const auto& [rate, next] : gs_generator_k2(st, r))
    dv += rate * (potential(next, c).V - v0);
  return dv;
}

std::array<bool, 10> check_conditions(const LyapunovConstants& c, const Rational& lambda,
                                      const Rational& us) {
  std::array<bool, 10> ok{};
  ok[0] = c.c1 > 0 && c.c2 > 0 && c.c3 > 0 && c.c4 > 0 && c.p > 0;
  ok[1] = c.p > 0 && c.p < Rational(1, 2);
  ok[2] = c.c4 < c.c3;
  ok[3] = Rational(2) < c.c1;
  ok[4] = 3 * c.c1 < c.c2;
  ok[5] = c.p * c.c2 < 1 - c.p;
  ok[6] = lambda * c.c3 * c.c3 <
          (1 - c.p * (1 + c.c2)) * (us * (1 + c.c2) - 2 * lambda);
  ok[7] = 2 * (c.c1 - 1) < c.c4 * (c.c3 - c.c4);
  ok[8] = 2 * c.c3 * c.c3 < (c.c1 - 2) * (c.c1 - 2);
  ok[9] = lambda * c.c3 * c.c3 < us * (c.c2 - 3 * c.c1 + 4) / 12;
  return ok;
}

LyapunovConstants find_constants(const Rational& lambda, const Rational& us,
                                 const ConstantPreset& preset) {
  if (lambda <= 0 || us <= 0) throw std::invalid_argument("rates must be positive");

  // Lower bounds on c2 from the three conditions that involve it, with
  // p = 1/(2(1+c2)) folded into the seventh: lambda c3^2 < (us (1+c2) - 2 lambda)/2.
  const Rational bound5 = 3 * preset.c1;
  const Rational bound7 = (2 * lambda * preset.c3 * preset.c3 + 2 * lambda) / us - 1;
  const Rational bound10 = 3 * preset.c1 - 4 + 12 * lambda * preset.c3 * preset.c3 / us;

  BigInt c2 = floor_plus_one(std::max({bound5, bound7, bound10}));
  for (;;) {
    LyapunovConstants consts{preset.c1, Rational(c2), preset.c3, preset.c4,
                             Rational(1, 2 * (1 + c2))};
    auto ok = check_conditions(consts, lambda, us);
    bool all = true;
    for (bool b : ok) all = all && b;
    if (all) return consts;
    // The preset fixes conditions that do not involve c2; growing c2 cannot
    // repair those, so fail fast instead of searching forever.
    if (!ok[2] || !ok[3] || !ok[7] || !ok[8])
      throw std::invalid_argument("preset (c1,c3,c4) violates a c2-independent condition");
    ++c2;
  }
}

namespace {

struct CaseFlags {
  const TypeCountState& st;
  const LyapunovConstants& c;
  PotentialTerms pt;

  CaseFlags(const TypeCountState& s, const LyapunovConstants& consts)
      : st(s), c(consts), pt(potential(s, consts)) {}

  // Every plus-part stays active (dominant type 0).
  bool deep_case1() const {
    return st.n0 >= std::max(st.n1, st.n2) + 2 && pt.a >= 1 + c.c2 && pt.b >= 1 + c.c2;
  }

  // Dominant type 1 with type-0 peers present.
  bool deep_case31() const {
    return st.n0 >= 1 && st.n1 >= st.n0 + 1 && st.n1 >= st.n2 + 1 &&
           pt.a >= c.c2 - c.c1 + 2 && pt.b <= -(2 + 2 * c.c1 + c.c2);
  }

  // Dominant type 1, no type-0 peers.
  bool deep_case32() const {
    return st.n0 == 0 && st.n1 >= st.n2 + 1 && st.n1 >= 1 && pt.a >= c.c1 &&
           pt.b <= -(2 + 2 * c.c1 + c.c2);
  }

  // n1 = n2 tie above n0 > 0: both square terms dead everywhere.
  bool deep_case43() const {
    return st.n0 >= 1 && st.n1 == st.n2 && st.n1 >= st.n0 + 1 &&
           pt.a <= -(2 + 2 * c.c1 + c.c2) && pt.b <= -(2 + 2 * c.c1 + c.c2);
  }

  bool deep_case44() const {
    return st.n0 == 0 && st.n1 == st.n2 && st.n1 >= 1 &&
           pt.a <= -(2 + 2 * c.c1 + c.c2) && pt.b <= -(2 + 2 * c.c1 + c.c2);
  }
};

Rational case1_formula(const TypeCountState& st, const LyapunovConstants& c, const Rates& r,
                       const PotentialTerms& pt) {
  const Rational a = pt.a, b = pt.b, d = pt.d;
  const Rational s(st.s());
  Rational dv = r.lambda * ((2 * a + 1) + (2 * b + 1) + c.c3 * (2 * d + c.c3));
  const Rational seed_a = (1 + c.c2) * (-2 * a + 1 + c.c2) +
                          (c.c3 - c.c4) * (-2 * d + c.c3 - c.c4);
  const Rational seed_b = (1 + c.c2) * (-2 * b + 1 + c.c2) +
                          (c.c3 - c.c4) * (-2 * d + c.c3 - c.c4);
  dv += r.us / 2 * seed_a;
  dv += r.us / 2 * seed_b;
  dv += r.mu * st.n2 * st.n0 / s * seed_a;
  dv += r.mu * st.n1 * st.n0 / s * seed_b;
  dv += r.mu * st.n1 * st.n2 / s *
        (c.c2 * (2 * a + c.c2) + c.c4 * (-2 * d + c.c4) + (-2 * b + 1));
  dv += r.mu * st.n2 * st.n1 / s *
        (c.c2 * (2 * b + c.c2) + c.c4 * (-2 * d + c.c4) + (-2 * a + 1));
  return dv;
}

Rational case31_formula(const TypeCountState& st, const LyapunovConstants& c, const Rates& r,
                        const PotentialTerms& pt) {
  const Rational a = pt.a, d = pt.d;
  const Rational s(st.s());
  Rational dv = r.lambda * ((c.c1 - 2) * (-2 * a + c.c1 - 2) + c.c3 * (2 * d + c.c3));
  dv += r.us / 2 *
        ((2 * c.c1 - 2) * (2 * a + 2 * c.c1 - 2) +
         (c.c3 - c.c4) * (-2 * d + c.c3 - c.c4));
  const Rational to_type2 = (c.c2 - c.c1 + 2) * (-2 * a + c.c2 - c.c1 + 2) +
                            (c.c3 - c.c4) * (-2 * d + c.c3 - c.c4);
  dv += r.us / 2 * to_type2;
  dv += r.mu * st.n2 * st.n0 / s * to_type2;
  dv += r.mu * st.n2 * st.n1 / s * (c.c1 * (-2 * a + c.c1) + c.c4 * (-2 * d + c.c4));
  return dv;
}

Rational case32_formula(const TypeCountState& st, const LyapunovConstants& c, const Rates& r,
                        const PotentialTerms& pt) {
  const Rational a = pt.a, d = pt.d;
  const Rational s(st.s());
  const Rational departs_type1 = c.c1 * (-2 * a + c.c1) + c.c4 * (-2 * d + c.c4);
  Rational dv = r.lambda * ((c.c1 - 2) * (-2 * a + c.c1 - 2) + c.c3 * (2 * d + c.c3));
  dv += r.us * st.n1 / s * departs_type1;
  dv += r.us * st.n2 / s * (c.c2 * (2 * a + c.c2) + c.c4 * (-2 * d + c.c4));
  dv += r.mu * st.n2 * st.n1 / s * departs_type1;
  return dv;
}

Rational case43_formula(const TypeCountState& st, const LyapunovConstants& c, const Rates& r,
                        const PotentialTerms& pt) {
  const Rational d = pt.d;
  const Rational s(st.s());
  const Rational shift = (c.c3 - c.c4) * (-2 * d + c.c3 - c.c4);
  const Rational depart = c.c4 * (-2 * d + c.c4);
  Rational dv = r.lambda * c.c3 * (2 * d + c.c3);
  dv += r.us / 2 * shift;
  dv += r.us / 2 * shift;
  dv += r.mu * st.n2 * st.n0 / s * shift;
  dv += r.mu * st.n1 * st.n0 / s * shift;
  dv += r.mu * st.n2 * st.n1 / s * depart;
  dv += r.mu * st.n1 * st.n2 / s * depart;
  return dv;
}

Rational case44_formula(const TypeCountState& st, const LyapunovConstants& c, const Rates& r,
                        const PotentialTerms& pt) {
  const Rational d = pt.d;
  const Rational s(st.s());
  const Rational depart = c.c4 * (-2 * d + c.c4);
  Rational dv = r.lambda * c.c3 * (2 * d + c.c3);
  dv += r.us * st.n1 / s * depart;
  dv += r.us * st.n2 / s * depart;
  dv += r.mu * st.n2 * st.n1 / s * depart;
  dv += r.mu * st.n1 * st.n2 / s * depart;
  return dv;
}

}  // namespace

std::optional<std::string> closed_form_case(const TypeCountState& st,
                                            const LyapunovConstants& c) {
  CaseFlags f(st, c);
  if (f.deep_case1()) return "1";
  if (f.deep_case31()) return "3.1";
  if (f.deep_case32()) return "3.2";
  if (f.deep_case43()) return "4.3";
  if (f.deep_case44()) return "4.4";
  TypeCountState sw{st.n0, st.n2, st.n1};
  CaseFlags g(sw, c);
  if (g.deep_case31()) return "3.1m";
  if (g.deep_case32()) return "3.2m";
  return std::nullopt;
}

std::optional<Rational> closed_form_drift(const TypeCountState& st,
                                          const LyapunovConstants& c, const Rates& r) {
  CaseFlags f(st, c);
  if (f.deep_case1()) return case1_formula(st, c, r, f.pt);
  if (f.deep_case31()) return case31_formula(st, c, r, f.pt);
  if (f.deep_case32()) return case32_formula(st, c, r, f.pt);
  if (f.deep_case43()) return case43_formula(st, c, r, f.pt);
  if (f.deep_case44()) return case44_formula(st, c, r, f.pt);
  // The potential is symmetric in n1<->n2, so dominant-type-2 states reuse
  // the dominant-type-1 formulas on the swapped state.
  TypeCountState sw{st.n0, st.n2, st.n1};
  CaseFlags g(sw, c);
  if (g.deep_case31()) return case31_formula(sw, c, r, g.pt);
  if (g.deep_case32()) return case32_formula(sw, c, r, g.pt);
  return std::nullopt;
}

}  // namespace p2plab

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <stdexcept>

#include "p2plab/lyapunov.hpp"

namespace p2plab {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::lcm;
using boost::multiprecision::numerator;

long long sq_safe_ll(const BigInt& v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw std::overflow_error("scaled constant exceeds 64 bits");
  return v.convert_to<long long>();
}

__int128 sq(long long x) { return static_cast<__int128>(x) * x; }

// Evaluates DV * (2 s Q D^2) in integers, where D clears the potential
// constants and Q clears the rates. Valid only when the precomputed magnitude
// guard holds for the largest shell in play.
struct IntEval {
  long long c1D = 0, c2D = 0, c3D = 0, c4D = 0, D = 1;
  long long lamQ = 0, usQ = 0, muQ = 0;

  long long aD(long long n0, long long n1, long long n2) const {
    long long v = n0 * D + std::min(n0, n1) * D;
    if (n1 > n0) v += c1D * (n1 - n0);
    return v - c2D * n2;
  }

  __int128 vd2(long long n0, long long n1, long long n2) const {
    const long long a = aD(n0, n1, n2);
    const long long b = aD(n0, n2, n1);
    const long long d = c3D * n0 + c4D * (n1 + n2);
    __int128 v = sq(d);
    if (a > 0) v += sq(a);
    if (b > 0) v += sq(b);
    return v;
  }

  __int128 dv_scaled(long long n0, long long n1, long long n2) const {
    const long long s = n0 + n1 + n2;
    const __int128 v0 = vd2(n0, n1, n2);
    __int128 acc = static_cast<__int128>(2) * s * lamQ * (vd2(n0 + 1, n1, n2) - v0);
    if (n0 > 0) {
      acc += static_cast<__int128>(usQ) * s * (vd2(n0 - 1, n1 + 1, n2) - v0);
      acc += static_cast<__int128>(usQ) * s * (vd2(n0 - 1, n1, n2 + 1) - v0);
    } else {
      if (n1 > 0) acc += static_cast<__int128>(2) * usQ * n1 * (vd2(n0, n1 - 1, n2) - v0);
      if (n2 > 0) acc += static_cast<__int128>(2) * usQ * n2 * (vd2(n0, n1, n2 - 1) - v0);
    }
    const long long best = std::max({n0, n1, n2});
    const int hits = (n0 == best) + (n1 == best) + (n2 == best);
    const bool club1 = hits == 1 && n1 == best;
    const bool club2 = hits == 1 && n2 == best;
    if (!club1 && n1 > 0) {
      if (n0 > 0)
        acc += static_cast<__int128>(2) * muQ * n1 * n0 * (vd2(n0 - 1, n1 + 1, n2) - v0);
      if (n2 > 0)
        acc += static_cast<__int128>(2) * muQ * n1 * n2 * (vd2(n0, n1, n2 - 1) - v0);
    }
    if (!club2 && n2 > 0) {
      if (n0 > 0)
        acc += static_cast<__int128>(2) * muQ * n2 * n0 * (vd2(n0 - 1, n1, n2 + 1) - v0);
      if (n1 > 0)
        acc += static_cast<__int128>(2) * muQ * n2 * n1 * (vd2(n0, n1 - 1, n2) - v0);
    }
    return acc;
  }
};

std::optional<IntEval> make_int_eval(const LyapunovConstants& c, const Rates& r,
                                     long long max_s) {
  try {
    BigInt D = lcm(lcm(denominator(c.c1), denominator(c.c2)),
                   lcm(denominator(c.c3), denominator(c.c4)));
    BigInt Q = lcm(lcm(denominator(r.lambda), denominator(r.us)), denominator(r.mu));
    IntEval e;
    e.D = sq_safe_ll(D);
    e.c1D = sq_safe_ll(numerator(c.c1) * (D / denominator(c.c1)));
    e.c2D = sq_safe_ll(numerator(c.c2) * (D / denominator(c.c2)));
    e.c3D = sq_safe_ll(numerator(c.c3) * (D / denominator(c.c3)));
    e.c4D = sq_safe_ll(numerator(c.c4) * (D / denominator(c.c4)));
    e.lamQ = sq_safe_ll(numerator(r.lambda) * (Q / denominator(r.lambda)));
    e.usQ = sq_safe_ll(numerator(r.us) * (Q / denominator(r.us)));
    e.muQ = sq_safe_ll(numerator(r.mu) * (Q / denominator(r.mu)));
    if (e.c1D < 0 || e.c2D < 0 || e.c3D < 0 || e.c4D < 0 || e.lamQ < 0 || e.usQ < 0 ||
        e.muQ < 0)
      return std::nullopt;

    const long double s = static_cast<long double>(std::max<long long>(max_s, 1)) + 1;
    const long double coef =
        2.0L * e.D + static_cast<long double>(e.c1D) + e.c2D + e.c3D + e.c4D;
    const long double amax = s * coef;
    if (amax > 9.0e18L) return std::nullopt;
    const long double vmax = 3 * amax * amax;
    const long double dvmax = 2 * (2 * amax * coef + coef * coef);
    const long double ratemax =
        2.0L * std::max({e.lamQ, e.usQ, e.muQ}) * s * std::max(s / 2, 2.0L);
    if (8 * ratemax * dvmax > 8.0e36L || vmax > 8.0e36L) return std::nullopt;
    return e;
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

struct ShellScan {
  TypeCountState argmax;
  Rational max_dv;
};

// Max drift over an explicit state list (all in the same shell); exact.
ShellScan scan_states_exact(const std::vector<TypeCountState>& states,
                            const LyapunovConstants& c, const Rates& r) {
  ShellScan best{states.front(), drift(states.front(), c, r)};
  for (size_t i = 1; i < states.size(); ++i) {
    Rational dv = drift(states[i], c, r);
    if (dv > best.max_dv) {
      best.max_dv = dv;
      best.argmax = states[i];
    }
  }
  return best;
}

ShellScan scan_shell_full(long long s, const LyapunovConstants& c, const Rates& r,
                          const std::optional<IntEval>& fast) {
  if (s == 0) return {{0, 0, 0}, drift({0, 0, 0}, c, r)};
  if (fast) {
    TypeCountState arg{s, 0, 0};
    __int128 best = fast->dv_scaled(s, 0, 0);
    for (long long n0 = 0; n0 <= s; ++n0) {
      for (long long n1 = 0; n0 + n1 <= s; ++n1) {
        const __int128 dv = fast->dv_scaled(n0, n1, s - n0 - n1);
        if (dv > best) {
          best = dv;
          arg = {n0, n1, s - n0 - n1};
        }
      }
    }
    Rational exact = drift(arg, c, r);
    if ((exact > 0) == (best > 0) && (exact == 0) == (best == 0)) return {arg, exact};
    // Sign disagreement means the guard was too optimistic; rescan exactly.
  }
  std::vector<TypeCountState> states;
  states.reserve(static_cast<size_t>((s + 1) * (s + 2) / 2));
  for (long long n0 = 0; n0 <= s; ++n0)
    for (long long n1 = 0; n0 + n1 <= s; ++n1) states.push_back({n0, n1, s - n0 - n1});
  return scan_states_exact(states, c, r);
}

ShellScan scan_shell_grid(long long s, const LyapunovConstants& c, const Rates& r,
                          const std::optional<IntEval>& fast) {
  const std::vector<TypeCountState> states = scan_grid_states(s);
  if (fast && s > 0) {
    size_t arg = 0;
    __int128 best = fast->dv_scaled(states[0].n0, states[0].n1, states[0].n2);
    for (size_t i = 1; i < states.size(); ++i) {
      const __int128 dv = fast->dv_scaled(states[i].n0, states[i].n1, states[i].n2);
      if (dv > best) {
        best = dv;
        arg = i;
      }
    }
    Rational exact = drift(states[arg], c, r);
    if ((exact > 0) == (best > 0) && (exact == 0) == (best == 0))
      return {states[arg], exact};
  }
  return scan_states_exact(states, c, r);
}

}  // namespace

std::vector<TypeCountState> scan_grid_states(long long s) {
  if (s < 0) throw std::invalid_argument("shell must be nonnegative");
  std::set<std::array<long long, 3>> seen;
  auto add = [&](long long n0, long long n1, long long n2) {
    if (n0 >= 0 && n1 >= 0 && n2 >= 0 && n0 + n1 + n2 == s) seen.insert({n0, n1, n2});
  };
  add(s, 0, 0);
  add(0, s, 0);
  add(0, 0, s);
  add(s / 2, s - s / 2, 0);
  add(s / 2, 0, s - s / 2);
  add(0, s / 2, s - s / 2);
  for (long long t = 0; 2 * t <= s; ++t) {
    add(t, t, s - 2 * t);
    add(t, s - 2 * t, t);
    add(s - 2 * t, t, t);
  }
  for (long long t = 0; 2 * t + 1 <= s; ++t) {
    add(t + 1, t, s - 2 * t - 1);
    add(t, t + 1, s - 2 * t - 1);
  }
  const long long h = s > 0 ? (s + 19) / 20 : 1;
  for (long long i = 0; i * h <= s; ++i)
    for (long long j = 0; i * h + j * h <= s; ++j) add(i * h, j * h, s - i * h - j * h);
  std::vector<TypeCountState> out;
  out.reserve(seen.size());
  for (const auto& t : seen) out.push_back({t[0], t[1], t[2]});
  return out;
}

DriftScanResult drift_scan(const LyapunovConstants& consts, const Rates& rates,
                           const std::vector<long long>& shells, ScanMode mode) {
  if (shells.empty()) throw std::invalid_argument("shell list must not be empty");
  std::vector<long long> order(shells);
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  if (order.front() < 0) throw std::invalid_argument("shell must be nonnegative");

  const auto fast = make_int_eval(consts, rates, order.back() + 1);

  DriftScanResult res;
  res.mode = mode;
  for (long long s : order) {
    ShellScan scan = mode == ScanMode::full ? scan_shell_full(s, consts, rates, fast)
                                            : scan_shell_grid(s, consts, rates, fast);
    res.shells.push_back({s, scan.max_dv, scan.argmax});
  }

  size_t first_neg = res.shells.size();
  while (first_neg > 0 && res.shells[first_neg - 1].max_dv < 0) --first_neg;
  if (first_neg == res.shells.size()) return res;

  res.s0 = res.shells[first_neg].s;
  Rational tail_max = res.shells[first_neg].max_dv;
  for (size_t i = first_neg + 1; i < res.shells.size(); ++i)
    tail_max = std::max(tail_max, res.shells[i].max_dv);
  res.epsilon = -tail_max;

  if (mode == ScanMode::full) {
    bool have = false;
    Rational best;
    TypeCountState arg;
    for (long long s = 0; s < *res.s0; ++s) {
      ShellScan scan = scan_shell_full(s, consts, rates, fast);
      if (!have || scan.max_dv > best) {
        have = true;
        best = scan.max_dv;
        arg = scan.argmax;
      }
    }
    if (have) {
      res.b_bound = best;
      res.b_argmax = arg;
    }
  } else {
    bool have = false;
    for (size_t i = 0; i < first_neg; ++i) {
      if (!have || res.shells[i].max_dv > *res.b_bound) {
        have = true;
        res.b_bound = res.shells[i].max_dv;
        res.b_argmax = res.shells[i].argmax;
      }
    }
  }
  return res;
}

}  // namespace p2plab

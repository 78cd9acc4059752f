#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p2plab/rational.hpp"

namespace p2plab {

// State of the two-piece suppression chain by peer type: type 0 holds
// nothing, type 1 holds piece 1 only, type 2 holds piece 2 only.
struct TypeCountState {
  long long n0 = 0;
  long long n1 = 0;
  long long n2 = 0;

  long long s() const { return n0 + n1 + n2; }

  friend bool operator==(const TypeCountState&, const TypeCountState&) = default;
};

struct Rates {
  Rational lambda;
  Rational us;
  Rational mu;
};

struct LyapunovConstants {
  Rational c1, c2, c3, c4, p;
};

struct PotentialTerms {
  Rational a, b, d, V;
};

// a = n0 + min(n0,n1) + c1 (n1-n0)^+ - c2 n2, b symmetric in n1<->n2,
// d = c3 n0 + c4 n1 + c4 n2, V = (a^+)^2 + (b^+)^2 + d^2.
PotentialTerms potential(const TypeCountState& state, const LyapunovConstants& consts);

// Exact transition list of the suppression chain: arrivals, the seed's
// most-deprived upload, and peer transfers with the strictly largest group
// muted. Zero-rate entries are omitted.
std::vector<std::pair<Rational, TypeCountState>> gs_generator_k2(const TypeCountState& state,
                                                                 const Rates& rates);

// DV = sum over transitions of rate * (V(next) - V(state)).
Rational drift(const TypeCountState& state, const LyapunovConstants& consts,
               const Rates& rates);

// The ten constant conditions, in their canonical order.
std::array<bool, 10> check_conditions(const LyapunovConstants& consts, const Rational& lambda,
                                      const Rational& us);

struct ConstantPreset {
  Rational c1 = 32;
  Rational c3 = 20;
  Rational c4 = 10;
};

// Fix (c1, c3, c4), set p = 1/(2(1+c2)) and take the smallest integer c2
// satisfying the three c2 bounds; the result is verified against all ten
// conditions before it is returned.
LyapunovConstants find_constants(const Rational& lambda, const Rational& us,
                                 const ConstantPreset& preset = {});

// Term-by-term drift for states deep inside one of the equality regions
// (dominant type 0; dominant type 1 with and without type-0 peers; the
// n1 = n2 tie with and without type-0 peers; mirrors by n1<->n2). Nothing is
// returned unless every plus-part activation behind the formula holds.
std::optional<Rational> closed_form_drift(const TypeCountState& state,
                                          const LyapunovConstants& consts, const Rates& rates);

// Which equality region (if any) covers the state; mirrors report the same
// label as their base case with the suffix "m". Exposed for the samplers.
std::optional<std::string> closed_form_case(const TypeCountState& state,
                                            const LyapunovConstants& consts);

enum class ScanMode { full, grid };

struct ShellStat {
  long long s = 0;
  Rational max_dv;
  TypeCountState argmax;
};

struct DriftScanResult {
  std::vector<ShellStat> shells;          // ordered by s
  std::optional<long long> s0;            // all scanned shells >= s0 are negative
  std::optional<Rational> epsilon;        // -(max DV over scanned shells >= s0)
  std::optional<Rational> b_bound;        // max DV over enumerated states with s < s0
  std::optional<TypeCountState> b_argmax;
  ScanMode mode = ScanMode::full;
};

// Per-shell drift maxima. Full mode enumerates whole shells and, once s0 is
// known, every state below it; grid mode touches corners, edge midpoints, the
// n0=n1 / n0=n2 / n1=n2 / n0=n1±1 lines and a coarse interior lattice.
DriftScanResult drift_scan(const LyapunovConstants& consts, const Rates& rates,
                           const std::vector<long long>& shells, ScanMode mode);

// The grid-mode state list for one shell (deduplicated); exposed for tests.
std::vector<TypeCountState> scan_grid_states(long long s);

}  // namespace p2plab

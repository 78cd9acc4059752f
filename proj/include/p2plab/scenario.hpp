#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "p2plab/bitprofile.hpp"

namespace p2plab {

enum class Protocol { unstructured, gs, dgs, waiting, ff, cc };

inline Protocol protocol_from_string(const std::string& name) {
  if (name == "unstructured") return Protocol::unstructured;
  if (name == "gs") return Protocol::gs;
  if (name == "dgs") return Protocol::dgs;
  if (name == "waiting") return Protocol::waiting;
  if (name == "ff") return Protocol::ff;
  if (name == "cc") return Protocol::cc;
  throw std::invalid_argument("unknown protocol: " + name);
}

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::unstructured: return "unstructured";
    case Protocol::gs: return "gs";
    case Protocol::dgs: return "dgs";
    case Protocol::waiting: return "waiting";
    case Protocol::ff: return "ff";
    case Protocol::cc: return "cc";
  }
  return "?";
}

// Initial population. one_club:N puts N peers one (common) piece short of the
// file; bt_mixed:A,B fills A peers with all but the last piece and B peers
// with only the last piece; custom lists (profile, count) pairs explicitly.
struct InitSpec {
  enum class Kind { empty, one_club, bt_mixed, custom };

  Kind kind = Kind::empty;
  long long n = 0;       // one_club size / bt_mixed majority group
  long long n_minor = 0; // bt_mixed minority group
  std::vector<std::pair<std::string, long long>> custom;

  static InitSpec parse(const std::string& text) {
    InitSpec spec;
    if (text == "empty" || text.empty()) return spec;
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "one_club") {
      spec.kind = Kind::one_club;
      spec.n = std::stoll(tail);
      if (spec.n < 0) throw std::invalid_argument("one_club size must be >= 0");
      return spec;
    }
    if (head == "bt_mixed") {
      auto comma = tail.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("bt_mixed needs two counts, e.g. bt_mixed:494,5");
      spec.kind = Kind::bt_mixed;
      spec.n = std::stoll(tail.substr(0, comma));
      spec.n_minor = std::stoll(tail.substr(comma + 1));
      if (spec.n < 0 || spec.n_minor < 0)
        throw std::invalid_argument("bt_mixed counts must be >= 0");
      return spec;
    }
    if (head == "custom") {
      spec.kind = Kind::custom;
      std::size_t pos = 0;
      while (pos < tail.size()) {
        auto comma = tail.find(',', pos);
        std::string item = tail.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
        auto star = item.find('*');
        if (star == std::string::npos)
          throw std::invalid_argument("custom init items look like PROFILE*COUNT");
        spec.custom.emplace_back(item.substr(0, star), std::stoll(item.substr(star + 1)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return spec;
    }
    throw std::invalid_argument("unknown init spec: " + text);
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::empty: return "empty";
      case Kind::one_club: return "one_club:" + std::to_string(n);
      case Kind::bt_mixed:
        return "bt_mixed:" + std::to_string(n) + "," + std::to_string(n_minor);
      case Kind::custom: {
        std::string s = "custom:";
        for (std::size_t i = 0; i < custom.size(); ++i) {
          if (i) s += ",";
          s += custom[i].first + "*" + std::to_string(custom[i].second);
        }
        return s;
      }
    }
    return "?";
  }

  // Expand to (profile, count) pairs for a k-piece file.
  std::vector<std::pair<PieceProfile, long long>> expand(int k) const {
    std::vector<std::pair<PieceProfile, long long>> out;
    PieceProfile all_but_last = PieceProfile::complete(k);
    {
      PieceProfile p(k);
      for (int i = 0; i + 1 < k; ++i) p.set(i);
      all_but_last = p;
    }
    switch (kind) {
      case Kind::empty: break;
      case Kind::one_club:
        if (n > 0) out.emplace_back(all_but_last, n);
        break;
      case Kind::bt_mixed: {
        if (n > 0) out.emplace_back(all_but_last, n);
        PieceProfile only_last(k);
        only_last.set(k - 1);
        if (n_minor > 0) out.emplace_back(only_last, n_minor);
        break;
      }
      case Kind::custom:
        for (const auto& [bits, count] : custom) {
          PieceProfile p = PieceProfile::from_string(bits);
          if (p.k() != k) throw std::invalid_argument("custom profile width != k");
          if (p.is_complete())
            throw std::invalid_argument("custom init may not contain complete profiles");
          out.emplace_back(p, count);
        }
        break;
    }
    return out;
  }
};

struct ScenarioConfig {
  Protocol protocol = Protocol::unstructured;
  int k = 2;
  double lambda = 4.0;  // arrival rate
  double mu = 1.0;      // per-peer contact rate
  double us = 2.0;      // seed contact rate
  double horizon = 1000.0;
  InitSpec init;
  std::uint64_t rng_seed = 1;
  int replications = 1;
  double sample_dt = 1.0;
  int m = 3;  // contacts per pull in the common chunk protocol
  std::uint64_t population_cap = 1'000'000;

  void validate() const {
    if (lambda <= 0 || mu <= 0 || us <= 0)
      throw std::invalid_argument("rates lambda, mu, us must be positive");
    if (k < 1 || k > PieceProfile::kMaxPieces)
      throw std::invalid_argument("k out of range");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (sample_dt <= 0) throw std::invalid_argument("sample_dt must be positive");
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  }
};

}  // namespace p2plab

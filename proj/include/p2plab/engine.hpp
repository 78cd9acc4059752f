#pragma once

#include <cstdint>
#include <optional>

#include "p2plab/metrics.hpp"
#include "p2plab/network_state.hpp"
#include "p2plab/policies.hpp"
#include "p2plab/rng.hpp"

namespace p2plab {

struct Event {
  enum class Kind { arrival, seed_contact, peer_contact };
  Kind kind;
  double t;
  PeerId actor = 0;  // peer_contact only
};

// Draw the next event from the aggregate rate lambda + us + mu * A, where A
// counts the actively contacting peers (every transient peer, dwellers
// included under the waiting protocol).
Event next_event(const NetworkState& state, Rng& rng);

// Optional early termination once enough post-warmup departures were seen.
struct EarlyStop {
  double warmup = 0;
  std::size_t sojourn_count = 0;
};

// Apply one event. Returns the policy outcome for contact events.
std::optional<PolicyOutcome> dispatch(NetworkState& state, const Event& event,
                                      ArrivalLedger& ledger, Rng& rng,
                                      RunResult* result = nullptr);

RunResult run_scenario(const ScenarioConfig& cfg, std::uint64_t stream,
                       const EarlyStop* early_stop = nullptr);

}  // namespace p2plab

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "p2plab/network_state.hpp"
#include "p2plab/rng.hpp"

namespace p2plab {

enum class ContactReason {
  delivered,
  suppressed,
  no_useful_piece,
  skipped_empty_candidate_set,
  refused_common_chunk,
  self_contact,
};

struct Transfer {
  bool from_seed = false;
  PeerId from = 0;  // meaningful when !from_seed
  PeerId to = 0;
  int piece = 0;
};

struct PolicyOutcome {
  std::optional<Transfer> transfer;
  ContactReason reason = ContactReason::delivered;
};

// Ids of the five most recent arrivals, newest first (seed ranking under
// decentralized suppression).
struct ArrivalLedger {
  std::array<PeerId, 5> ids{};
  std::uint8_t len = 0;

  void push(PeerId id) {
    for (int i = (len < 5 ? len : 4); i > 0; --i) ids[i] = ids[i - 1];
    ids[0] = id;
    if (len < 5) ++len;
  }
};

// A largest-club member refuses to serve targets that do not strictly exceed
// its own piece count; everyone uploads freely when no strict largest exists.
bool gs_permit(const PieceProfile& actor, const PieceProfile& target, const GroupHist& hist);

PolicyOutcome unstructured_contact(NetworkState& state, std::size_t actor_idx, Rng& rng);
PolicyOutcome unstructured_seed_contact(NetworkState& state, Rng& rng);

PolicyOutcome gs_contact(NetworkState& state, std::size_t actor_idx, Rng& rng);
PolicyOutcome gs_seed_contact(NetworkState& state, Rng& rng);

PolicyOutcome dgs_contact(NetworkState& state, std::size_t actor_idx, Rng& rng);
PolicyOutcome dgs_seed_contact(NetworkState& state, const ArrivalLedger& ledger, Rng& rng);

PolicyOutcome ff_pull(NetworkState& state, std::size_t actor_idx, Rng& rng);
PolicyOutcome cc_pull(NetworkState& state, std::size_t actor_idx, int m, Rng& rng);

// Membership check used by dgs_contact, exposed for tests: the own profile's
// multiplicity in {own + history} must strictly exceed every other profile's.
bool dgs_member(const Peer& peer);

}  // namespace p2plab

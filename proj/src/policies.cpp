#include "p2plab/policies.hpp"

#include <algorithm>

namespace p2plab {

namespace {

PeerId uniform_peer(const NetworkState& state, Rng& rng) {
  return state.peer_at(static_cast<std::size_t>(rng.uniform_int(state.population()))).id;
}

PolicyOutcome push_random_useful(const NetworkState& state, bool from_seed, PeerId from,
                                 const PieceProfile& uploader, PeerId to, Rng& rng) {
  UsefulSet useful(uploader, state.peer(to).profile);
  if (useful.empty()) return {std::nullopt, ContactReason::no_useful_piece};
  const int piece = useful.nth(static_cast<int>(rng.uniform_int(useful.count())));
  return {Transfer{from_seed, from, to, piece}, ContactReason::delivered};
}

// Up to `want` distinct peer indices, uniform without replacement, never the
// actor. Returns how many were drawn (population permitting).
int sample_others(const NetworkState& state, std::size_t actor_idx, int want,
                  std::size_t out[], Rng& rng) {
  const std::size_t pop = state.population();
  const int avail = static_cast<int>(std::min<std::size_t>(want, pop - 1));
  int got = 0;
  while (got < avail) {
    const std::size_t idx = static_cast<std::size_t>(rng.uniform_int(pop));
    if (idx == actor_idx) continue;
    bool dup = false;
    for (int j = 0; j < got; ++j) dup = dup || out[j] == idx;
    if (!dup) out[got++] = idx;
  }
  return got;
}

}  // namespace

bool gs_permit(const PieceProfile& actor, const PieceProfile& target, const GroupHist& hist) {
  const auto club = hist.largest_club();
  if (!club || !(*club == actor)) return true;
  return target.count() > actor.count();
}

PolicyOutcome unstructured_contact(NetworkState& state, std::size_t actor_idx, Rng& rng) {
  const Peer& actor = state.peer_at(actor_idx);
  const PeerId target = uniform_peer(state, rng);
  if (target == actor.id) return {std::nullopt, ContactReason::self_contact};
  return push_random_useful(state, false, actor.id, actor.profile, target, rng);
}

PolicyOutcome unstructured_seed_contact(NetworkState& state, Rng& rng) {
  if (state.population() == 0)
    return {std::nullopt, ContactReason::skipped_empty_candidate_set};
  const PeerId target = uniform_peer(state, rng);
  return push_random_useful(state, true, 0, state.seed_profile(), target, rng);
}

PolicyOutcome gs_contact(NetworkState& state, std::size_t actor_idx, Rng& rng) {
  const Peer& actor = state.peer_at(actor_idx);
  const PeerId target_id = uniform_peer(state, rng);
  if (target_id == actor.id) return {std::nullopt, ContactReason::self_contact};
  const Peer& target = state.peer(target_id);
  if (!gs_permit(actor.profile, target.profile, state.groups()))
    return {std::nullopt, ContactReason::suppressed};
  return push_random_useful(state, false, actor.id, actor.profile, target_id, rng);
}

PolicyOutcome gs_seed_contact(NetworkState& state, Rng& rng) {
  if (state.population() == 0)
    return {std::nullopt, ContactReason::skipped_empty_candidate_set};
  const PeerId target =
      state.random_least_piece_peer(rng.uniform_int(state.least_piece_bucket_size()));
  return push_random_useful(state, true, 0, state.seed_profile(), target, rng);
}

bool dgs_member(const Peer& peer) {
  int own = 1;
  for (int i = 0; i < peer.history_len; ++i)
    if (peer.history[i] == peer.profile) ++own;
  for (int i = 0; i < peer.history_len; ++i) {
    const PieceProfile& other = peer.history[i];
    if (other == peer.profile) continue;
    int c = 0;
    for (int j = 0; j < peer.history_len; ++j)
      if (peer.history[j] == other) ++c;
    if (c >= own) return false;
  }
  return true;
}

PolicyOutcome dgs_contact(NetworkState& state, std::size_t actor_idx, Rng& rng) {
  Peer& actor = state.peer_at(actor_idx);
  const PeerId target_id = uniform_peer(state, rng);
  if (target_id == actor.id) return {std::nullopt, ContactReason::self_contact};
  const Peer& target = state.peer(target_id);
  actor.push_history(target.profile);
  if (dgs_member(actor) && target.profile.count() <= actor.profile.count())
    return {std::nullopt, ContactReason::suppressed};
  return push_random_useful(state, false, actor.id, actor.profile, target_id, rng);
}

PolicyOutcome dgs_seed_contact(NetworkState& state, const ArrivalLedger& ledger, Rng& rng) {
  if (state.population() == 0)
    return {std::nullopt, ContactReason::skipped_empty_candidate_set};
  for (int i = 0; i < ledger.len; ++i)
    if (state.contains(ledger.ids[i]))
      return push_random_useful(state, true, 0, state.seed_profile(), ledger.ids[i], rng);
  return push_random_useful(state, true, 0, state.seed_profile(), uniform_peer(state, rng),
                            rng);
}

PolicyOutcome ff_pull(NetworkState& state, std::size_t actor_idx, Rng& rng) {
  const Peer& actor = state.peer_at(actor_idx);
  std::size_t picks[3];
  const int got = sample_others(state, actor_idx, 3, picks, rng);
  if (got == 0) return {std::nullopt, ContactReason::skipped_empty_candidate_set};

  std::uint64_t once[2] = {0, 0}, multi[2] = {0, 0};
  for (int i = 0; i < got; ++i) {
    const PieceProfile& p = state.peer_at(picks[i]).profile;
    for (int w = 0; w < 2; ++w) {
      multi[w] |= once[w] & p.word(w);
      once[w] |= p.word(w);
    }
  }
  int candidates[PieceProfile::kMaxPieces];
  int n_cand = 0;
  for (int w = 0; w < 2; ++w) {
    std::uint64_t bits = once[w] & ~multi[w];
    while (bits) {
      const int piece = w * 64 + std::countr_zero(bits);
      bits &= bits - 1;
      if (piece < actor.profile.k() && !actor.profile.has(piece))
        candidates[n_cand++] = piece;
    }
  }
  if (n_cand == 0) return {std::nullopt, ContactReason::skipped_empty_candidate_set};
  const int piece = candidates[rng.uniform_int(static_cast<std::uint64_t>(n_cand))];
  for (int i = 0; i < got; ++i) {
    const Peer& holder = state.peer_at(picks[i]);
    if (holder.profile.has(piece))
      return {Transfer{false, holder.id, actor.id, piece}, ContactReason::delivered};
  }
  return {std::nullopt, ContactReason::skipped_empty_candidate_set};  // unreachable
}

PolicyOutcome cc_pull(NetworkState& state, std::size_t actor_idx, int m, Rng& rng) {
  const Peer& actor = state.peer_at(actor_idx);
  const int held = actor.profile.count();
  if (held == 0) return ff_pull(state, actor_idx, rng);

  const int k = state.config().k;
  if (held <= k - 2) {
    std::size_t pick[1];
    if (sample_others(state, actor_idx, 1, pick, rng) == 0)
      return {std::nullopt, ContactReason::skipped_empty_candidate_set};
    const Peer& target = state.peer_at(pick[0]);
    UsefulSet useful(target.profile, actor.profile);
    if (useful.empty()) return {std::nullopt, ContactReason::no_useful_piece};
    const int piece = useful.nth(static_cast<int>(rng.uniform_int(useful.count())));
    return {Transfer{false, target.id, actor.id, piece}, ContactReason::delivered};
  }

  // One piece short: the missing piece may only be taken once every piece the
  // actor holds shows up at least twice among the m contacts.
  int missing = -1;
  for (int i = 0; i < k; ++i)
    if (!actor.profile.has(i)) missing = i;
  std::vector<std::size_t> picks(static_cast<std::size_t>(m));
  const int got = sample_others(state, actor_idx, m, picks.data(), rng);
  if (got == 0) return {std::nullopt, ContactReason::skipped_empty_candidate_set};

  int counts[PieceProfile::kMaxPieces] = {};
  std::vector<PeerId> holders;
  for (int i = 0; i < got; ++i) {
    const Peer& contact = state.peer_at(picks[i]);
    for (int piece = 0; piece < k; ++piece)
      if (contact.profile.has(piece)) ++counts[piece];
    if (contact.profile.has(missing)) holders.push_back(contact.id);
  }
  if (holders.empty()) return {std::nullopt, ContactReason::refused_common_chunk};
  for (int piece = 0; piece < k; ++piece)
    if (actor.profile.has(piece) && counts[piece] < 2)
      return {std::nullopt, ContactReason::refused_common_chunk};
  const PeerId from = holders[rng.uniform_int(holders.size())];
  return {Transfer{false, from, actor.id, missing}, ContactReason::delivered};
}

}  // namespace p2plab

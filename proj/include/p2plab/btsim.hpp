#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "p2plab/bitprofile.hpp"
#include "p2plab/network_state.hpp"
#include "p2plab/rng.hpp"
#include "p2plab/scenario.hpp"

namespace p2plab {

// Round-based swarm model: 2 s ticks, 10 s unchoking rounds, 4 upload slots
// per peer, piece times of 10 s (leecher) and 2 s (seed).
struct BtConfig {
  long long k = 12;
  long long arrivals_per_round = 30;
  InitSpec init;

  double tick_seconds = 2.0;
  double round_seconds = 10.0;
  double leecher_piece_seconds = 10.0;
  double seed_piece_seconds = 2.0;

  int upload_slots = 4;
  long long download_cap = 40;  // per peer per round, completions and starts
  long long neighbor_max = 50;
  long long tracker_topup_threshold = 20;
  long long tracker_response = 40;

  long long horizon_rounds = 300;
  bool gs_enabled = false;

  std::uint64_t rng_seed = 1;
  long long replications = 1;
  long long population_cap = 1'000'000;

  int ticks_per_round() const;
  int leecher_piece_ticks() const;
  int seed_piece_ticks() const;
  void validate() const;  // throws std::invalid_argument
};

struct BtRoundSample {
  long long round = 0;
  double t_seconds = 0;
  long long population = 0;
  long long largest_club = 0;
  long long departures_cum = 0;
};

struct BtRunResult {
  std::vector<BtRoundSample> samples;
  bool explosion = false;
  std::uint64_t rng_seed = 0;
  std::uint64_t stream = 0;
};

// ticks_left counts down once per tick; 0 means due for delivery this tick
// and -1 marks a cancelled or delivered entry awaiting sweep.
struct BtFlight {
  PeerId uploader = 0;  // kSeedId for the seed
  PeerId target = 0;
  int piece = -1;
  int ticks_left = 0;
};

struct BtPeer {
  PeerId id = 0;
  PieceProfile profile;
  std::set<PeerId> neighbors;    // mutual links, ordered by id
  std::vector<PeerId> unchoked;  // chosen this round, at most upload_slots
  PeerId optimistic = 0;
  int optimistic_rounds_left = 0;  // 0 = no optimistic slot
  PieceProfile in_flight;          // pieces currently being downloaded
  std::set<PeerId> inbound;        // uploaders with an active flight to this peer
  // Pieces received per uploader: the filling round plus the two completed
  // rounds behind it; unchoke ranking reads w1 + w2.
  std::unordered_map<PeerId, long long> recv_cur;
  std::unordered_map<PeerId, long long> recv_w1;
  std::unordered_map<PeerId, long long> recv_w2;
  long long total_uploaded = 0;
  long long out_flights = 0;
  long long starts_this_round = 0;
  long long completions_this_round = 0;
};

class BtSwarm {
 public:
  static constexpr PeerId kSeedId = 0;

  BtSwarm(const BtConfig& cfg, std::uint64_t stream);

  // One full unchoking round; returns false once the population cap is hit.
  bool run_round();
  BtRoundSample sample() const;

  long long population() const { return static_cast<long long>(peers_.size()); }
  long long departures_cum() const { return departures_; }
  long long round_index() const { return round_; }
  double now_seconds() const { return now_seconds_; }

  const BtPeer& peer(PeerId id) const;
  BtPeer& peer(PeerId id);
  bool contains(PeerId id) const { return index_.count(id) != 0; }
  std::vector<PeerId> peer_ids() const;

  PeerId admit_peer();  // empty profile, tracker-assigned neighbors
  void depart(PeerId id);

  // Op-level hooks, exposed for direct tests.
  std::vector<PeerId> tracker_sample(PeerId requester, long long n);
  bool local_largest_club(PeerId id) const;
  std::vector<PeerId> gs_filter_slots(PeerId id, const std::vector<PeerId>& proposed) const;
  std::optional<int> rarest_first_request(PeerId downloader, PeerId uploader);
  std::vector<PeerId> leecher_unchoke(PeerId id);
  std::vector<PeerId> seed_unchoke();

  // Round phases, public so tests can drive them one at a time.  Interest
  // holds no state of its own: it is evaluated against profiles, which stay
  // fixed between the arrival phase and the first tick.
  void phase_arrivals();
  void phase_unchoke();
  void phase_requests();
  void phase_tick();  // one 2 s tick: advance flights, deliver, depart
  void phase_rotate_windows();

  long long largest_group_size() const;
  bool interested(const BtPeer& downloader, const BtPeer& uploader) const;
  const std::vector<BtFlight>& flights() const { return flights_; }
  const std::vector<std::pair<PeerId, long long>>& seed_recent() const {
    return seed_recent_;
  }
  const std::vector<PeerId>& seed_unchoked() const { return seed_unchoked_; }

  long long seed_completions_this_round() const {
    return seed_completions_this_round_;
  }

  // State seams for op-level tests: position the round counter and the seed's
  // recency list without replaying the rounds that would produce them.
  void set_round_index(long long r) { round_ = r; }
  void set_seed_recent(std::vector<std::pair<PeerId, long long>> entries) {
    seed_recent_ = std::move(entries);
  }

 private:
  void add_neighbor_link(PeerId a, PeerId b);
  void drop_peer_links(PeerId id);
  void start_flight(PeerId uploader, PeerId target, int piece);
  bool has_flight_pair(PeerId uploader, PeerId target) const;
  bool request_from(PeerId downloader, PeerId uploader);
  void try_requests_for(PeerId downloader);
  std::vector<PeerId> gs_seed_ranking() const;
  bool try_seed_refill(PeerId id);
  void refill_seed_slots();
  void group_add(const PieceProfile& p);
  void group_remove(const PieceProfile& p);
  void assign_profile(PeerId id, const PieceProfile& p);
  long long recv_volume(const BtPeer& p, PeerId from) const;
  std::vector<PeerId> sorted_ids() const;

  BtConfig cfg_;
  Rng rng_;
  PieceProfile seed_profile_;
  std::vector<BtPeer> peers_;
  std::unordered_map<PeerId, std::size_t> index_;
  std::unordered_map<PieceProfile, long long, ProfileHash> groups_;
  std::vector<BtFlight> flights_;

  std::vector<PeerId> seed_unchoked_;
  std::vector<std::pair<PeerId, long long>> seed_recent_;  // (peer, round), latest first
  long long seed_out_flights_ = 0;
  long long seed_completions_this_round_ = 0;

  PeerId next_id_ = 1;
  long long round_ = 0;
  long long departures_ = 0;
  double now_seconds_ = 0;
  bool exploded_ = false;
};

BtRunResult run_bt(const BtConfig& cfg, std::uint64_t stream);

}  // namespace p2plab

#include "p2plab/btsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace p2plab {

namespace {

int ticks_of(double seconds, double tick, const char* what) {
  const double q = seconds / tick;
  const int n = static_cast<int>(std::llround(q));
  if (n < 1 || std::abs(q - n) > 1e-9)
    throw std::invalid_argument(std::string(what) +
                                " must be a positive multiple of the tick");
  return n;
}

}  // namespace

int BtConfig::ticks_per_round() const {
  return ticks_of(round_seconds, tick_seconds, "round length");
}

int BtConfig::leecher_piece_ticks() const {
  return ticks_of(leecher_piece_seconds, tick_seconds, "leecher piece time");
}

int BtConfig::seed_piece_ticks() const {
  return ticks_of(seed_piece_seconds, tick_seconds, "seed piece time");
}

void BtConfig::validate() const {
  if (k < 1 || k > PieceProfile::kMaxPieces)
    throw std::invalid_argument("k must be between 1 and 128");
  if (arrivals_per_round < 0)
    throw std::invalid_argument("arrivals_per_round must be >= 0");
  if (!(tick_seconds > 0))
    throw std::invalid_argument("tick_seconds must be positive");
  (void)ticks_per_round();
  (void)leecher_piece_ticks();
  (void)seed_piece_ticks();
  if (upload_slots < 1) throw std::invalid_argument("upload_slots must be >= 1");
  if (download_cap < 1) throw std::invalid_argument("download_cap must be >= 1");
  if (neighbor_max < 1) throw std::invalid_argument("neighbor_max must be >= 1");
  if (tracker_topup_threshold < 0 || tracker_topup_threshold > neighbor_max)
    throw std::invalid_argument(
        "tracker_topup_threshold must lie in [0, neighbor_max]");
  if (tracker_response < 0)
    throw std::invalid_argument("tracker_response must be >= 0");
  if (horizon_rounds < 0)
    throw std::invalid_argument("horizon_rounds must be >= 0");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (population_cap < 1)
    throw std::invalid_argument("population_cap must be >= 1");
  (void)init.expand(static_cast<int>(k));
}

BtSwarm::BtSwarm(const BtConfig& cfg, std::uint64_t stream)
    : cfg_(cfg),
      rng_(cfg.rng_seed, stream),
      seed_profile_(PieceProfile::complete(static_cast<int>(cfg.k))) {
  cfg_.validate();
  for (const auto& [profile, count] : cfg_.init.expand(static_cast<int>(cfg_.k)))
    for (long long i = 0; i < count; ++i) {
      const PeerId id = admit_peer();
      assign_profile(id, profile);
    }
  // Early admissions see few candidates, so even out the initial graph the
  // same way a live swarm would: everyone short of the threshold asks again.
  for (PeerId id : sorted_ids())
    if (static_cast<long long>(peer(id).neighbors.size()) <
        cfg_.tracker_topup_threshold)
      tracker_sample(id, cfg_.tracker_response);
}

const BtPeer& BtSwarm::peer(PeerId id) const { return peers_[index_.at(id)]; }

BtPeer& BtSwarm::peer(PeerId id) { return peers_[index_.at(id)]; }

std::vector<PeerId> BtSwarm::peer_ids() const { return sorted_ids(); }

std::vector<PeerId> BtSwarm::sorted_ids() const {
  std::vector<PeerId> ids;
  ids.reserve(peers_.size());
  for (const auto& p : peers_) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void BtSwarm::group_add(const PieceProfile& p) { ++groups_[p]; }

void BtSwarm::group_remove(const PieceProfile& p) {
  auto it = groups_.find(p);
  if (it == groups_.end()) throw std::logic_error("group table out of sync");
  if (--it->second == 0) groups_.erase(it);
}

void BtSwarm::assign_profile(PeerId id, const PieceProfile& p) {
  BtPeer& peer_ref = peer(id);
  group_remove(peer_ref.profile);
  peer_ref.profile = p;
  group_add(peer_ref.profile);
}

PeerId BtSwarm::admit_peer() {
  BtPeer p;
  p.id = next_id_++;
  p.profile = PieceProfile(static_cast<int>(cfg_.k));
  p.in_flight = PieceProfile(static_cast<int>(cfg_.k));
  const PeerId id = p.id;
  index_[id] = peers_.size();
  peers_.push_back(std::move(p));
  group_add(peers_.back().profile);
  tracker_sample(id, cfg_.tracker_response);
  return id;
}

void BtSwarm::depart(PeerId id) {
  for (auto& f : flights_) {
    if (f.ticks_left < 0) continue;
    if (f.uploader == id) {
      if (contains(f.target)) {
        BtPeer& t = peer(f.target);
        t.in_flight.reset(f.piece);
        t.inbound.erase(id);
      }
      f.ticks_left = -1;
    } else if (f.target == id) {
      if (f.uploader == kSeedId)
        --seed_out_flights_;
      else if (contains(f.uploader))
        --peer(f.uploader).out_flights;
      f.ticks_left = -1;
    }
  }
  drop_peer_links(id);
  const std::size_t pos = index_.at(id);
  group_remove(peers_[pos].profile);
  const std::size_t last = peers_.size() - 1;
  if (pos != last) {
    peers_[pos] = std::move(peers_[last]);
    index_[peers_[pos].id] = pos;
  }
  peers_.pop_back();
  index_.erase(id);
}

void BtSwarm::add_neighbor_link(PeerId a, PeerId b) {
  peer(a).neighbors.insert(b);
  peer(b).neighbors.insert(a);
}

void BtSwarm::drop_peer_links(PeerId id) {
  BtPeer& p = peer(id);
  for (PeerId n : p.neighbors) peer(n).neighbors.erase(id);
  p.neighbors.clear();
}

std::vector<PeerId> BtSwarm::tracker_sample(PeerId requester, long long n) {
  std::vector<PeerId> linked;
  const long long room =
      cfg_.neighbor_max - static_cast<long long>(peer(requester).neighbors.size());
  if (n <= 0 || room <= 0) return linked;
  // Available peers: not the requester, not already linked, not at the cap.
  std::vector<PeerId> candidates;
  candidates.reserve(peers_.size());
  {
    const BtPeer& req = peer(requester);
    for (const auto& p : peers_)
      if (p.id != requester && req.neighbors.count(p.id) == 0 &&
          static_cast<long long>(p.neighbors.size()) < cfg_.neighbor_max)
        candidates.push_back(p.id);
  }
  const std::size_t want = std::min(
      candidates.size(), static_cast<std::size_t>(std::min(n, room)));
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(
                rng_.uniform_int(static_cast<std::uint64_t>(candidates.size() - i)));
    std::swap(candidates[i], candidates[j]);
  }
  for (std::size_t i = 0; i < want; ++i) {
    add_neighbor_link(requester, candidates[i]);
    linked.push_back(candidates[i]);
  }
  return linked;
}

bool BtSwarm::interested(const BtPeer& downloader, const BtPeer& uploader) const {
  return !UsefulSet(uploader.profile, downloader.profile).empty();
}

long long BtSwarm::recv_volume(const BtPeer& p, PeerId from) const {
  long long v = 0;
  if (auto it = p.recv_w1.find(from); it != p.recv_w1.end()) v += it->second;
  if (auto it = p.recv_w2.find(from); it != p.recv_w2.end()) v += it->second;
  return v;
}

bool BtSwarm::local_largest_club(PeerId id) const {
  const BtPeer& p = peer(id);
  if (p.neighbors.empty()) return false;
  std::unordered_map<PieceProfile, long long, ProfileHash> counts;
  ++counts[p.profile];
  for (PeerId n : p.neighbors) ++counts[peer(n).profile];
  const long long own = counts[p.profile];
  for (const auto& [profile, c] : counts)
    if (profile != p.profile && c >= own) return false;
  return true;
}

std::vector<PeerId> BtSwarm::gs_filter_slots(
    PeerId id, const std::vector<PeerId>& proposed) const {
  const int own = peer(id).profile.count();
  std::vector<PeerId> out;
  for (PeerId t : proposed)
    if (contains(t) && peer(t).profile.count() > own) out.push_back(t);
  return out;
}

std::vector<PeerId> BtSwarm::leecher_unchoke(PeerId id) {
  BtPeer& p = peer(id);
  std::vector<PeerId> ranked;
  ranked.reserve(p.neighbors.size());
  for (PeerId n : p.neighbors)
    if (interested(peer(n), p)) ranked.push_back(n);
  // Shuffle before the stable sort so equal received volumes rank uniformly.
  for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(
                rng_.uniform_int(static_cast<std::uint64_t>(ranked.size() - i)));
    std::swap(ranked[i], ranked[j]);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&](PeerId a, PeerId b) {
    return recv_volume(p, a) > recv_volume(p, b);
  });

  const std::size_t top_slots =
      static_cast<std::size_t>(std::max(cfg_.upload_slots - 1, 0));
  std::vector<PeerId> out;
  for (PeerId n : ranked) {
    if (out.size() >= top_slots) break;
    out.push_back(n);
  }
  if (round_ % 3 == 1) {
    p.optimistic = 0;
    p.optimistic_rounds_left = 0;
    std::vector<PeerId> pool;
    for (PeerId n : ranked)
      if (std::find(out.begin(), out.end(), n) == out.end()) pool.push_back(n);
    if (!pool.empty()) {
      p.optimistic = pool[static_cast<std::size_t>(
          rng_.uniform_int(static_cast<std::uint64_t>(pool.size())))];
      p.optimistic_rounds_left = 3;
    }
  }
  if (p.optimistic_rounds_left > 0 && p.optimistic != 0 &&
      contains(p.optimistic) && p.neighbors.count(p.optimistic) != 0 &&
      interested(peer(p.optimistic), p) &&
      std::find(out.begin(), out.end(), p.optimistic) == out.end())
    out.push_back(p.optimistic);
  return out;
}

std::vector<PeerId> BtSwarm::seed_unchoke() {
  // Recency list: alive peers the seed unchoked within the last two rounds.
  {
    std::vector<std::pair<PeerId, long long>> pruned;
    for (const auto& e : seed_recent_)
      if (e.second >= round_ - 2 && contains(e.first)) pruned.push_back(e);
    seed_recent_ = std::move(pruned);
  }

  if (round_ % 3 == 0) {
    std::vector<PeerId> kept;
    for (PeerId id : seed_unchoked_)
      if (contains(id)) kept.push_back(id);
    return kept;
  }

  const std::size_t top_slots =
      static_cast<std::size_t>(std::max(cfg_.upload_slots - 1, 0));
  std::vector<PeerId> top;
  if (cfg_.gs_enabled) {
    for (PeerId id : gs_seed_ranking()) {
      if (top.size() >= top_slots) break;
      top.push_back(id);
    }
  } else {
    for (const auto& e : seed_recent_) {
      if (top.size() >= top_slots) break;
      top.push_back(e.first);
    }
  }

  std::vector<PeerId> pool;
  pool.reserve(peers_.size());
  for (const auto& p : peers_)
    if (std::find(top.begin(), top.end(), p.id) == top.end())
      pool.push_back(p.id);
  std::vector<PeerId> out;
  if (!pool.empty())
    out.push_back(pool[static_cast<std::size_t>(
        rng_.uniform_int(static_cast<std::uint64_t>(pool.size())))]);
  out.insert(out.end(), top.begin(), top.end());
  return out;
}

void BtSwarm::phase_arrivals() {
  for (long long i = 0; i < cfg_.arrivals_per_round; ++i) admit_peer();
  for (PeerId id : sorted_ids())
    if (static_cast<long long>(peer(id).neighbors.size()) <
        cfg_.tracker_topup_threshold)
      tracker_sample(id, cfg_.tracker_response);
}

void BtSwarm::phase_unchoke() {
  seed_unchoked_ = seed_unchoke();
  std::vector<std::pair<PeerId, long long>> updated;
  for (PeerId id : seed_unchoked_) updated.emplace_back(id, round_);
  for (const auto& e : seed_recent_)
    if (std::find(seed_unchoked_.begin(), seed_unchoked_.end(), e.first) ==
        seed_unchoked_.end())
      updated.push_back(e);
  seed_recent_ = std::move(updated);

  for (PeerId id : sorted_ids()) {
    std::vector<PeerId> proposed = leecher_unchoke(id);
    if (cfg_.gs_enabled && local_largest_club(id))
      proposed = gs_filter_slots(id, proposed);
    peer(id).unchoked = std::move(proposed);
  }
}

std::optional<int> BtSwarm::rarest_first_request(PeerId downloader,
                                                 PeerId uploader) {
  const BtPeer& d = peer(downloader);
  const PieceProfile& up =
      uploader == kSeedId ? seed_profile_ : peer(uploader).profile;
  std::uint64_t cand[2];
  for (int w = 0; w < 2; ++w)
    cand[w] = up.word(w) & ~d.profile.word(w) & ~d.in_flight.word(w);
  if ((cand[0] | cand[1]) == 0) return std::nullopt;
  int best_avail = std::numeric_limits<int>::max();
  int ties = 0;
  int choice = -1;
  for (int w = 0; w < 2; ++w) {
    std::uint64_t bits = cand[w];
    while (bits) {
      const int piece = w * 64 + std::countr_zero(bits);
      bits &= bits - 1;
      int avail = 0;
      for (PeerId n : d.neighbors)
        if (peer(n).profile.has(piece)) ++avail;
      if (avail < best_avail) {
        best_avail = avail;
        ties = 1;
        choice = piece;
      } else if (avail == best_avail) {
        ++ties;
        if (rng_.uniform_int(static_cast<std::uint64_t>(ties)) == 0)
          choice = piece;
      }
    }
  }
  return choice;
}

bool BtSwarm::has_flight_pair(PeerId uploader, PeerId target) const {
  return contains(target) && peer(target).inbound.count(uploader) != 0;
}

void BtSwarm::start_flight(PeerId uploader, PeerId target, int piece) {
  BtFlight f;
  f.uploader = uploader;
  f.target = target;
  f.piece = piece;
  f.ticks_left = uploader == kSeedId ? cfg_.seed_piece_ticks()
                                     : cfg_.leecher_piece_ticks();
  flights_.push_back(f);
  BtPeer& t = peer(target);
  t.in_flight.set(piece);
  t.inbound.insert(uploader);
  ++t.starts_this_round;
  if (uploader == kSeedId)
    ++seed_out_flights_;
  else
    ++peer(uploader).out_flights;
}

bool BtSwarm::request_from(PeerId downloader, PeerId uploader) {
  if (!contains(downloader)) return false;
  if (peer(downloader).starts_this_round >= cfg_.download_cap) return false;
  if (has_flight_pair(uploader, downloader)) return false;
  if (uploader == kSeedId) {
    if (seed_out_flights_ >= cfg_.upload_slots) return false;
    if (std::find(seed_unchoked_.begin(), seed_unchoked_.end(), downloader) ==
        seed_unchoked_.end())
      return false;
  } else {
    if (!contains(uploader)) return false;
    const BtPeer& u = peer(uploader);
    if (u.out_flights >= cfg_.upload_slots) return false;
    if (std::find(u.unchoked.begin(), u.unchoked.end(), downloader) ==
        u.unchoked.end())
      return false;
  }
  const auto piece = rarest_first_request(downloader, uploader);
  if (!piece) return false;
  start_flight(uploader, downloader, *piece);
  return true;
}

void BtSwarm::try_requests_for(PeerId downloader) {
  if (std::find(seed_unchoked_.begin(), seed_unchoked_.end(), downloader) !=
      seed_unchoked_.end())
    request_from(downloader, kSeedId);
  // std::set iteration gives uploaders in ascending id order.
  for (PeerId n : peer(downloader).neighbors) {
    const BtPeer& u = peer(n);
    if (std::find(u.unchoked.begin(), u.unchoked.end(), downloader) !=
        u.unchoked.end())
      request_from(downloader, n);
  }
}

// Fewest pieces first; break ties toward the larger total upload count, then
// the smaller id.
std::vector<PeerId> BtSwarm::gs_seed_ranking() const {
  std::vector<PeerId> order = sorted_ids();
  std::stable_sort(order.begin(), order.end(), [&](PeerId x, PeerId y) {
    const BtPeer& a = peer(x);
    const BtPeer& b = peer(y);
    if (a.profile.count() != b.profile.count())
      return a.profile.count() < b.profile.count();
    if (a.total_uploaded != b.total_uploaded)
      return a.total_uploaded > b.total_uploaded;
    return x < y;
  });
  return order;
}

bool BtSwarm::try_seed_refill(PeerId id) {
  const bool member =
      std::find(seed_unchoked_.begin(), seed_unchoked_.end(), id) !=
      seed_unchoked_.end();
  if (!member) seed_unchoked_.push_back(id);
  if (!request_from(id, kSeedId)) {
    if (!member) seed_unchoked_.pop_back();
    return false;
  }
  if (!member) {
    // A refill is an unchoke, so it enters the recency list immediately.
    seed_recent_.erase(
        std::remove_if(seed_recent_.begin(), seed_recent_.end(),
                       [id](const auto& e) { return e.first == id; }),
        seed_recent_.end());
    seed_recent_.insert(seed_recent_.begin(), {id, round_});
  }
  return true;
}

// The seed is work conserving: whenever an upload slot is free it unchokes a
// further peer and starts serving it within the same tick. Eligible targets
// are drawn uniformly, or by the fewest-pieces ranking when suppression is on.
void BtSwarm::refill_seed_slots() {
  while (seed_out_flights_ < cfg_.upload_slots && !peers_.empty()) {
    bool started = false;
    if (cfg_.gs_enabled) {
      for (PeerId id : gs_seed_ranking()) {
        if (peer(id).inbound.count(kSeedId) != 0) continue;
        if (try_seed_refill(id)) {
          started = true;
          break;
        }
      }
    } else {
      for (int attempt = 0; attempt < 64 && !started; ++attempt) {
        const std::size_t pick = static_cast<std::size_t>(
            rng_.uniform_int(static_cast<std::uint64_t>(peers_.size())));
        const PeerId id = peers_[pick].id;
        if (peer(id).inbound.count(kSeedId) != 0) continue;
        started = try_seed_refill(id);
      }
    }
    if (!started) return;
  }
}

void BtSwarm::phase_requests() {
  for (PeerId id : sorted_ids()) try_requests_for(id);
  refill_seed_slots();
}

void BtSwarm::phase_tick() {
  const std::size_t advanced = flights_.size();
  for (std::size_t i = 0; i < advanced; ++i)
    if (flights_[i].ticks_left > 0) --flights_[i].ticks_left;
  // Deliveries run in flight creation order. Re-requests append new flights
  // with positive tick counts, so they are skipped until a later tick.
  for (std::size_t i = 0; i < flights_.size(); ++i) {
    const BtFlight f = flights_[i];
    if (f.ticks_left != 0) continue;
    if (!contains(f.target)) {
      flights_[i].ticks_left = -1;
      if (f.uploader == kSeedId)
        --seed_out_flights_;
      else if (contains(f.uploader))
        --peer(f.uploader).out_flights;
      continue;
    }
    BtPeer& t = peer(f.target);
    if (t.completions_this_round >= cfg_.download_cap) continue;  // deferred
    flights_[i].ticks_left = -1;
    t.inbound.erase(f.uploader);
    t.in_flight.reset(f.piece);
    group_remove(t.profile);
    t.profile.set(f.piece);
    group_add(t.profile);
    ++t.completions_this_round;
    ++t.recv_cur[f.uploader];
    if (f.uploader == kSeedId) {
      --seed_out_flights_;
      ++seed_completions_this_round_;
    } else if (contains(f.uploader)) {
      BtPeer& u = peer(f.uploader);
      --u.out_flights;
      ++u.total_uploaded;
    }
    if (t.profile.is_complete()) {
      ++departures_;
      depart(f.target);
      continue;
    }
    request_from(f.target, f.uploader);  // freed slot, same pair
  }
  flights_.erase(std::remove_if(flights_.begin(), flights_.end(),
                                [](const BtFlight& fl) { return fl.ticks_left < 0; }),
                 flights_.end());
  refill_seed_slots();
  now_seconds_ += cfg_.tick_seconds;
}

void BtSwarm::phase_rotate_windows() {
  for (auto& p : peers_) {
    p.recv_w2 = std::move(p.recv_w1);
    p.recv_w1 = std::move(p.recv_cur);
    p.recv_cur = {};
    if (p.optimistic_rounds_left > 0) --p.optimistic_rounds_left;
  }
}

bool BtSwarm::run_round() {
  if (exploded_) return false;
  ++round_;
  for (auto& p : peers_) {
    p.starts_this_round = 0;
    p.completions_this_round = 0;
  }
  seed_completions_this_round_ = 0;
  phase_arrivals();
  if (population() > cfg_.population_cap) {
    exploded_ = true;
    return false;
  }
  phase_unchoke();
  phase_requests();
  const int ticks = cfg_.ticks_per_round();
  for (int i = 0; i < ticks; ++i) phase_tick();
  phase_rotate_windows();
  return true;
}

long long BtSwarm::largest_group_size() const {
  long long best = 0;
  for (const auto& [profile, c] : groups_) best = std::max(best, c);
  return best;
}

BtRoundSample BtSwarm::sample() const {
  BtRoundSample s;
  s.round = round_;
  s.t_seconds = static_cast<double>(round_) * cfg_.round_seconds;
  s.population = population();
  s.largest_club = largest_group_size();
  s.departures_cum = departures_;
  return s;
}

BtRunResult run_bt(const BtConfig& cfg, std::uint64_t stream) {
  cfg.validate();
  BtRunResult out;
  out.rng_seed = cfg.rng_seed;
  out.stream = stream;
  BtSwarm swarm(cfg, stream);
  out.samples.push_back(swarm.sample());
  for (long long r = 0; r < cfg.horizon_rounds; ++r) {
    const bool ok = swarm.run_round();
    out.samples.push_back(swarm.sample());
    if (!ok) {
      out.explosion = true;
      break;
    }
  }
  return out;
}

}  // namespace p2plab

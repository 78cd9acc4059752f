#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "p2plab/bitprofile.hpp"
#include "p2plab/scenario.hpp"

namespace p2plab {

using PeerId = std::uint64_t;

struct Peer {
  PeerId id = 0;
  PieceProfile profile;
  double arrived_at = 0;
  double dwell_deadline = -1;  // >= 0 only while dwelling under the waiting protocol

  // Profiles of the last <= 3 contact targets (decentralized suppression).
  std::array<PieceProfile, 3> history;
  std::uint8_t history_len = 0;
  std::uint8_t history_head = 0;

  std::uint32_t count_bucket_pos = 0;

  bool dwelling() const { return dwell_deadline >= 0; }

  void push_history(const PieceProfile& p) {
    history[history_head] = p;
    history_head = static_cast<std::uint8_t>((history_head + 1) % 3);
    if (history_len < 3) ++history_len;
  }
};

// Multiset of piece profiles with an ordered index by group size, so the
// strictly-most-populous group is a log-time query.
class GroupHist {
 public:
  void add(const PieceProfile& p) {
    long long& c = counts_[p];
    if (c > 0) erase_from_bucket(c, p);
    ++c;
    buckets_[c].insert(p);
    ++total_;
  }

  void remove(const PieceProfile& p) {
    auto it = counts_.find(p);
    if (it == counts_.end() || it->second == 0)
      throw std::logic_error("group histogram underflow");
    erase_from_bucket(it->second, p);
    --it->second;
    if (it->second == 0)
      counts_.erase(it);
    else
      buckets_[it->second].insert(p);
    --total_;
  }

  // The unique profile whose count strictly exceeds every other group's
  // count; nothing on ties or when empty.
  std::optional<PieceProfile> largest_club() const {
    if (buckets_.empty()) return std::nullopt;
    const auto& top = *buckets_.rbegin();
    if (top.second.size() != 1) return std::nullopt;
    return *top.second.begin();
  }

  long long largest_club_size() const {
    auto club = largest_club();
    if (!club) return 0;
    return counts_.at(*club);
  }

  long long count_of(const PieceProfile& p) const {
    auto it = counts_.find(p);
    return it == counts_.end() ? 0 : it->second;
  }

  long long total() const { return total_; }

  std::size_t distinct_groups() const { return counts_.size(); }

  // Group sizes in descending order, at most n of them.
  std::vector<long long> top_counts(std::size_t n) const {
    std::vector<long long> out;
    for (auto it = buckets_.rbegin(); it != buckets_.rend() && out.size() < n; ++it)
      for (std::size_t i = 0; i < it->second.size() && out.size() < n; ++i)
        out.push_back(it->first);
    return out;
  }

  const std::unordered_map<PieceProfile, long long, ProfileHash>& counts() const {
    return counts_;
  }

 private:
  void erase_from_bucket(long long c, const PieceProfile& p) {
    auto bit = buckets_.find(c);
    bit->second.erase(p);
    if (bit->second.empty()) buckets_.erase(bit);
  }

  std::unordered_map<PieceProfile, long long, ProfileHash> counts_;
  std::map<long long, std::unordered_set<PieceProfile, ProfileHash>> buckets_;
  long long total_ = 0;
};

// Population of transient peers plus clock. The fixed seed lives outside the
// table and is never counted.
class NetworkState {
 public:
  explicit NetworkState(const ScenarioConfig& cfg) : cfg_(&cfg), count_buckets_(cfg.k + 1) {
    seed_profile_ = PieceProfile::complete(cfg.k);
    for (const auto& [profile, count] : cfg.init.expand(cfg.k))
      for (long long i = 0; i < count; ++i) add_peer(profile);
  }

  const ScenarioConfig& config() const { return *cfg_; }

  double t() const { return t_; }
  void advance_to(double t) { t_ = t; }

  std::size_t population() const { return peers_.size(); }

  const PieceProfile& seed_profile() const { return seed_profile_; }

  PeerId add_peer(const PieceProfile& profile) {
    if (profile.k() != cfg_->k) throw std::invalid_argument("profile width != k");
    Peer peer;
    peer.id = next_id_++;
    peer.profile = profile;
    peer.arrived_at = t_;
    index_[peer.id] = peers_.size();
    peers_.push_back(std::move(peer));
    groups_.add(profile);
    bucket_insert(peers_.back());
    return peers_.back().id;
  }

  PeerId add_arrival() { return add_peer(PieceProfile(cfg_->k)); }

  Peer& peer_at(std::size_t idx) { return peers_[idx]; }
  const Peer& peer_at(std::size_t idx) const { return peers_[idx]; }

  bool contains(PeerId id) const { return index_.count(id) != 0; }

  std::size_t index_of(PeerId id) const { return index_.at(id); }

  Peer& peer(PeerId id) { return peers_[index_.at(id)]; }
  const Peer& peer(PeerId id) const { return peers_.at(index_.at(id)); }

  const std::vector<Peer>& peers() const { return peers_; }

  const GroupHist& groups() const { return groups_; }

  std::optional<PieceProfile> largest_club() const { return groups_.largest_club(); }

  // All transient peers holding the minimum piece count.
  std::vector<PeerId> least_piece_peers() const {
    std::vector<PeerId> out;
    if (peers_.empty()) return out;
    return count_buckets_[min_count_];
  }

  PeerId random_least_piece_peer(std::uint64_t pick) const {
    const auto& bucket = count_buckets_[min_count_];
    return bucket[pick % bucket.size()];
  }

  std::size_t least_piece_bucket_size() const {
    return peers_.empty() ? 0 : count_buckets_[min_count_].size();
  }

  // Give `piece` to `to`. Complete non-waiting peers are removed on the spot;
  // under the waiting protocol the caller supplies the dwell deadline later.
  // Returns true when the target completed the file.
  bool grant_piece(PeerId to, int piece) {
    Peer& target = peer(to);
    if (target.profile.has(piece)) throw std::logic_error("transfer of a non-useful piece");
    bucket_erase(target);
    groups_.remove(target.profile);
    target.profile.set(piece);
    groups_.add(target.profile);
    bucket_insert(target);
    return target.profile.is_complete();
  }

  struct Departure {
    PeerId id;
    double arrived_at;
  };

  Departure remove_peer(PeerId id) {
    std::size_t idx = index_.at(id);
    Peer& victim = peers_[idx];
    Departure gone{victim.id, victim.arrived_at};
    bucket_erase(victim);
    groups_.remove(victim.profile);
    index_.erase(id);
    if (idx + 1 != peers_.size()) {
      peers_[idx] = std::move(peers_.back());
      index_[peers_[idx].id] = idx;
    }
    peers_.pop_back();
    return gone;
  }

  // Dwell bookkeeping (waiting protocol).
  void schedule_dwell(PeerId id, double deadline) {
    peer(id).dwell_deadline = deadline;
    dwell_heap_.emplace(deadline, id);
  }

  std::optional<std::pair<double, PeerId>> next_dwell() const {
    if (dwell_heap_.empty()) return std::nullopt;
    return dwell_heap_.top();
  }

  void pop_dwell() { dwell_heap_.pop(); }

  // Recompute the histogram from scratch; used by consistency checks.
  bool histogram_consistent() const {
    GroupHist fresh;
    for (const auto& p : peers_) fresh.add(p.profile);
    if (fresh.total() != groups_.total()) return false;
    for (const auto& [profile, count] : fresh.counts())
      if (groups_.count_of(profile) != count) return false;
    return groups_.counts().size() == fresh.counts().size();
  }

 private:
  void bucket_insert(Peer& p) {
    int c = p.profile.count();
    p.count_bucket_pos = static_cast<std::uint32_t>(count_buckets_[c].size());
    count_buckets_[c].push_back(p.id);
    if (c < min_count_ || count_buckets_[min_count_].empty()) min_count_ = c;
  }

  void bucket_erase(Peer& p) {
    int c = p.profile.count();
    auto& bucket = count_buckets_[c];
    std::uint32_t pos = p.count_bucket_pos;
    bucket[pos] = bucket.back();
    if (bucket[pos] != p.id) peer(bucket[pos]).count_bucket_pos = pos;
    bucket.pop_back();
    while (min_count_ < cfg_->k && count_buckets_[min_count_].empty()) ++min_count_;
  }

  const ScenarioConfig* cfg_;
  std::vector<Peer> peers_;
  std::unordered_map<PeerId, std::size_t> index_;
  GroupHist groups_;
  std::vector<std::vector<PeerId>> count_buckets_;
  int min_count_ = 0;
  PieceProfile seed_profile_;
  double t_ = 0;
  PeerId next_id_ = 0;

  using DwellEntry = std::pair<double, PeerId>;
  std::priority_queue<DwellEntry, std::vector<DwellEntry>, std::greater<>> dwell_heap_;
};

}  // namespace p2plab

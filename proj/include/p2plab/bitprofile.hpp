#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2plab {

// Fixed-width piece ownership bitmap. Two words cover every file size used
// here (k up to 128); bit i set means piece i is held.
class PieceProfile {
 public:
  static constexpr int kMaxPieces = 128;

  PieceProfile() = default;

  explicit PieceProfile(int k) : k_(static_cast<std::uint16_t>(k)) {
    if (k < 1 || k > kMaxPieces) throw std::invalid_argument("piece count out of range");
  }

  static PieceProfile complete(int k) {
    PieceProfile p(k);
    for (int i = 0; i < k; ++i) p.set(i);
    return p;
  }

  // "101" means: has piece 0, lacks piece 1, has piece 2.
  static PieceProfile from_string(const std::string& bits) {
    PieceProfile p(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1')
        p.set(static_cast<int>(i));
      else if (bits[i] != '0')
        throw std::invalid_argument("profile string must be 0/1");
    }
    return p;
  }

  int k() const { return k_; }

  bool has(int piece) const { return (w_[piece >> 6] >> (piece & 63)) & 1ULL; }

  void set(int piece) { w_[piece >> 6] |= 1ULL << (piece & 63); }

  void reset(int piece) { w_[piece >> 6] &= ~(1ULL << (piece & 63)); }

  int count() const {
    return std::popcount(w_[0]) + std::popcount(w_[1]);
  }

  bool is_complete() const { return count() == k_; }

  bool empty() const { return (w_[0] | w_[1]) == 0; }

  PieceProfile with(int piece) const {
    PieceProfile p = *this;
    p.set(piece);
    return p;
  }

  std::uint64_t word(int i) const { return w_[i]; }

  std::string to_string() const {
    std::string s(k_, '0');
    for (int i = 0; i < k_; ++i)
      if (has(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const PieceProfile& x, const PieceProfile& y) {
    return x.k_ == y.k_ && x.w_ == y.w_;
  }
  friend bool operator!=(const PieceProfile& x, const PieceProfile& y) { return !(x == y); }

 private:
  std::array<std::uint64_t, 2> w_{};
  std::uint16_t k_ = 0;

  friend class UsefulSet;
  friend struct ProfileHash;
};

struct ProfileHash {
  std::size_t operator()(const PieceProfile& p) const {
    std::uint64_t h = p.w_[0] * 0x9E3779B97F4A7C15ULL;
    h ^= p.w_[1] + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (std::uint64_t(p.k()) << 32));
  }
};

// Pieces the uploader holds that the target lacks, kept as a bitmap so
// callers can count and pick without materializing a vector.
class UsefulSet {
 public:
  UsefulSet(const PieceProfile& uploader, const PieceProfile& target) {
    if (uploader.k() != target.k()) throw std::invalid_argument("profile width mismatch");
    w_[0] = uploader.w_[0] & ~target.w_[0];
    w_[1] = uploader.w_[1] & ~target.w_[1];
  }

  int count() const { return std::popcount(w_[0]) + std::popcount(w_[1]); }

  bool empty() const { return (w_[0] | w_[1]) == 0; }

  bool contains(int piece) const { return (w_[piece >> 6] >> (piece & 63)) & 1ULL; }

  // j-th set piece in increasing index order, j in [0, count()).
  int nth(int j) const {
    int c0 = std::popcount(w_[0]);
    if (j < c0) return select64(w_[0], j);
    return 64 + select64(w_[1], j - c0);
  }

  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(count());
    for (int w = 0; w < 2; ++w) {
      std::uint64_t bits = w_[w];
      while (bits) {
        out.push_back(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
      }
    }
    return out;
  }

 private:
  static int select64(std::uint64_t bits, int j) {
    for (int i = 0; i < j; ++i) bits &= bits - 1;
    return std::countr_zero(bits);
  }

  std::array<std::uint64_t, 2> w_{};
};

inline UsefulSet useful_pieces(const PieceProfile& uploader, const PieceProfile& target) {
  return UsefulSet(uploader, target);
}

}  // namespace p2plab

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace plancomm {

using AtomId = std::uint32_t;

// Fixed-universe bitset over atom indices of one grounded model.
class AtomSet {
 public:
  AtomSet() = default;
  explicit AtomSet(std::size_t universe)
      : size_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const { return size_; }

  bool contains(AtomId a) const { return (words_[a >> 6] >> (a & 63)) & 1u; }
  void insert(AtomId a) { words_[a >> 6] |= std::uint64_t{1} << (a & 63); }
  void erase(AtomId a) { words_[a >> 6] &= ~(std::uint64_t{1} << (a & 63)); }

  bool contains_all(std::span<const AtomId> atoms) const {
    for (AtomId a : atoms)
      if (!contains(a)) return false;
    return true;
  }
  bool contains_none(std::span<const AtomId> atoms) const {
    for (AtomId a : atoms)
      if (contains(a)) return false;
    return true;
  }
  bool contains_all(const AtomSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if ((other.words_[i] & ~words_[i]) != 0) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<AtomId> members() const {
    std::vector<AtomId> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        out.push_back(static_cast<AtomId>(i * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t w : words_) {
      h ^= w;
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

  bool operator==(const AtomSet&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct AtomSetHash {
  std::size_t operator()(const AtomSet& s) const { return s.hash(); }
};

}  // namespace plancomm

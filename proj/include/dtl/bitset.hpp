// Fixed-universe bitset used for point sets of finite models.
#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace dtl {

class PointSet {
public:
  PointSet() = default;
  explicit PointSet(std::size_t universe)
      : size_(universe), words_((universe + 63) / 64, 0) {}

  static PointSet full(std::size_t universe) {
    PointSet s(universe);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  std::size_t universe() const { return size_; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  bool any() const {
    for (auto w : words_) if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  PointSet& operator&=(const PointSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  PointSet& operator|=(const PointSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  PointSet& operator-=(const PointSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
  friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }
  friend PointSet operator-(PointSet a, const PointSet& b) { return a -= b; }

  PointSet complement() const {
    PointSet r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    r.trim();
    return r;
  }

  bool operator==(const PointSet& o) const {
    return size_ == o.size_ && words_ == o.words_;
  }
  bool operator!=(const PointSet& o) const { return !(*this == o); }
  bool operator<(const PointSet& o) const {  // arbitrary total order for canonical listings
    if (size_ != o.size_) return size_ < o.size_;
    for (std::size_t i = words_.size(); i-- > 0;)
      if (words_[i] != o.words_[i]) return words_[i] < o.words_[i];
    return false;
  }

  bool subset_of(const PointSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool intersects(const PointSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        unsigned bit = static_cast<unsigned>(__builtin_ctzll(w));
        f(wi * 64 + bit);
        w &= w - 1;
      }
    }
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for_each([&](std::size_t i) { out.push_back(static_cast<int>(i)); });
    return out;
  }

private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace dtl

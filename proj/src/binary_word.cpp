#include "betaexp/binary_word.hpp"

#include "betaexp/errors.hpp"

#include <algorithm>
#include <bit>

namespace betaexp {

namespace {
constexpr std::size_t blocks_for(std::size_t bits) { return (bits + 63) / 64; }
}  // namespace

BinaryWord::BinaryWord(std::string_view digits) {
  blocks_.reserve(blocks_for(digits.size()));
  for (char c : digits) {
    if (c != '0' && c != '1') {
      throw BetaError(ErrorKind::InvalidArgument,
                      "binary word may only contain '0' and '1': '" + std::string(digits) + "'");
    }
    push_back(c - '0');
  }
}

BinaryWord BinaryWord::zeros(std::size_t n) {
  BinaryWord w;
  w.blocks_.assign(blocks_for(n), 0);
  w.size_ = n;
  return w;
}

BinaryWord BinaryWord::ones(std::size_t n) {
  BinaryWord w;
  w.blocks_.assign(blocks_for(n), ~std::uint64_t{0});
  w.size_ = n;
  w.clear_tail_bits();
  return w;
}

BinaryWord BinaryWord::from_bits(std::uint64_t bits, std::size_t length) {
  BinaryWord w;
  if (length == 0) return w;
  w.size_ = length;
  w.blocks_.assign(1, length == 64 ? bits : (bits << (64 - length)));
  w.clear_tail_bits();
  return w;
}

void BinaryWord::push_back(int digit) {
  if ((size_ & 63) == 0) blocks_.push_back(0);
  if (digit) blocks_[size_ >> 6] |= std::uint64_t{1} << (63 - (size_ & 63));
  ++size_;
}

void BinaryWord::pop_back() {
  if (size_ == 0) return;
  --size_;
  blocks_[size_ >> 6] &= ~(std::uint64_t{1} << (63 - (size_ & 63)));
  if ((size_ & 63) == 0) blocks_.pop_back();
}

void BinaryWord::append(const BinaryWord& tail) {
  const std::size_t shift = size_ & 63;
  if (shift == 0) {
    blocks_.insert(blocks_.end(), tail.blocks_.begin(), tail.blocks_.end());
  } else {
    for (std::size_t b = 0; b < tail.blocks_.size(); ++b) {
      const std::uint64_t chunk = tail.blocks_[b];
      blocks_.back() |= chunk >> shift;
      blocks_.push_back(chunk << (64 - shift));
    }
  }
  size_ += tail.size_;
  blocks_.resize(blocks_for(size_));
  clear_tail_bits();
}

BinaryWord BinaryWord::prefix(std::size_t length) const {
  BinaryWord w;
  w.size_ = std::min(length, size_);
  w.blocks_.assign(blocks_.begin(), blocks_.begin() + static_cast<std::ptrdiff_t>(blocks_for(w.size_)));
  w.clear_tail_bits();
  return w;
}

BinaryWord BinaryWord::suffix(std::size_t from) const {
  BinaryWord w;
  for (std::size_t i = from; i < size_; ++i) w.push_back((*this)[i]);
  return w;
}

BinaryWord BinaryWord::concat(const BinaryWord& tail) const {
  BinaryWord w = *this;
  w.append(tail);
  return w;
}

BinaryWord BinaryWord::complement() const {
  BinaryWord w = *this;
  for (auto& b : w.blocks_) b = ~b;
  w.clear_tail_bits();
  return w;
}

std::size_t BinaryWord::count_ones() const noexcept {
  std::size_t n = 0;
  for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

std::size_t BinaryWord::common_prefix_length(const BinaryWord& other) const noexcept {
  const std::size_t limit = std::min(size_, other.size_);
  const std::size_t nblocks = blocks_for(limit);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::uint64_t diff = blocks_[b] ^ other.blocks_[b];
    if (diff != 0) return std::min(limit, b * 64 + static_cast<std::size_t>(std::countl_zero(diff)));
  }
  return limit;
}

bool BinaryWord::starts_with(const BinaryWord& head) const noexcept {
  return head.size_ <= size_ && common_prefix_length(head) == head.size_;
}

std::string BinaryWord::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

std::strong_ordering BinaryWord::operator<=>(const BinaryWord& other) const noexcept {
  const std::size_t common = common_prefix_length(other);
  if (common < size_ && common < other.size_) {
    return (*this)[common] < other[common] ? std::strong_ordering::less
                                           : std::strong_ordering::greater;
  }
  return size_ <=> other.size_;
}

bool BinaryWord::operator==(const BinaryWord& other) const noexcept {
  return size_ == other.size_ && blocks_ == other.blocks_;
}

std::size_t BinaryWord::hash() const noexcept {
  std::size_t h = std::hash<std::size_t>{}(size_);
  for (auto b : blocks_) h ^= std::hash<std::uint64_t>{}(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

void BinaryWord::clear_tail_bits() noexcept {
  const std::size_t used = size_ & 63;
  if (used != 0 && !blocks_.empty()) blocks_.back() &= ~std::uint64_t{0} << (64 - used);
}

}  // namespace betaexp

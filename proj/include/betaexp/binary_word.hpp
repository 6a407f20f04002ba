#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace betaexp {

/// Finite word over {0,1}. Digit n (0-based) is the n-th map applied: 0 for x -> beta*x,
/// 1 for x -> beta*x - 1. Equivalently the n-th digit of a beta-expansion prefix.
///
/// Bits are packed most-significant-first so that comparing blocks gives lexicographic
/// order on words of equal length.
class BinaryWord {
 public:
  BinaryWord() = default;
  /// Parses an ASCII string of '0'/'1'. Throws BetaError(InvalidArgument) otherwise.
  explicit BinaryWord(std::string_view digits);

  static BinaryWord zeros(std::size_t n);
  static BinaryWord ones(std::size_t n);
  /// Word of length `length` whose digits are the low `length` bits of `bits`, most
  /// significant first. length <= 64.
  static BinaryWord from_bits(std::uint64_t bits, std::size_t length);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  int operator[](std::size_t i) const noexcept {
    return static_cast<int>((blocks_[i >> 6] >> (63 - (i & 63))) & 1u);
  }

  void push_back(int digit);
  void pop_back();
  void append(const BinaryWord& tail);

  BinaryWord prefix(std::size_t length) const;
  BinaryWord suffix(std::size_t from) const;
  BinaryWord concat(const BinaryWord& tail) const;
  BinaryWord complement() const;

  std::size_t count_ones() const noexcept;
  std::size_t count_zeros() const noexcept { return size_ - count_ones(); }

  /// Length of the longest common prefix.
  std::size_t common_prefix_length(const BinaryWord& other) const noexcept;
  bool starts_with(const BinaryWord& head) const noexcept;

  std::string to_string() const;

  /// Lexicographic; a proper prefix sorts before its extensions.
  std::strong_ordering operator<=>(const BinaryWord& other) const noexcept;
  bool operator==(const BinaryWord& other) const noexcept;

  std::size_t hash() const noexcept;

 private:
  void clear_tail_bits() noexcept;

  std::vector<std::uint64_t> blocks_;
  std::size_t size_ = 0;
};

}  // namespace betaexp

template <>
struct std::hash<betaexp::BinaryWord> {
  std::size_t operator()(const betaexp::BinaryWord& w) const noexcept { return w.hash(); }
};

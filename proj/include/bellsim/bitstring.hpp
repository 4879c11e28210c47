#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bellsim {

/// Packed bit-vector of fixed length d. Bit 0 is the first character of the
/// textual form, so "0011" has bits 2 and 3 set.
class BitString {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitString() = default;

  explicit BitString(std::size_t length)
      : length_(length), words_((length + kWordBits - 1) / kWordBits, 0) {
    if (length == 0) throw std::invalid_argument("BitString: length must be positive");
  }

  /// Low `length` bits of `value`; length must be at most 64.
  static BitString from_uint(std::size_t length, word_type value) {
    if (length > kWordBits) throw std::invalid_argument("BitString::from_uint: length > 64");
    BitString s(length);
    s.words_[0] = length == kWordBits ? value : (value & ((word_type{1} << length) - 1));
    return s;
  }

  static BitString from_string(std::string_view text) {
    BitString s(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        s.set(i, true);
      } else if (text[i] != '0') {
        throw std::invalid_argument("BitString::from_string: expected only '0' and '1'");
      }
    }
    return s;
  }

  std::size_t size() const noexcept { return length_; }
  std::span<const word_type> words() const noexcept { return words_; }

  bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }

  void set(std::size_t i, bool v) {
    const word_type mask = word_type{1} << (i % kWordBits);
    if (v) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  void flip(std::size_t i) { words_[i / kWordBits] ^= word_type{1} << (i % kWordBits); }

  /// Overwrites word k; bits past the end are dropped.
  void set_word(std::size_t k, word_type w) {
    const std::size_t tail = length_ - k * kWordBits;
    words_[k] = tail >= kWordBits ? w : (w & ((word_type{1} << tail) - 1));
  }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (word_type w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// Value of the bit-vector as an integer; only for length <= 64.
  word_type to_uint() const {
    if (length_ > kWordBits) throw std::invalid_argument("BitString::to_uint: length > 64");
    return words_.empty() ? 0 : words_[0];
  }

  BitString complement() const {
    BitString out = *this;
    for (auto& w : out.words_) w = ~w;
    out.clear_tail();
    return out;
  }

  BitString& operator^=(const BitString& other) {
    require_same_length(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  friend BitString operator^(BitString lhs, const BitString& rhs) {
    lhs ^= rhs;
    return lhs;
  }

  std::string to_string() const {
    std::string out(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
      if (get(i)) out[i] = '1';
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.words_.rbegin(), a.words_.rend(),
                                                  b.words_.rbegin(), b.words_.rend());
  }

  void require_same_length(const BitString& other) const {
    if (other.length_ != length_) {
      throw std::invalid_argument("BitString length mismatch: " + std::to_string(length_) +
                                  " vs " + std::to_string(other.length_));
    }
  }

 private:
  void clear_tail() {
    const std::size_t rem = length_ % kWordBits;
    if (rem != 0) words_.back() &= (word_type{1} << rem) - 1;
  }

  std::size_t length_ = 0;
  std::vector<word_type> words_;
};

/// Number of positions where x and y differ.
inline std::size_t hamming(const BitString& x, const BitString& y) {
  x.require_same_length(y);
  std::size_t n = 0;
  const auto xw = x.words();
  const auto yw = y.words();
  for (std::size_t i = 0; i < xw.size(); ++i) n += static_cast<std::size_t>(std::popcount(xw[i] ^ yw[i]));
  return n;
}

/// All 2^d strings of length d in increasing integer order (d <= 20).
inline std::vector<BitString> all_bitstrings(std::size_t d) {
  if (d == 0 || d > 20) throw std::invalid_argument("all_bitstrings: need 1 <= d <= 20");
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << d);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << d); ++v) out.push_back(BitString::from_uint(d, v));
  return out;
}

}  // namespace bellsim

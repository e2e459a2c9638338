#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ue/errors.hpp"
#include "ue/rng.hpp"

namespace ue {

// Length-tagged bit string. Bit 0 is the most significant bit when the string
// is read as an integer (big-endian), matching the qubit ordering used for
// computational-basis indices.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  static BitString zeros(std::size_t n) { return BitString(n); }

  static BitString from_uint(std::uint64_t value, std::size_t width) {
    if (width < 64 && (value >> width) != 0) {
      throw DimensionError("value does not fit in " + std::to_string(width) + " bits");
    }
    BitString s(width);
    for (std::size_t i = 0; i < width; ++i) {
      std::size_t shift = width - 1 - i;
      s.bits_[i] = shift < 64 ? static_cast<std::uint8_t>((value >> shift) & 1U) : 0;
    }
    return s;
  }

  static BitString random(std::size_t n, Rng& rng) {
    BitString s(n);
    for (auto& b : s.bits_) b = rng.bit() ? 1 : 0;
    return s;
  }

  // Parses `bit_length` bits from hex; the hex string holds ceil(len/4) digits
  // with the unused leading bits zero.
  static BitString from_hex(std::string_view hex, std::size_t bit_length) {
    std::size_t digits = (bit_length + 3) / 4;
    if (hex.size() != digits) {
      throw DecodeError("hex length " + std::to_string(hex.size()) + " does not encode " +
                        std::to_string(bit_length) + " bits");
    }
    std::vector<std::uint8_t> raw;
    raw.reserve(digits * 4);
    for (char c : hex) {
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else throw DecodeError(std::string("invalid hex digit '") + c + "'");
      for (int k = 3; k >= 0; --k) raw.push_back(static_cast<std::uint8_t>((v >> k) & 1));
    }
    std::size_t pad = raw.size() - bit_length;
    for (std::size_t i = 0; i < pad; ++i) {
      if (raw[i]) throw DecodeError("nonzero padding bits in hex string");
    }
    return BitString(std::vector<std::uint8_t>(raw.begin() + static_cast<std::ptrdiff_t>(pad), raw.end()));
  }

  std::string to_hex() const {
    std::size_t digits = (bits_.size() + 3) / 4;
    std::size_t pad = digits * 4 - bits_.size();
    std::string out;
    out.reserve(digits);
    int acc = 0;
    int count = 0;
    auto flush = [&] {
      out.push_back("0123456789abcdef"[acc]);
      acc = 0;
      count = 0;
    };
    for (std::size_t i = 0; i < pad; ++i) {
      acc <<= 1;
      if (++count == 4) flush();
    }
    for (auto b : bits_) {
      acc = (acc << 1) | b;
      if (++count == 4) flush();
    }
    return out;
  }

  // Big-endian bytes, left-padded with zero bits to a whole number of bytes.
  std::vector<std::uint8_t> to_bytes() const {
    std::size_t pad = (8 - bits_.size() % 8) % 8;
    std::vector<std::uint8_t> out((bits_.size() + pad) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      std::size_t pos = i + pad;
      out[pos / 8] |= static_cast<std::uint8_t>(bits_[i] << (7 - pos % 8));
    }
    return out;
  }

  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_length) {
    if (bytes.size() * 8 < bit_length) throw DecodeError("not enough bytes for the requested bit length");
    std::size_t skip = bytes.size() * 8 - bit_length;
    BitString s(bit_length);
    for (std::size_t i = 0; i < bytes.size() * 8; ++i) {
      bool b = (bytes[i / 8] >> (7 - i % 8)) & 1U;
      if (i < skip) {
        if (b) throw DecodeError("nonzero padding bits");
      } else {
        s.bits_[i - skip] = b;
      }
    }
    return s;
  }

  std::string to_string() const {
    std::string s;
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  static BitString parse_binary(std::string_view text) {
    std::vector<std::uint8_t> bits;
    for (char c : text) {
      if (c != '0' && c != '1') throw DecodeError("expected a binary string, got '" + std::string(text) + "'");
      bits.push_back(c == '1');
    }
    return BitString(std::move(bits));
  }

  std::uint64_t to_uint() const {
    if (bits_.size() > 64) throw DimensionError("bit string wider than 64 bits");
    std::uint64_t v = 0;
    for (auto b : bits_) v = (v << 1) | b;
    return v;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_.at(i) != 0; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  BitString slice(std::size_t offset, std::size_t length) const {
    if (offset + length > bits_.size()) throw DimensionError("slice out of range");
    return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                                               bits_.begin() + static_cast<std::ptrdiff_t>(offset + length)));
  }

  BitString concat(const BitString& tail) const {
    std::vector<std::uint8_t> out(bits_);
    out.insert(out.end(), tail.bits_.begin(), tail.bits_.end());
    return BitString(std::move(out));
  }

  bool is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(), [](auto b) { return b == 0; });
  }

  BitString& operator^=(const BitString& other) {
    if (other.size() != size()) {
      throw DimensionError("XOR of bit strings of lengths " + std::to_string(size()) + " and " +
                           std::to_string(other.size()));
    }
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= other.bits_[i];
    return *this;
  }

  friend BitString operator^(BitString a, const BitString& b) {
    a ^= b;
    return a;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Number of bits needed to index `count` distinct values (0 for count <= 1).
inline std::size_t index_width(std::uint64_t count) {
  std::size_t w = 0;
  while ((std::uint64_t{1} << w) < count) ++w;
  return w;
}

}  // namespace ue

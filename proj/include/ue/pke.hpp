#pragma once

// Toy Regev-style public-key encryption over Z_q, q = 2^16, bit by bit.
// Errors are bounded so decryption is always correct; parameters are far too
// small for security.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ue/bits.hpp"
#include "ue/errors.hpp"
#include "ue/rng.hpp"

namespace ue::pke {

inline constexpr std::size_t kDim = 32;      // secret dimension
inline constexpr std::size_t kSamples = 64;  // rows of A
inline constexpr int kErrorBound = 2;        // e_i in [-2, 2]
// Worst-case noise kSamples * kErrorBound = 128 < q / 4.

struct PublicKey {
  std::vector<std::uint16_t> a;  // kSamples x kDim, row-major
  std::vector<std::uint16_t> b;  // A s + e

  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct SecretKey {
  std::vector<std::uint16_t> s;

  friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

struct Keypair {
  PublicKey pk;
  SecretKey sk;
};

// One (u, v) pair per plaintext bit.
struct Ciphertext {
  std::vector<std::uint16_t> u;  // bits x kDim
  std::vector<std::uint16_t> v;  // bits

  std::size_t bits() const { return v.size(); }
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

inline Keypair pke_keygen(Rng& rng) {
  Keypair kp;
  kp.sk.s.resize(kDim);
  for (auto& x : kp.sk.s) x = static_cast<std::uint16_t>(rng.next());
  kp.pk.a.resize(kSamples * kDim);
  for (auto& x : kp.pk.a) x = static_cast<std::uint16_t>(rng.next());
  kp.pk.b.resize(kSamples);
  for (std::size_t i = 0; i < kSamples; ++i) {
    std::uint32_t acc = 0;
    for (std::size_t j = 0; j < kDim; ++j) acc += std::uint32_t{kp.pk.a[i * kDim + j]} * kp.sk.s[j];
    auto e = static_cast<int>(rng.below(2 * kErrorBound + 1)) - kErrorBound;
    kp.pk.b[i] = static_cast<std::uint16_t>(acc + static_cast<std::uint32_t>(e));
  }
  return kp;
}

inline void check_public_key(const PublicKey& pk) {
  if (pk.a.size() != kSamples * kDim || pk.b.size() != kSamples) throw DecodeError("malformed PKE public key");
}

inline Ciphertext pke_encrypt(const PublicKey& pk, const BitString& m, Rng& rng) {
  check_public_key(pk);
  Ciphertext ct;
  ct.u.assign(m.size() * kDim, 0);
  ct.v.assign(m.size(), 0);
  for (std::size_t bit = 0; bit < m.size(); ++bit) {
    std::uint64_t subset = rng.next();
    std::uint32_t v = 0;
    std::vector<std::uint32_t> u(kDim, 0);
    for (std::size_t i = 0; i < kSamples; ++i) {
      if (!((subset >> i) & 1U)) continue;
      for (std::size_t j = 0; j < kDim; ++j) u[j] += pk.a[i * kDim + j];
      v += pk.b[i];
    }
    if (m[bit]) v += 1U << 15;
    for (std::size_t j = 0; j < kDim; ++j) ct.u[bit * kDim + j] = static_cast<std::uint16_t>(u[j]);
    ct.v[bit] = static_cast<std::uint16_t>(v);
  }
  return ct;
}

inline BitString pke_decrypt(const SecretKey& sk, const Ciphertext& ct) {
  if (sk.s.size() != kDim) throw DecodeError("malformed PKE secret key");
  if (ct.u.size() != ct.v.size() * kDim) throw DecodeError("malformed PKE ciphertext");
  BitString out(ct.bits());
  for (std::size_t bit = 0; bit < ct.bits(); ++bit) {
    std::uint32_t dot = 0;
    for (std::size_t j = 0; j < kDim; ++j) dot += std::uint32_t{ct.u[bit * kDim + j]} * sk.s[j];
    auto d = static_cast<std::uint16_t>(ct.v[bit] - dot);
    out.set(bit, d >= (1U << 14) && d < 3U * (1U << 14));
  }
  return out;
}

inline std::string words_to_hex(const std::vector<std::uint16_t>& w) {
  std::vector<std::uint8_t> bytes;
  for (auto x : w) {
    bytes.push_back(static_cast<std::uint8_t>(x >> 8));
    bytes.push_back(static_cast<std::uint8_t>(x));
  }
  return BitString::from_bytes(bytes, bytes.size() * 8).to_hex();
}

inline std::vector<std::uint16_t> words_from_hex(const std::string& hex, std::size_t count) {
  auto bytes = BitString::from_hex(hex, count * 16).to_bytes();
  std::vector<std::uint16_t> w(count);
  for (std::size_t i = 0; i < count; ++i) w[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  return w;
}

inline nlohmann::json to_json(const PublicKey& pk) { return {{"a", words_to_hex(pk.a)}, {"b", words_to_hex(pk.b)}}; }
inline nlohmann::json to_json(const SecretKey& sk) { return {{"s", words_to_hex(sk.s)}}; }

inline PublicKey public_key_from_json(const nlohmann::json& j) {
  return PublicKey{words_from_hex(j.at("a").get<std::string>(), kSamples * kDim),
                   words_from_hex(j.at("b").get<std::string>(), kSamples)};
}

inline SecretKey secret_key_from_json(const nlohmann::json& j) {
  return SecretKey{words_from_hex(j.at("s").get<std::string>(), kDim)};
}

}  // namespace ue::pke

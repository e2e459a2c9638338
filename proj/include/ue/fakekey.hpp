#pragma once

// PRF-based symmetric encryption with the fake-key property. A key is
// (k, otp); Enc(m) = (r, PRF_k(r) xor m xor otp). FakeGen(ct0, m) picks a
// fresh k' and sets otp' so that ct0 decrypts to m.

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <json.hpp>

#include "ue/bits.hpp"
#include "ue/errors.hpp"
#include "ue/rng.hpp"

namespace ue::ske {

enum class PrfKind { kTable, kKeyedHash };

// PRF_k : {0,1}^ell -> {0,1}^n with lambda-bit keys.
class Prf {
 public:
  // entries[key * 2^ell + input]
  static Prf table(std::size_t lambda, std::size_t ell, std::size_t n, std::vector<BitString> entries) {
    check_table_shape(lambda, ell);
    if (entries.size() != (std::size_t{1} << (lambda + ell))) throw DimensionError("PRF table has the wrong number of rows");
    for (const auto& e : entries) {
      if (e.size() != n) throw DimensionError("PRF table entry has the wrong width");
    }
    Prf p(PrfKind::kTable, lambda, ell, n);
    p.table_ = std::make_shared<const std::vector<BitString>>(std::move(entries));
    return p;
  }

  static Prf random_table(std::size_t lambda, std::size_t ell, std::size_t n, Rng& rng) {
    check_table_shape(lambda, ell);
    std::vector<BitString> entries;
    for (std::size_t i = 0; i < (std::size_t{1} << (lambda + ell)); ++i) entries.push_back(BitString::random(n, rng));
    return table(lambda, ell, n, std::move(entries));
  }

  static Prf constant_table(std::size_t lambda, std::size_t ell, const BitString& value) {
    check_table_shape(lambda, ell);
    return table(lambda, ell, value.size(), std::vector<BitString>(std::size_t{1} << (lambda + ell), value));
  }

  // HMAC-SHA256 in counter mode, truncated to n bits. A stand-in for an
  // abstract post-quantum PRF.
  static Prf keyed_hash(std::size_t lambda, std::size_t ell, std::size_t n) {
    if (lambda == 0) throw DimensionError("PRF key must have at least one bit");
    return Prf(PrfKind::kKeyedHash, lambda, ell, n);
  }

  BitString evaluate(const BitString& key, const BitString& input) const {
    if (key.size() != lambda_) throw DimensionError("PRF key has the wrong length");
    if (input.size() != ell_) throw DimensionError("PRF input has the wrong length");
    if (kind_ == PrfKind::kTable) {
      return (*table_)[static_cast<std::size_t>((key.to_uint() << ell_) | input.to_uint())];
    }
    auto kb = key.to_bytes();
    auto ib = input.to_bytes();
    std::vector<std::uint8_t> stream;
    for (std::uint32_t block = 0; stream.size() * 8 < n_; ++block) {
      std::vector<std::uint8_t> msg;
      for (int s = 24; s >= 0; s -= 8) msg.push_back(static_cast<std::uint8_t>(block >> s));
      for (int s = 24; s >= 0; s -= 8) msg.push_back(static_cast<std::uint8_t>(ell_ >> s));
      msg.insert(msg.end(), ib.begin(), ib.end());
      unsigned char out[EVP_MAX_MD_SIZE];
      unsigned int len = 0;
      if (HMAC(EVP_sha256(), kb.data(), static_cast<int>(kb.size()), msg.data(), msg.size(), out, &len) == nullptr) {
        throw InvariantViolation("HMAC-SHA256 failed");
      }
      stream.insert(stream.end(), out, out + len);
    }
    stream.resize((n_ + 7) / 8);
    if (n_ % 8 != 0) stream[0] &= static_cast<std::uint8_t>(0xffU >> (8 - n_ % 8));
    return BitString::from_bytes(stream, n_);
  }

  PrfKind kind() const { return kind_; }
  std::size_t key_bits() const { return lambda_; }
  std::size_t input_bits() const { return ell_; }
  std::size_t output_bits() const { return n_; }

 private:
  Prf(PrfKind kind, std::size_t lambda, std::size_t ell, std::size_t n) : kind_(kind), lambda_(lambda), ell_(ell), n_(n) {}

  static void check_table_shape(std::size_t lambda, std::size_t ell) {
    if (lambda == 0) throw DimensionError("PRF key must have at least one bit");
    if (lambda + ell > 20) throw BudgetExceeded("truth-table PRF limited to lambda + ell <= 20");
  }

  PrfKind kind_;
  std::size_t lambda_, ell_, n_;
  std::shared_ptr<const std::vector<BitString>> table_;
};

using PrfPtr = std::shared_ptr<const Prf>;

enum class Provenance { kReal, kFake };

struct SkeKey {
  BitString k;
  BitString otp;
  PrfPtr prf;
  Provenance provenance = Provenance::kReal;  // test metadata only

  // Compares key material only.
  friend bool operator==(const SkeKey& a, const SkeKey& b) { return a.k == b.k && a.otp == b.otp; }
};

struct ClassicalCiphertext {
  BitString r;
  BitString c2;

  friend bool operator==(const ClassicalCiphertext&, const ClassicalCiphertext&) = default;
};

inline void check_key(const SkeKey& key) {
  if (!key.prf) throw InvariantViolation("SKE key has no PRF");
  if (key.k.size() != key.prf->key_bits() || key.otp.size() != key.prf->output_bits()) {
    throw DimensionError("SKE key lengths do not match the PRF");
  }
}

inline void check_ciphertext(const Prf& prf, const ClassicalCiphertext& ct) {
  if (ct.r.size() != prf.input_bits() || ct.c2.size() != prf.output_bits()) {
    throw DimensionError("SKE ciphertext lengths do not match the PRF");
  }
}

inline SkeKey ske_setup(const PrfPtr& prf, Rng& rng) {
  BitString k = BitString::random(prf->key_bits(), rng);
  BitString otp = BitString::random(prf->output_bits(), rng);
  return SkeKey{std::move(k), std::move(otp), prf, Provenance::kReal};
}

// Encryption with explicit randomness r.
inline ClassicalCiphertext ske_encrypt_with(const SkeKey& key, const BitString& m, const BitString& r) {
  check_key(key);
  if (m.size() != key.prf->output_bits()) throw DimensionError("SKE message length differs from PRF output width");
  return ClassicalCiphertext{r, key.prf->evaluate(key.k, r) ^ m ^ key.otp};
}

inline ClassicalCiphertext ske_encrypt(const SkeKey& key, const BitString& m, Rng& rng) {
  check_key(key);
  return ske_encrypt_with(key, m, BitString::random(key.prf->input_bits(), rng));
}

inline BitString ske_decrypt(const SkeKey& key, const ClassicalCiphertext& ct) {
  check_key(key);
  check_ciphertext(*key.prf, ct);
  return ct.c2 ^ key.prf->evaluate(key.k, ct.r) ^ key.otp;
}

// FakeGen with explicit k'.
inline SkeKey fake_gen_with(const PrfPtr& prf, const ClassicalCiphertext& ct0, const BitString& m, const BitString& k_prime) {
  check_ciphertext(*prf, ct0);
  if (m.size() != prf->output_bits()) throw DimensionError("fake-key message length differs from PRF output width");
  BitString otp = ct0.c2 ^ prf->evaluate(k_prime, ct0.r) ^ m;
  return SkeKey{k_prime, std::move(otp), prf, Provenance::kFake};
}

inline SkeKey fake_gen(const PrfPtr& prf, const ClassicalCiphertext& ct0, const BitString& m, Rng& rng) {
  return fake_gen_with(prf, ct0, m, BitString::random(prf->key_bits(), rng));
}

enum class FakeGenVariant { kHonest, kUniformOtp };

inline constexpr std::size_t kTvdBudgetBits = 24;

// Exact total-variation distance between (Enc(key, m), key) and
// (Enc(key, 0), FakeGen(ct0, m)), enumerating all randomness with integer
// counts. kUniformOtp replaces otp' by a uniform string (negative control).
inline double fakekey_tvd_bruteforce(const PrfPtr& prf, const BitString& m,
                                     FakeGenVariant variant = FakeGenVariant::kHonest) {
  std::size_t lam = prf->key_bits(), ell = prf->input_bits(), n = prf->output_bits();
  if (m.size() != n) throw DimensionError("message length differs from PRF output width");
  std::size_t extra = variant == FakeGenVariant::kUniformOtp ? n : 0;
  std::size_t bits = lam + ell + n + lam + extra;
  if (bits > kTvdBudgetBits) {
    throw BudgetExceeded("fake-key enumeration needs 2^" + std::to_string(bits) + " cells (budget 2^24)");
  }
  auto outcome = [&](const ClassicalCiphertext& ct, const BitString& k, const BitString& otp) {
    return (((((ct.r.to_uint() << n) | ct.c2.to_uint()) << lam) | k.to_uint()) << n) | otp.to_uint();
  };
  // Both sides scaled to the common denominator 2^(2 lambda + ell + n + extra).
  std::unordered_map<std::uint64_t, std::int64_t> diff;
  std::int64_t real_weight = std::int64_t{1} << (lam + extra);
  std::uint64_t keys = std::uint64_t{1} << lam, pads = std::uint64_t{1} << n, rs = std::uint64_t{1} << ell;
  BitString zero = BitString::zeros(n);
  for (std::uint64_t kv = 0; kv < keys; ++kv) {
    for (std::uint64_t ov = 0; ov < pads; ++ov) {
      SkeKey key{BitString::from_uint(kv, lam), BitString::from_uint(ov, n), prf, Provenance::kReal};
      for (std::uint64_t rv = 0; rv < rs; ++rv) {
        BitString r = BitString::from_uint(rv, ell);
        diff[outcome(ske_encrypt_with(key, m, r), key.k, key.otp)] += real_weight;
        auto ct0 = ske_encrypt_with(key, zero, r);
        for (std::uint64_t kp = 0; kp < keys; ++kp) {
          BitString k_prime = BitString::from_uint(kp, lam);
          if (variant == FakeGenVariant::kHonest) {
            auto fk = fake_gen_with(prf, ct0, m, k_prime);
            diff[outcome(ct0, fk.k, fk.otp)] -= 1;
          } else {
            for (std::uint64_t op = 0; op < pads; ++op) diff[outcome(ct0, k_prime, BitString::from_uint(op, n))] -= 1;
          }
        }
      }
    }
  }
  std::uint64_t total = 0;
  for (const auto& [_, c] : diff) total += static_cast<std::uint64_t>(std::llabs(c));
  return static_cast<double>(total) / std::ldexp(2.0, static_cast<int>(bits));
}

inline nlohmann::json key_to_json(const SkeKey& key) {
  check_key(key);
  return {{"k", key.k.to_hex()},
          {"otp", key.otp.to_hex()},
          {"lambda", key.prf->key_bits()},
          {"ell", key.prf->input_bits()},
          {"n", key.prf->output_bits()}};
}

inline SkeKey key_from_json(const nlohmann::json& j, const PrfPtr& prf) {
  try {
    if (j.at("lambda").get<std::size_t>() != prf->key_bits() || j.at("ell").get<std::size_t>() != prf->input_bits() ||
        j.at("n").get<std::size_t>() != prf->output_bits()) {
      throw DecodeError("SKE key parameters do not match the PRF");
    }
    return SkeKey{BitString::from_hex(j.at("k").get<std::string>(), prf->key_bits()),
                  BitString::from_hex(j.at("otp").get<std::string>(), prf->output_bits()), prf, Provenance::kReal};
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed SKE key: ") + e.what());
  }
}

inline nlohmann::json ciphertext_to_json(const ClassicalCiphertext& ct) {
  return {{"r", ct.r.to_hex()}, {"c2", ct.c2.to_hex()}};
}

inline ClassicalCiphertext ciphertext_from_json(const nlohmann::json& j, const Prf& prf) {
  try {
    return ClassicalCiphertext{BitString::from_hex(j.at("r").get<std::string>(), prf.input_bits()),
                               BitString::from_hex(j.at("c2").get<std::string>(), prf.output_bits())};
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed SKE ciphertext: ") + e.what());
  }
}

}  // namespace ue::ske

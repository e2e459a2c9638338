#pragma once

// One-time conjugate encryption over an arbitrary real-orthogonal basis
// family. Key (theta, r); a message m is encoded as column (m xor r) of the
// basis theta. The Wiesner family gives the BB84 scheme.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ue/bits.hpp"
#include "ue/quantum.hpp"

namespace ue::otue {

using quantum::BasisFamily;
using quantum::DensityMatrix;
using quantum::Matrix;

using FamilyPtr = std::shared_ptr<const BasisFamily>;

struct OtueKey {
  std::size_t theta = 0;
  BitString r;
  FamilyPtr family;

  std::size_t n() const { return r.size(); }

  friend bool operator==(const OtueKey& a, const OtueKey& b) {
    return a.theta == b.theta && a.r == b.r && a.family == b.family;
  }
};

struct QuantumCiphertext {
  DensityMatrix state;
  std::size_t n;
};

inline void check_key(const OtueKey& key) {
  if (!key.family) throw InvariantViolation("key has no basis family");
  if (key.theta >= key.family->size()) throw InvariantViolation("theta outside the family index set");
  if (key.r.size() != key.family->n()) throw DimensionError("one-time pad length differs from family qubit count");
}

// Size of the key space |Theta| * 2^n.
inline std::uint64_t key_space_size(const BasisFamily& family) {
  return static_cast<std::uint64_t>(family.size()) << family.n();
}

// Key with index i in [0, key_space_size): theta = i / 2^n, r = i mod 2^n.
inline OtueKey key_from_index(const FamilyPtr& family, std::uint64_t index) {
  std::uint64_t pads = std::uint64_t{1} << family->n();
  if (index >= key_space_size(*family)) throw DimensionError("key index out of range");
  return OtueKey{static_cast<std::size_t>(index / pads), BitString::from_uint(index % pads, family->n()), family};
}

inline std::uint64_t key_index(const OtueKey& key) {
  return (static_cast<std::uint64_t>(key.theta) << key.n()) | key.r.to_uint();
}

inline OtueKey otue_setup(std::size_t n, const FamilyPtr& family, Rng& rng) {
  if (!family) throw InvariantViolation("null basis family");
  if (family->n() != n) {
    throw DimensionError("message length " + std::to_string(n) + " does not match family of " +
                         std::to_string(family->n()) + " qubits");
  }
  std::size_t theta = static_cast<std::size_t>(rng.below(family->size()));
  return OtueKey{theta, BitString::random(n, rng), family};
}

inline QuantumCiphertext otue_encrypt(const OtueKey& key, const BitString& m) {
  check_key(key);
  if (m.size() != key.n()) throw DimensionError("message length differs from key length");
  auto col = static_cast<std::size_t>((m ^ key.r).to_uint());
  quantum::Vector v = key.family->vector(key.theta, col);
  return QuantumCiphertext{DensityMatrix(v * v.adjoint()), key.n()};
}

// Honest decryption as a POVM whose outcome label is the decrypted message.
inline quantum::Povm decrypt_povm(const OtueKey& key) {
  check_key(key);
  std::size_t count = key.family->dim();
  std::uint64_t pad = key.r.to_uint();
  std::vector<Matrix> elems;
  elems.reserve(count);
  for (std::size_t m = 0; m < count; ++m) elems.push_back(key.family->projector(key.theta, m ^ pad));
  return quantum::Povm(count, std::move(elems));
}

inline std::vector<double> otue_decrypt_distribution(const OtueKey& key, const QuantumCiphertext& ct) {
  check_key(key);
  if (ct.state.dim() != key.family->dim()) throw DimensionError("ciphertext dimension differs from key");
  return quantum::povm_probabilities(decrypt_povm(key), ct.state);
}

inline BitString otue_decrypt_sample(const OtueKey& key, const QuantumCiphertext& ct, Rng& rng) {
  check_key(key);
  if (ct.state.dim() != key.family->dim()) throw DimensionError("ciphertext dimension differs from key");
  return BitString::from_uint(quantum::sample_povm(decrypt_povm(key), ct.state, rng), key.n());
}

// (1 / (2^n |Theta|)) sum_{theta, r} Enc((theta, r), m).
inline DensityMatrix average_ciphertext(const BasisFamily& family, const BitString& m) {
  if (m.size() != family.n()) throw DimensionError("message length differs from family");
  auto d = static_cast<Eigen::Index>(family.dim());
  Matrix sum = Matrix::Zero(d, d);
  std::uint64_t mv = m.to_uint();
  for (std::size_t theta = 0; theta < family.size(); ++theta) {
    for (std::size_t r = 0; r < family.dim(); ++r) sum += family.projector(theta, mv ^ r);
  }
  return DensityMatrix(sum / static_cast<double>(family.size() * family.dim()));
}

inline nlohmann::json key_to_json(const OtueKey& key) {
  check_key(key);
  return {{"theta", key.theta}, {"r", key.r.to_hex()}, {"n", key.n()}, {"family_id", key.family->id()}};
}

// `family` must be the family the key was created for; its id is checked.
inline OtueKey key_from_json(const nlohmann::json& j, const FamilyPtr& family) {
  try {
    auto n = j.at("n").get<std::size_t>();
    if (j.at("family_id").get<std::string>() != family->id()) throw DecodeError("key belongs to a different family");
    OtueKey key{j.at("theta").get<std::size_t>(), BitString::from_hex(j.at("r").get<std::string>(), n), family};
    if (n != family->n()) throw DecodeError("key length differs from the family");
    if (key.theta >= family->size()) throw DecodeError("theta outside the family index set");
    return key;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed one-time key: ") + e.what());
  }
}

}  // namespace ue::otue

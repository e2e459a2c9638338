#pragma once

// Single-key functional encryption for a universal circuit U(d, x). The
// garbled backend garbles U, hands out the data labels for x directly and
// encrypts both labels of description wire i under slot keys pk_{i,0},
// pk_{i,1}; the key for d holds sk_{i,d_i}. The reference backend carries x
// in the clear and evaluates U directly.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ue/bits.hpp"
#include "ue/circuit.hpp"
#include "ue/errors.hpp"
#include "ue/garble.hpp"
#include "ue/pke.hpp"
#include "ue/rng.hpp"

namespace ue::fe {

enum class FeBackend : std::uint8_t { kReference = 0, kGarbled = 1 };

inline std::string to_string(FeBackend b) { return b == FeBackend::kReference ? "reference" : "garbled"; }

inline FeBackend backend_from_string(const std::string& s) {
  if (s == "reference") return FeBackend::kReference;
  if (s == "garbled") return FeBackend::kGarbled;
  throw DecodeError("unknown FE backend '" + s + "'");
}

struct FeMasterPublicKey {
  FeBackend backend = FeBackend::kGarbled;
  std::size_t desc_bits = 0;
  std::vector<pke::PublicKey> slots;  // index 2i + b
};

// Move-only; fe_keygen consumes it, so one master key yields one function key.
class FeMasterSecretKey {
 public:
  FeMasterSecretKey(FeBackend backend, std::size_t desc_bits, std::vector<pke::SecretKey> slots)
      : backend_(backend), desc_bits_(desc_bits), slots_(std::move(slots)) {}
  FeMasterSecretKey(FeMasterSecretKey&&) = default;
  FeMasterSecretKey& operator=(FeMasterSecretKey&&) = default;
  FeMasterSecretKey(const FeMasterSecretKey&) = delete;
  FeMasterSecretKey& operator=(const FeMasterSecretKey&) = delete;

  // Explicit copy for experiment harnesses that must issue keys repeatedly.
  FeMasterSecretKey duplicate() const { return FeMasterSecretKey(backend_, desc_bits_, slots_); }

  FeBackend backend() const { return backend_; }
  std::size_t desc_bits() const { return desc_bits_; }
  const std::vector<pke::SecretKey>& slots() const { return slots_; }

 private:
  FeBackend backend_;
  std::size_t desc_bits_;
  std::vector<pke::SecretKey> slots_;
};

struct FeKeys {
  FeMasterPublicKey mpk;
  FeMasterSecretKey msk;
};

struct FeFunctionKey {
  FeBackend backend = FeBackend::kGarbled;
  BitString d;
  std::vector<pke::SecretKey> secrets;  // sk_{i, d_i}

  friend bool operator==(const FeFunctionKey&, const FeFunctionKey&) = default;
};

struct FeCiphertext {
  FeBackend backend = FeBackend::kGarbled;
  std::shared_ptr<const BooleanCircuit> circuit;
  BitString x;                              // reference backend only
  GarbledCircuit gc;                        // garbled backend only
  std::vector<Label> data_labels;           // active labels for x
  std::vector<pke::Ciphertext> desc_labels;  // 2L, index 2i + b
};

inline FeKeys fe_setup(FeBackend backend, std::size_t desc_bits, Rng& rng) {
  if (desc_bits == 0) throw DimensionError("FE description length must be at least 1");
  FeMasterPublicKey mpk{backend, desc_bits, {}};
  std::vector<pke::SecretKey> sks;
  if (backend == FeBackend::kGarbled) {
    for (std::size_t i = 0; i < 2 * desc_bits; ++i) {
      Rng slot(rng.fork_seed());
      auto kp = pke::pke_keygen(slot);
      mpk.slots.push_back(std::move(kp.pk));
      sks.push_back(std::move(kp.sk));
    }
  }
  return FeKeys{std::move(mpk), FeMasterSecretKey(backend, desc_bits, std::move(sks))};
}

inline FeFunctionKey fe_keygen(FeMasterSecretKey&& msk, const BitString& d) {
  FeMasterSecretKey consumed = std::move(msk);
  if (d.size() != consumed.desc_bits()) throw DimensionError("description length differs from FE setup");
  FeFunctionKey key{consumed.backend(), d, {}};
  if (consumed.backend() == FeBackend::kGarbled) {
    for (std::size_t i = 0; i < d.size(); ++i) key.secrets.push_back(consumed.slots()[2 * i + (d[i] ? 1 : 0)]);
  }
  return key;
}

inline FeCiphertext fe_encrypt(const FeMasterPublicKey& mpk, const std::shared_ptr<const BooleanCircuit>& circuit,
                               const BitString& x, Rng& rng) {
  if (circuit->desc_bits() != mpk.desc_bits) throw DimensionError("circuit description width differs from FE setup");
  if (x.size() != circuit->data_bits()) throw DimensionError("FE plaintext width differs from circuit data width");
  FeCiphertext ct;
  ct.backend = mpk.backend;
  ct.circuit = circuit;
  if (mpk.backend == FeBackend::kReference) {
    ct.x = x;
    return ct;
  }
  GarbleResult g = garble(circuit, rng);
  std::size_t L = circuit->desc_bits();
  for (std::size_t i = 0; i < x.size(); ++i) ct.data_labels.push_back(g.input_labels[L + i][x[i]]);
  for (std::size_t i = 0; i < L; ++i) {
    for (int b = 0; b < 2; ++b) {
      ct.desc_labels.push_back(pke::pke_encrypt(mpk.slots[2 * i + b], label_bits(g.input_labels[i][b]), rng));
    }
  }
  ct.gc = std::move(g.gc);
  return ct;
}

inline BitString fe_decrypt(const FeFunctionKey& key, const FeCiphertext& ct) {
  if (!ct.circuit) throw DecodeError("FE ciphertext has no circuit");
  if (key.backend != ct.backend) throw DecodeError("FE key and ciphertext use different backends");
  const BooleanCircuit& c = *ct.circuit;
  if (key.d.size() != c.desc_bits()) throw DimensionError("function key length differs from circuit");
  if (ct.backend == FeBackend::kReference) return c.evaluate(key.d, ct.x);
  std::size_t L = c.desc_bits();
  if (key.secrets.size() != L || ct.desc_labels.size() != 2 * L || ct.data_labels.size() != c.data_bits()) {
    throw DecodeError("malformed garbled FE ciphertext or key");
  }
  std::vector<Label> inputs;
  for (std::size_t i = 0; i < L; ++i) {
    inputs.push_back(label_from_bits(pke::pke_decrypt(key.secrets[i], ct.desc_labels[2 * i + (key.d[i] ? 1 : 0)])));
  }
  inputs.insert(inputs.end(), ct.data_labels.begin(), ct.data_labels.end());
  return eval_garbled(ct.gc, inputs);
}

// ---------------------------------------------------------------------------
// Binary container for FeCiphertext, all integers big-endian:
//   "UEFE" | u8 version=1 | u8 backend | u32 L | u32 W | u32 gates | u32 outputs
//   gates: u8 type, u32 a, u32 b           (output wire implied by position)
//   outputs: u32 wire
//   reference: W bytes, one per data bit
//   garbled:   2L label blocks: u32 bits, bits*32 u16 u-words, bits u16 v-words
//              W data labels of 16 bytes
//              gate tables: 4 rows (2 for NOT) of 32 bytes each
//              per output: label for 0, label for 1

namespace detail {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  template <std::size_t N>
  void bytes(const std::array<std::uint8_t, N>& a) {
    out_.insert(out_.end(), a.begin(), a.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() {
    if (pos_ >= in_.size()) throw DecodeError("FE container truncated");
    return in_[pos_++];
  }
  std::uint16_t u16() {
    std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> a{};
    for (auto& b : a) b = u8();
    return a;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline constexpr std::uint32_t kMaxContainerCount = 1U << 24;

inline std::uint32_t bounded(std::uint32_t v) {
  if (v > kMaxContainerCount) throw DecodeError("FE container count out of range");
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const FeCiphertext& ct) {
  const BooleanCircuit& c = *ct.circuit;
  detail::Writer w;
  for (char ch : std::string("UEFE")) w.u8(static_cast<std::uint8_t>(ch));
  w.u8(1);
  w.u8(static_cast<std::uint8_t>(ct.backend));
  w.u32(static_cast<std::uint32_t>(c.desc_bits()));
  w.u32(static_cast<std::uint32_t>(c.data_bits()));
  w.u32(static_cast<std::uint32_t>(c.gates().size()));
  w.u32(static_cast<std::uint32_t>(c.outputs().size()));
  for (const auto& g : c.gates()) {
    w.u8(static_cast<std::uint8_t>(g.type));
    w.u32(g.a);
    w.u32(g.b);
  }
  for (auto o : c.outputs()) w.u32(o);
  if (ct.backend == FeBackend::kReference) {
    for (std::size_t i = 0; i < ct.x.size(); ++i) w.u8(ct.x[i] ? 1 : 0);
    return w.take();
  }
  for (const auto& lc : ct.desc_labels) {
    w.u32(static_cast<std::uint32_t>(lc.bits()));
    for (auto u : lc.u) w.u16(u);
    for (auto v : lc.v) w.u16(v);
  }
  for (const auto& l : ct.data_labels) w.bytes(l);
  for (const auto& table : ct.gc.tables) {
    for (const auto& row : table) w.bytes(row);
  }
  for (const auto& lp : ct.gc.output_labels) {
    w.bytes(lp[0]);
    w.bytes(lp[1]);
  }
  return w.take();
}

inline FeCiphertext deserialize(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes);
  for (char ch : std::string("UEFE")) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw DecodeError("not an FE ciphertext container");
  }
  if (r.u8() != 1) throw DecodeError("unsupported FE container version");
  std::uint8_t backend = r.u8();
  if (backend > 1) throw DecodeError("unknown FE backend in container");
  std::uint32_t L = detail::bounded(r.u32()), W = detail::bounded(r.u32());
  std::uint32_t ngates = detail::bounded(r.u32()), nout = detail::bounded(r.u32());
  std::vector<Gate> gates;
  for (std::uint32_t k = 0; k < ngates; ++k) {
    std::uint8_t type = r.u8();
    if (type > 2) throw DecodeError("unknown gate type in container");
    std::uint32_t a = r.u32(), b = r.u32();
    gates.push_back(Gate{static_cast<GateType>(type), a, b, L + W + k});
  }
  std::vector<std::uint32_t> outputs;
  for (std::uint32_t i = 0; i < nout; ++i) outputs.push_back(r.u32());
  FeCiphertext ct;
  ct.backend = static_cast<FeBackend>(backend);
  try {
    ct.circuit = std::make_shared<const BooleanCircuit>(BooleanCircuit::from_parts(L, W, std::move(gates), std::move(outputs)));
  } catch (const InvariantViolation& e) {
    throw DecodeError(std::string("invalid circuit in container: ") + e.what());
  }
  if (ct.backend == FeBackend::kReference) {
    ct.x = BitString(W);
    for (std::uint32_t i = 0; i < W; ++i) {
      std::uint8_t v = r.u8();
      if (v > 1) throw DecodeError("data bit out of range");
      ct.x.set(i, v == 1);
    }
  } else {
    for (std::uint32_t i = 0; i < 2 * L; ++i) {
      pke::Ciphertext lc;
      std::uint32_t bits = detail::bounded(r.u32());
      if (bits != kLabelBytes * 8) throw DecodeError("label ciphertext has the wrong width");
      for (std::uint32_t j = 0; j < bits * pke::kDim; ++j) lc.u.push_back(r.u16());
      for (std::uint32_t j = 0; j < bits; ++j) lc.v.push_back(r.u16());
      ct.desc_labels.push_back(std::move(lc));
    }
    for (std::uint32_t i = 0; i < W; ++i) ct.data_labels.push_back(r.bytes<kLabelBytes>());
    ct.gc.circuit = ct.circuit;
    for (const auto& g : ct.circuit->gates()) {
      std::vector<Row> rows;
      for (int i = 0; i < (g.type == GateType::kNot ? 2 : 4); ++i) rows.push_back(r.bytes<2 * kLabelBytes>());
      ct.gc.tables.push_back(std::move(rows));
    }
    for (std::uint32_t i = 0; i < nout; ++i) {
      LabelPair lp{r.bytes<kLabelBytes>(), r.bytes<kLabelBytes>()};
      ct.gc.output_labels.push_back(lp);
    }
  }
  if (!r.done()) throw DecodeError("trailing bytes after FE container");
  return ct;
}

// ---------------------------------------------------------------------------
// JSON for keys.

inline nlohmann::json to_json(const FeMasterPublicKey& mpk) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& pk : mpk.slots) slots.push_back(pke::to_json(pk));
  return {{"backend", to_string(mpk.backend)}, {"L", mpk.desc_bits}, {"slots", slots}};
}

inline nlohmann::json to_json(const FeMasterSecretKey& msk) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& sk : msk.slots()) slots.push_back(pke::to_json(sk));
  return {{"backend", to_string(msk.backend())}, {"L", msk.desc_bits()}, {"slots", slots}};
}

inline nlohmann::json to_json(const FeFunctionKey& key) {
  nlohmann::json secrets = nlohmann::json::array();
  for (const auto& sk : key.secrets) secrets.push_back(pke::to_json(sk));
  return {{"backend", to_string(key.backend)}, {"L", key.d.size()}, {"d", key.d.to_hex()}, {"secrets", secrets}};
}

inline FeMasterPublicKey mpk_from_json(const nlohmann::json& j) {
  try {
    FeMasterPublicKey mpk{backend_from_string(j.at("backend").get<std::string>()), j.at("L").get<std::size_t>(), {}};
    for (const auto& s : j.at("slots")) mpk.slots.push_back(pke::public_key_from_json(s));
    std::size_t want = mpk.backend == FeBackend::kGarbled ? 2 * mpk.desc_bits : 0;
    if (mpk.slots.size() != want) throw DecodeError("FE public key has the wrong number of slots");
    return mpk;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed FE public key: ") + e.what());
  }
}

inline FeFunctionKey function_key_from_json(const nlohmann::json& j) {
  try {
    auto L = j.at("L").get<std::size_t>();
    FeFunctionKey key{backend_from_string(j.at("backend").get<std::string>()),
                      BitString::from_hex(j.at("d").get<std::string>(), L), {}};
    for (const auto& s : j.at("secrets")) key.secrets.push_back(pke::secret_key_from_json(s));
    std::size_t want = key.backend == FeBackend::kGarbled ? L : 0;
    if (key.secrets.size() != want) throw DecodeError("FE function key has the wrong number of secrets");
    return key;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed FE function key: ") + e.what());
  }
}

}  // namespace ue::fe

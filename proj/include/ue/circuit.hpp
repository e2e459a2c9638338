#pragma once

// Boolean circuits over {AND, XOR, NOT} with two input groups: description
// bits d (wires 0..L-1) and data bits x (wires L..L+W-1). Gate k drives wire
// L + W + k. Also builds the circuit U(d, x) = F[d](x) with
// F[ct](b, K, m) = m if b = 1, SKE.Dec(K, ct) otherwise.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ue/bits.hpp"
#include "ue/errors.hpp"
#include "ue/fakekey.hpp"

namespace ue::fe {

enum class GateType : std::uint8_t { kAnd = 0, kXor = 1, kNot = 2 };

struct Gate {
  GateType type;
  std::uint32_t a;
  std::uint32_t b;  // unused for NOT
  std::uint32_t out;

  friend bool operator==(const Gate&, const Gate&) = default;
};

class BooleanCircuit {
 public:
  BooleanCircuit(std::size_t desc_bits, std::size_t data_bits) : desc_bits_(desc_bits), data_bits_(data_bits) {
    if (desc_bits + data_bits == 0) throw DimensionError("circuit needs at least one input");
  }

  static BooleanCircuit from_parts(std::size_t desc_bits, std::size_t data_bits, std::vector<Gate> gates,
                                   std::vector<std::uint32_t> outputs) {
    BooleanCircuit c(desc_bits, data_bits);
    c.gates_ = std::move(gates);
    c.outputs_ = std::move(outputs);
    c.validate();
    return c;
  }

  std::size_t desc_bits() const { return desc_bits_; }
  std::size_t data_bits() const { return data_bits_; }
  std::size_t num_inputs() const { return desc_bits_ + data_bits_; }
  std::size_t num_wires() const { return num_inputs() + gates_.size(); }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<std::uint32_t>& outputs() const { return outputs_; }

  std::uint32_t desc_wire(std::size_t i) const {
    if (i >= desc_bits_) throw DimensionError("description wire out of range");
    return static_cast<std::uint32_t>(i);
  }
  std::uint32_t data_wire(std::size_t i) const {
    if (i >= data_bits_) throw DimensionError("data wire out of range");
    return static_cast<std::uint32_t>(desc_bits_ + i);
  }

  std::uint32_t add_gate(GateType type, std::uint32_t a, std::uint32_t b = 0) {
    auto out = static_cast<std::uint32_t>(num_wires());
    if (a >= out || (type != GateType::kNot && b >= out)) throw InvariantViolation("gate reads an undriven wire");
    gates_.push_back(Gate{type, a, type == GateType::kNot ? 0 : b, out});
    return out;
  }
  std::uint32_t add_and(std::uint32_t a, std::uint32_t b) { return add_gate(GateType::kAnd, a, b); }
  std::uint32_t add_xor(std::uint32_t a, std::uint32_t b) { return add_gate(GateType::kXor, a, b); }
  std::uint32_t add_not(std::uint32_t a) { return add_gate(GateType::kNot, a); }

  // Constant-0 wire, x0 xor x0, created on first use.
  std::uint32_t zero() {
    if (!zero_) zero_ = add_xor(0, 0);
    return *zero_;
  }

  void set_outputs(std::vector<std::uint32_t> outputs) {
    for (auto w : outputs) {
      if (w >= num_wires()) throw InvariantViolation("output wire out of range");
    }
    outputs_ = std::move(outputs);
  }

  void validate() const {
    for (std::size_t k = 0; k < gates_.size(); ++k) {
      const Gate& g = gates_[k];
      auto out = static_cast<std::uint32_t>(num_inputs() + k);
      if (g.out != out) throw InvariantViolation("gate " + std::to_string(k) + " does not drive its own wire");
      if (static_cast<std::uint8_t>(g.type) > 2) throw InvariantViolation("unknown gate type");
      if (g.a >= out || (g.type != GateType::kNot && g.b >= out)) {
        throw InvariantViolation("gate " + std::to_string(k) + " is not in topological order");
      }
    }
    for (auto w : outputs_) {
      if (w >= num_wires()) throw InvariantViolation("output wire out of range");
    }
  }

  std::vector<std::uint8_t> wire_values(const BitString& d, const BitString& x) const {
    if (d.size() != desc_bits_ || x.size() != data_bits_) throw DimensionError("circuit input widths differ");
    std::vector<std::uint8_t> v(num_wires(), 0);
    for (std::size_t i = 0; i < desc_bits_; ++i) v[i] = d[i];
    for (std::size_t i = 0; i < data_bits_; ++i) v[desc_bits_ + i] = x[i];
    for (const auto& g : gates_) {
      switch (g.type) {
        case GateType::kAnd: v[g.out] = v[g.a] & v[g.b]; break;
        case GateType::kXor: v[g.out] = v[g.a] ^ v[g.b]; break;
        case GateType::kNot: v[g.out] = v[g.a] ^ 1U; break;
      }
    }
    return v;
  }

  BitString evaluate(const BitString& d, const BitString& x) const {
    auto v = wire_values(d, x);
    BitString out(outputs_.size());
    for (std::size_t i = 0; i < outputs_.size(); ++i) out.set(i, v[outputs_[i]] != 0);
    return out;
  }

 private:
  std::size_t desc_bits_;
  std::size_t data_bits_;
  std::vector<Gate> gates_;
  std::vector<std::uint32_t> outputs_;
  std::optional<std::uint32_t> zero_;
};

// Description bits whose flip changes the output at (d, x).
inline std::vector<std::size_t> description_sensitivity(const BooleanCircuit& c, const BitString& d, const BitString& x) {
  BitString base = c.evaluate(d, x);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    BitString flipped = d;
    flipped.set(i, !d[i]);
    if (c.evaluate(flipped, x) != base) out.push_back(i);
  }
  return out;
}

// Bit layout of F[ct]: d = (r, c2); x = (b, K valid, k, otp, m valid, m).
// A missing input is all zeros with its valid bit cleared; the circuit never
// reads the valid bits.
struct FLayout {
  std::size_t lambda;
  std::size_t ell;
  std::size_t width;

  explicit FLayout(const ske::Prf& prf) : lambda(prf.key_bits()), ell(prf.input_bits()), width(prf.output_bits()) {}

  std::size_t desc_bits() const { return ell + width; }
  std::size_t data_bits() const { return 3 + lambda + 2 * width; }

  BitString description(const ske::ClassicalCiphertext& ct) const { return ct.r.concat(ct.c2); }
  ske::ClassicalCiphertext ciphertext(const BitString& d) const {
    if (d.size() != desc_bits()) throw DimensionError("description width differs from layout");
    return {d.slice(0, ell), d.slice(ell, width)};
  }

  // (1, bottom, m)
  BitString message_input(const BitString& m) const {
    if (m.size() != width) throw DimensionError("F message width differs from layout");
    return BitString::parse_binary("10")
        .concat(BitString::zeros(lambda + width))
        .concat(BitString::parse_binary("1"))
        .concat(m);
  }

  // (0, K, bottom)
  BitString key_input(const ske::SkeKey& key) const {
    if (key.k.size() != lambda || key.otp.size() != width) throw DimensionError("F key width differs from layout");
    return BitString::parse_binary("01").concat(key.k).concat(key.otp).concat(BitString::zeros(1 + width));
  }
};

inline constexpr std::size_t kMaxMuxBits = 12;

// U(d, x) = F[d](x) with PRF_k(r) realised as a (k, r)-indexed multiplexer
// over the truth table: one-hot decode, then XOR of the selected rows.
inline BooleanCircuit build_F_circuit(const ske::Prf& prf) {
  if (prf.kind() != ske::PrfKind::kTable) throw InvariantViolation("F circuit needs a truth-table PRF");
  FLayout lay(prf);
  std::size_t sel = lay.lambda + lay.ell;
  if (sel > kMaxMuxBits) throw BudgetExceeded("PRF table too large for the F circuit (lambda + ell <= 12)");
  BooleanCircuit c(lay.desc_bits(), lay.data_bits());

  auto r_wire = [&](std::size_t i) { return c.desc_wire(i); };
  auto c2_wire = [&](std::size_t i) { return c.desc_wire(lay.ell + i); };
  std::uint32_t b = c.data_wire(0);
  auto k_wire = [&](std::size_t i) { return c.data_wire(2 + i); };
  auto otp_wire = [&](std::size_t i) { return c.data_wire(2 + lay.lambda + i); };
  auto m_wire = [&](std::size_t i) { return c.data_wire(3 + lay.lambda + lay.width + i); };

  // Selector bits k || r, big-endian, and their negations.
  std::vector<std::uint32_t> s, ns;
  for (std::size_t i = 0; i < lay.lambda; ++i) s.push_back(k_wire(i));
  for (std::size_t i = 0; i < lay.ell; ++i) s.push_back(r_wire(i));
  for (auto w : s) ns.push_back(c.add_not(w));

  std::size_t rows = std::size_t{1} << sel;
  std::vector<std::uint32_t> onehot(rows);
  for (std::size_t idx = 0; idx < rows; ++idx) {
    std::uint32_t acc = 0;
    for (std::size_t j = 0; j < sel; ++j) {
      bool bit = (idx >> (sel - 1 - j)) & 1U;
      std::uint32_t lit = bit ? s[j] : ns[j];
      acc = j == 0 ? lit : c.add_and(acc, lit);
    }
    onehot[idx] = acc;
  }

  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < lay.width; ++j) {
    std::optional<std::uint32_t> prf_bit;
    for (std::size_t idx = 0; idx < rows; ++idx) {
      BitString key = BitString::from_uint(idx >> lay.ell, lay.lambda);
      BitString in = BitString::from_uint(idx & ((std::size_t{1} << lay.ell) - 1), lay.ell);
      if (prf.evaluate(key, in)[j]) prf_bit = prf_bit ? c.add_xor(*prf_bit, onehot[idx]) : onehot[idx];
    }
    std::uint32_t dec = c.add_xor(c2_wire(j), otp_wire(j));
    if (prf_bit) dec = c.add_xor(dec, *prf_bit);
    // b ? m : dec  =  dec xor (b and (m xor dec))
    out.push_back(c.add_xor(dec, c.add_and(b, c.add_xor(m_wire(j), dec))));
  }
  c.set_outputs(std::move(out));
  c.validate();
  return c;
}

// Direct software evaluation of F[d](x).
inline BitString evaluate_F(const ske::PrfPtr& prf, const BitString& d, const BitString& x) {
  FLayout lay(*prf);
  if (x.size() != lay.data_bits()) throw DimensionError("data width differs from layout");
  if (x[0]) return x.slice(3 + lay.lambda + lay.width, lay.width);
  ske::SkeKey key{x.slice(2, lay.lambda), x.slice(2 + lay.lambda, lay.width), prf};
  return ske::ske_decrypt(key, lay.ciphertext(d));
}

}  // namespace ue::fe

#pragma once

// Yao garbling with double-encrypted rows. A row for inputs (La, Lb) of gate g
// is SHA-256(La || Lb || g) xor (Lout || 0^128); the zero tag identifies the
// single row that decrypts. Rows are randomly permuted.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <vector>

#include <openssl/sha.h>

#include "ue/bits.hpp"
#include "ue/circuit.hpp"
#include "ue/errors.hpp"
#include "ue/rng.hpp"

namespace ue::fe {

inline constexpr std::size_t kLabelBytes = 16;
using Label = std::array<std::uint8_t, kLabelBytes>;
using Row = std::array<std::uint8_t, 2 * kLabelBytes>;
using LabelPair = std::array<Label, 2>;  // labels for wire values 0 and 1

inline Label random_label(Rng& rng) {
  Label l{};
  for (std::size_t i = 0; i < kLabelBytes; i += 8) {
    std::uint64_t v = rng.next();
    std::memcpy(l.data() + i, &v, 8);
  }
  return l;
}

inline BitString label_bits(const Label& l) { return BitString::from_bytes(l, kLabelBytes * 8); }

inline Label label_from_bits(const BitString& b) {
  auto bytes = b.to_bytes();
  if (bytes.size() != kLabelBytes) throw DecodeError("label has the wrong width");
  Label l{};
  std::copy(bytes.begin(), bytes.end(), l.begin());
  return l;
}

struct GarbledCircuit {
  std::shared_ptr<const BooleanCircuit> circuit;
  std::vector<std::vector<Row>> tables;  // 4 rows per AND/XOR, 2 per NOT
  std::vector<LabelPair> output_labels;  // per output wire

  friend bool operator==(const GarbledCircuit& a, const GarbledCircuit& b) {
    return a.tables == b.tables && a.output_labels == b.output_labels &&
           a.circuit->gates() == b.circuit->gates() && a.circuit->outputs() == b.circuit->outputs();
  }
};

struct GarbleResult {
  GarbledCircuit gc;
  std::vector<LabelPair> input_labels;  // per input wire, description then data
};

namespace detail {

inline Row row_pad(const Label& a, const Label* b, std::uint32_t gate) {
  std::uint8_t buf[2 * kLabelBytes + 4];
  std::size_t len = 0;
  std::memcpy(buf, a.data(), kLabelBytes);
  len += kLabelBytes;
  if (b) {
    std::memcpy(buf + len, b->data(), kLabelBytes);
    len += kLabelBytes;
  }
  for (int s = 24; s >= 0; s -= 8) buf[len++] = static_cast<std::uint8_t>(gate >> s);
  Row out{};
  SHA256(buf, len, out.data());
  return out;
}

inline Row seal(const Row& pad, const Label& out) {
  Row r = pad;
  for (std::size_t i = 0; i < kLabelBytes; ++i) r[i] ^= out[i];
  return r;
}

}  // namespace detail

inline GarbleResult garble(std::shared_ptr<const BooleanCircuit> circuit, Rng& rng) {
  circuit->validate();
  std::vector<LabelPair> labels(circuit->num_wires());
  for (auto& lp : labels) lp = {random_label(rng), random_label(rng)};
  GarbleResult res;
  res.gc.circuit = circuit;
  for (std::size_t k = 0; k < circuit->gates().size(); ++k) {
    const Gate& g = circuit->gates()[k];
    auto gid = static_cast<std::uint32_t>(k);
    std::vector<Row> rows;
    if (g.type == GateType::kNot) {
      for (int va = 0; va < 2; ++va) rows.push_back(detail::seal(detail::row_pad(labels[g.a][va], nullptr, gid), labels[g.out][va ^ 1]));
    } else {
      for (int va = 0; va < 2; ++va) {
        for (int vb = 0; vb < 2; ++vb) {
          int v = g.type == GateType::kAnd ? (va & vb) : (va ^ vb);
          rows.push_back(detail::seal(detail::row_pad(labels[g.a][va], &labels[g.b][vb], gid), labels[g.out][v]));
        }
      }
    }
    std::shuffle(rows.begin(), rows.end(), rng.engine());
    res.gc.tables.push_back(std::move(rows));
  }
  for (auto w : circuit->outputs()) res.gc.output_labels.push_back(labels[w]);
  res.input_labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(circuit->num_inputs()));
  return res;
}

// Active labels for the input assignment (d, x).
inline std::vector<Label> select_labels(const std::vector<LabelPair>& input_labels, const BitString& d,
                                        const BitString& x) {
  if (d.size() + x.size() != input_labels.size()) throw DimensionError("assignment width differs from input count");
  std::vector<Label> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(input_labels[i][d[i]]);
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(input_labels[d.size() + i][x[i]]);
  return out;
}

inline BitString eval_garbled(const GarbledCircuit& gc, const std::vector<Label>& inputs) {
  const BooleanCircuit& c = *gc.circuit;
  if (inputs.size() != c.num_inputs()) throw DimensionError("need exactly one label per input wire");
  if (gc.tables.size() != c.gates().size() || gc.output_labels.size() != c.outputs().size()) {
    throw DecodeError("garbled circuit does not match its topology");
  }
  std::vector<Label> active(c.num_wires());
  std::copy(inputs.begin(), inputs.end(), active.begin());
  for (std::size_t k = 0; k < c.gates().size(); ++k) {
    const Gate& g = c.gates()[k];
    Row pad = detail::row_pad(active[g.a], g.type == GateType::kNot ? nullptr : &active[g.b], static_cast<std::uint32_t>(k));
    int found = 0;
    for (const Row& row : gc.tables[k]) {
      Row plain;
      for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = row[i] ^ pad[i];
      if (std::all_of(plain.begin() + kLabelBytes, plain.end(), [](std::uint8_t v) { return v == 0; })) {
        std::copy(plain.begin(), plain.begin() + kLabelBytes, active[g.out].begin());
        ++found;
      }
    }
    if (found != 1) throw DecryptionFailure("garbled gate " + std::to_string(k) + " has no decryptable row");
  }
  BitString out(c.outputs().size());
  for (std::size_t i = 0; i < c.outputs().size(); ++i) {
    const Label& l = active[c.outputs()[i]];
    if (l == gc.output_labels[i][0]) {
      out.set(i, false);
    } else if (l == gc.output_labels[i][1]) {
      out.set(i, true);
    } else {
      throw DecryptionFailure("output label matches neither value");
    }
  }
  return out;
}

}  // namespace ue::fe

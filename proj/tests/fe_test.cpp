#include "ue/circuit.hpp"
#include "ue/fe.hpp"
#include "ue/garble.hpp"
#include "ue/pke.hpp"

#include <type_traits>

#include <gtest/gtest.h>

using namespace ue;
using namespace ue::fe;

namespace {

BitString bits(std::uint64_t v, std::size_t w) { return BitString::from_uint(v, w); }

ske::PrfPtr table_prf(std::size_t lam, std::size_t ell, std::size_t w, std::uint64_t seed) {
  Rng rng(seed);
  return std::make_shared<const ske::Prf>(ske::Prf::random_table(lam, ell, w, rng));
}

std::shared_ptr<const BooleanCircuit> random_circuit(std::size_t L, std::size_t W, std::size_t gates, Rng& rng) {
  BooleanCircuit c(L, W);
  for (std::size_t k = 0; k < gates; ++k) {
    auto wires = static_cast<std::uint32_t>(c.num_wires());
    auto a = static_cast<std::uint32_t>(rng.below(wires));
    auto b = static_cast<std::uint32_t>(rng.below(wires));
    switch (rng.below(3)) {
      case 0: c.add_and(a, b); break;
      case 1: c.add_xor(a, b); break;
      default: c.add_not(a); break;
    }
  }
  std::vector<std::uint32_t> outs;
  for (int i = 0; i < 6; ++i) outs.push_back(static_cast<std::uint32_t>(c.num_wires() - 1 - rng.below(gates)));
  c.set_outputs(outs);
  return std::make_shared<const BooleanCircuit>(std::move(c));
}

}  // namespace

TEST(ToyPke, RoundTrip) {
  Rng rng(1);
  auto kp = pke::pke_keygen(rng);
  for (int i = 0; i < 1000; ++i) {
    BitString m = BitString::random(32, rng);
    ASSERT_EQ(pke::pke_decrypt(kp.sk, pke::pke_encrypt(kp.pk, m, rng)), m);
  }
}

TEST(ToyPke, WrongKeyGarbles) {
  Rng rng(2);
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = pke::pke_keygen(rng);
    auto b = pke::pke_keygen(rng);
    BitString m = BitString::random(16, rng);
    same += pke::pke_decrypt(b.sk, pke::pke_encrypt(a.pk, m, rng)) == m;
  }
  EXPECT_LE(same, 10);
}

TEST(ToyPke, DeterministicAndSerializable) {
  Rng a(3), b(3);
  auto ka = pke::pke_keygen(a);
  auto kb = pke::pke_keygen(b);
  EXPECT_EQ(ka.pk, kb.pk);
  EXPECT_EQ(ka.sk, kb.sk);
  EXPECT_EQ(pke::public_key_from_json(pke::to_json(ka.pk)), ka.pk);
  EXPECT_EQ(pke::secret_key_from_json(pke::to_json(ka.sk)), ka.sk);
  pke::Ciphertext bad{{1, 2, 3}, {4}};
  EXPECT_THROW(pke::pke_decrypt(ka.sk, bad), DecodeError);
}

TEST(Circuit, RejectsBadTopology) {
  EXPECT_THROW(BooleanCircuit::from_parts(1, 1, {Gate{GateType::kAnd, 0, 2, 2}}, {2}), InvariantViolation);
  EXPECT_THROW(BooleanCircuit::from_parts(1, 1, {Gate{GateType::kAnd, 0, 1, 3}}, {2}), InvariantViolation);
  EXPECT_THROW(BooleanCircuit::from_parts(1, 1, {Gate{GateType::kXor, 0, 1, 2}}, {5}), InvariantViolation);
  BooleanCircuit c(1, 1);
  EXPECT_THROW(c.add_and(0, 7), InvariantViolation);
}

TEST(Circuit, ZeroWire) {
  BooleanCircuit c(1, 1);
  auto z = c.zero();
  EXPECT_EQ(c.zero(), z);
  c.set_outputs({z, c.add_not(z)});
  for (std::uint64_t v = 0; v < 4; ++v) EXPECT_EQ(c.evaluate(bits(v >> 1, 1), bits(v & 1, 1)), bits(1, 2));
}

TEST(Garble, XorGateTruthTable) {
  BooleanCircuit c(1, 1);
  c.set_outputs({c.add_xor(0, 1)});
  auto cp = std::make_shared<const BooleanCircuit>(c);
  Rng rng(4);
  auto g = garble(cp, rng);
  for (std::uint64_t a = 0; a < 2; ++a) {
    for (std::uint64_t b = 0; b < 2; ++b) {
      EXPECT_EQ(eval_garbled(g.gc, select_labels(g.input_labels, bits(a, 1), bits(b, 1))), bits(a ^ b, 1));
    }
  }
}

TEST(Garble, RandomCircuitsMatchPlainEvaluation) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    std::size_t gates = t == 0 ? 50 : 1 + rng.below(200);
    auto c = random_circuit(4, 5, gates, rng);
    auto g = garble(c, rng);
    for (int i = 0; i < 100; ++i) {
      BitString d = BitString::random(4, rng), x = BitString::random(5, rng);
      ASSERT_EQ(eval_garbled(g.gc, select_labels(g.input_labels, d, x)), c->evaluate(d, x));
    }
  }
}

TEST(Garble, WrongLabelDetected) {
  Rng rng(6);
  auto c = random_circuit(2, 2, 30, rng);
  auto g = garble(c, rng);
  auto labels = select_labels(g.input_labels, bits(1, 2), bits(2, 2));
  labels[0] = random_label(rng);
  EXPECT_THROW(eval_garbled(g.gc, labels), DecryptionFailure);
  // Labels for both values of one wire never appear together, but a label
  // from a different garbling is equally useless.
  auto other = garble(c, rng);
  EXPECT_THROW(eval_garbled(other.gc, select_labels(g.input_labels, bits(1, 2), bits(2, 2))), DecryptionFailure);
}

TEST(FCircuit, ExhaustiveAgreementAtTwoBitParameters) {
  auto prf = table_prf(2, 2, 2, 7);
  auto c = build_F_circuit(*prf);
  FLayout lay(*prf);
  ASSERT_EQ(c.desc_bits(), 4u);
  ASSERT_EQ(c.data_bits(), 9u);
  for (std::uint64_t dv = 0; dv < 16; ++dv) {
    for (std::uint64_t xv = 0; xv < 512; ++xv) {
      BitString d = bits(dv, 4), x = bits(xv, 9);
      ASSERT_EQ(c.evaluate(d, x), evaluate_F(prf, d, x)) << dv << " " << xv;
    }
  }
}

TEST(FCircuit, MessageBranchIgnoresDescription) {
  auto prf = table_prf(2, 2, 3, 8);
  auto c = build_F_circuit(*prf);
  FLayout lay(*prf);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    BitString m = BitString::random(3, rng), d = BitString::random(lay.desc_bits(), rng);
    EXPECT_EQ(c.evaluate(d, lay.message_input(m)), m);
    EXPECT_TRUE(description_sensitivity(c, d, lay.message_input(m)).empty());
  }
}

TEST(FCircuit, KeyBranchDecrypts) {
  auto prf = table_prf(2, 2, 3, 9);
  auto c = build_F_circuit(*prf);
  FLayout lay(*prf);
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    auto key = ske::ske_setup(prf, rng);
    BitString v = BitString::random(3, rng);
    auto ct = ske::ske_encrypt(key, v, rng);
    EXPECT_EQ(c.evaluate(lay.description(ct), lay.key_input(key)), v);
  }
}

TEST(FCircuit, RejectsUnsupportedPrf) {
  EXPECT_THROW(build_F_circuit(ske::Prf::keyed_hash(8, 8, 4)), InvariantViolation);
  Rng rng(1);
  EXPECT_THROW(build_F_circuit(ske::Prf::random_table(7, 7, 2, rng)), BudgetExceeded);
}

TEST(FeSetup, SlotCountsAndIndependence) {
  Rng rng(10);
  auto keys = fe_setup(FeBackend::kGarbled, 5, rng);
  EXPECT_EQ(keys.mpk.slots.size(), 10u);
  EXPECT_EQ(keys.msk.slots().size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = i + 1; j < 10; ++j) EXPECT_NE(keys.msk.slots()[i], keys.msk.slots()[j]);
  }
  EXPECT_THROW(fe_setup(FeBackend::kGarbled, 0, rng), DimensionError);
  static_assert(!std::is_copy_constructible_v<FeMasterSecretKey>);
}

TEST(FeKeygen, RevealsOneSecretPerIndex) {
  Rng rng(11);
  auto keys = fe_setup(FeBackend::kGarbled, 4, rng);
  auto copy = keys.msk.duplicate();
  BitString d = bits(0b1010, 4), e = bits(0b1001, 4);
  auto kd = fe_keygen(std::move(keys.msk), d);
  auto ke = fe_keygen(std::move(copy), e);
  ASSERT_EQ(kd.secrets.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(kd.secrets[i] == ke.secrets[i], d[i] == e[i]);
  Rng r2(11);
  auto again = fe_setup(FeBackend::kGarbled, 4, r2);
  EXPECT_THROW(fe_keygen(std::move(again.msk), bits(0, 3)), DimensionError);
}

TEST(FeEncrypt, ShapeAndFreshness) {
  auto prf = table_prf(2, 2, 2, 12);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  Rng rng(12);
  auto keys = fe_setup(FeBackend::kGarbled, lay.desc_bits(), rng);
  BitString x = lay.message_input(bits(2, 2));
  auto a = fe_encrypt(keys.mpk, circuit, x, rng);
  auto b = fe_encrypt(keys.mpk, circuit, x, rng);
  EXPECT_EQ(a.desc_labels.size(), 2 * lay.desc_bits());
  EXPECT_NE(serialize(a), serialize(b));
  EXPECT_THROW(fe_encrypt(keys.mpk, circuit, bits(0, 3), rng), DimensionError);
}

TEST(FeDecrypt, TrojanPatterns) {
  auto prf = table_prf(2, 2, 2, 13);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  for (auto backend : {FeBackend::kReference, FeBackend::kGarbled}) {
    Rng rng(13);
    auto sk_ske = ske::ske_setup(prf, rng);
    BitString v = bits(3, 2);
    auto trojan = ske::ske_encrypt(sk_ske, v, rng);
    auto keys = fe_setup(backend, lay.desc_bits(), rng);
    auto fk = fe_keygen(std::move(keys.msk), lay.description(trojan));
    EXPECT_EQ(fe_decrypt(fk, fe_encrypt(keys.mpk, circuit, lay.message_input(bits(1, 2)), rng)), bits(1, 2));
    EXPECT_EQ(fe_decrypt(fk, fe_encrypt(keys.mpk, circuit, lay.key_input(sk_ske), rng)), v);
  }
}

TEST(FeDecrypt, RandomInputsMatchPlainEvaluation) {
  auto prf = table_prf(2, 2, 3, 14);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  for (auto backend : {FeBackend::kReference, FeBackend::kGarbled}) {
    Rng rng(14);
    for (int i = 0; i < 1000; ++i) {
      BitString d = BitString::random(lay.desc_bits(), rng), x = BitString::random(lay.data_bits(), rng);
      auto keys = fe_setup(backend, lay.desc_bits(), rng);
      auto fk = fe_keygen(std::move(keys.msk), d);
      ASSERT_EQ(fe_decrypt(fk, fe_encrypt(keys.mpk, circuit, x, rng)), circuit->evaluate(d, x));
    }
  }
}

TEST(FeDecrypt, TrojanEquivalenceExhaustive) {
  // For every 2-bit value v, SKE key K and randomness r: with d = SKE.Enc(K, v; r),
  // decrypting (1, bottom, v) and (0, K, bottom) both give v.
  auto prf = table_prf(2, 2, 2, 15);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  Rng rng(15);
  auto ref = fe_setup(FeBackend::kReference, lay.desc_bits(), rng);
  auto garbled = fe_setup(FeBackend::kGarbled, lay.desc_bits(), rng);
  for (std::uint64_t vv = 0; vv < 4; ++vv) {
    for (std::uint64_t kv = 0; kv < 16; ++kv) {
      ske::SkeKey key{bits(kv >> 2, 2), bits(kv & 3, 2), prf};
      for (std::uint64_t rv = 0; rv < 4; ++rv) {
        BitString v = bits(vv, 2);
        BitString d = lay.description(ske::ske_encrypt_with(key, v, bits(rv, 2)));
        auto fk = fe_keygen(ref.msk.duplicate(), d);
        ASSERT_EQ(fe_decrypt(fk, fe_encrypt(ref.mpk, circuit, lay.message_input(v), rng)), v);
        ASSERT_EQ(fe_decrypt(fk, fe_encrypt(ref.mpk, circuit, lay.key_input(key), rng)), v);
        if (kv % 5 == 0) {
          auto gk = fe_keygen(garbled.msk.duplicate(), d);
          ASSERT_EQ(fe_decrypt(gk, fe_encrypt(garbled.mpk, circuit, lay.message_input(v), rng)), v);
          ASSERT_EQ(fe_decrypt(gk, fe_encrypt(garbled.mpk, circuit, lay.key_input(key), rng)), v);
        }
      }
    }
  }
}

TEST(FeContainer, RoundTripAndCorruption) {
  auto prf = table_prf(2, 2, 2, 16);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  for (auto backend : {FeBackend::kReference, FeBackend::kGarbled}) {
    Rng rng(16);
    auto keys = fe_setup(backend, lay.desc_bits(), rng);
    auto mpk = mpk_from_json(to_json(keys.mpk));
    BitString d = BitString::random(lay.desc_bits(), rng);
    auto fk = function_key_from_json(to_json(fe_keygen(std::move(keys.msk), d)));
    auto ct = fe_encrypt(mpk, circuit, lay.message_input(bits(2, 2)), rng);
    auto bytes = serialize(ct);
    auto back = deserialize(bytes);
    EXPECT_EQ(serialize(back), bytes);
    EXPECT_EQ(fe_decrypt(fk, back), bits(2, 2));
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(deserialize(truncated), DecodeError);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(deserialize(bad_magic), DecodeError);
  }
}

TEST(FeDecrypt, CorruptedTableDetected) {
  auto prf = table_prf(2, 2, 2, 17);
  auto circuit = std::make_shared<const BooleanCircuit>(build_F_circuit(*prf));
  FLayout lay(*prf);
  Rng rng(17);
  auto keys = fe_setup(FeBackend::kGarbled, lay.desc_bits(), rng);
  auto fk = fe_keygen(std::move(keys.msk), BitString::random(lay.desc_bits(), rng));
  auto ct = fe_encrypt(keys.mpk, circuit, lay.message_input(bits(1, 2)), rng);
  for (auto& row : ct.gc.tables.back()) row[kLabelBytes] ^= 1;
  EXPECT_THROW(fe_decrypt(fk, ct), DecryptionFailure);
  FeFunctionKey other = fk;
  other.backend = FeBackend::kReference;
  EXPECT_THROW(fe_decrypt(other, ct), DecodeError);
}

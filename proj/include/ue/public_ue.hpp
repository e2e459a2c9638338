#pragma once

// Public-key uncloneable encryption from single-key FE. The secret key is the
// FE key for F[ct] with a random embedded string ct; encryption FE-encrypts
// (1, bottom, k_UE) next to a one-time conjugate encryption of m. Includes the
// three hybrid experiments and the reduction to a one-time adversary.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "ue/bits.hpp"
#include "ue/circuit.hpp"
#include "ue/cloning.hpp"
#include "ue/conjugate.hpp"
#include "ue/exact_sum.hpp"
#include "ue/fakekey.hpp"
#include "ue/fe.hpp"
#include "ue/private_ue.hpp"

namespace ue::pub {

using fe::FeBackend;
using fe::FeCiphertext;
using fe::FeFunctionKey;
using fe::FeMasterPublicKey;
using harness::ExperimentReport;
using harness::Mode;
using otue::FamilyPtr;
using otue::OtueKey;
using otue::QuantumCiphertext;
using pue::OtueKeyEncoding;
using quantum::Povm;
using ske::SkeKey;

struct PublicParams {
  FamilyPtr family;
  ske::PrfPtr prf;  // truth table, output width = encoding width
  FeBackend backend = FeBackend::kGarbled;
  std::shared_ptr<const fe::BooleanCircuit> circuit;

  std::size_t n() const { return family->n(); }
  OtueKeyEncoding encoding() const { return OtueKeyEncoding(family, prf->output_bits()); }
  fe::FLayout layout() const { return fe::FLayout(*prf); }
  std::size_t trojan_bits() const { return layout().desc_bits(); }
};

inline PublicParams public_params(const FamilyPtr& family, const ske::PrfPtr& prf, FeBackend backend) {
  if (prf->output_bits() != OtueKeyEncoding(family).width()) {
    throw DimensionError("PRF output width must equal the key encoding width");
  }
  auto circuit = std::make_shared<const fe::BooleanCircuit>(fe::build_F_circuit(*prf));
  return PublicParams{family, prf, backend, std::move(circuit)};
}

inline PublicParams public_params_table(const FamilyPtr& family, std::size_t lambda, std::size_t ell,
                                        FeBackend backend, Rng& rng) {
  std::size_t width = OtueKeyEncoding(family).width();
  return public_params(family, std::make_shared<const ske::Prf>(ske::Prf::random_table(lambda, ell, width, rng)),
                       backend);
}

struct PubUeKeys {
  FeMasterPublicKey pk;
  FeFunctionKey sk;
  BitString trojan_ct;
};

struct PubHybridCiphertext {
  FeCiphertext ct1;
  QuantumCiphertext ct2;
};

inline void check_keys(const PublicParams& params, const PubUeKeys& keys) {
  if (keys.trojan_ct.size() != params.trojan_bits()) throw InvariantViolation("embedded string has the wrong width");
  if (keys.sk.d != keys.trojan_ct) throw InvariantViolation("secret key does not match the embedded string");
  if (keys.pk.backend != params.backend || keys.sk.backend != params.backend) {
    throw InvariantViolation("key backend differs from parameters");
  }
}

// The master secret key is consumed by the single key generation.
inline PubUeKeys pub_setup(const PublicParams& params, Rng& rng) {
  fe::FeKeys fk = fe::fe_setup(params.backend, params.trojan_bits(), rng);
  BitString trojan = BitString::random(params.trojan_bits(), rng);
  FeFunctionKey sk = fe::fe_keygen(std::move(fk.msk), trojan);
  return PubUeKeys{std::move(fk.mpk), std::move(sk), std::move(trojan)};
}

inline PubHybridCiphertext pub_encrypt(const PublicParams& params, const FeMasterPublicKey& pk, const BitString& m,
                                       Rng& rng) {
  if (m.size() != params.n()) throw DimensionError("message length differs from scheme parameter n");
  OtueKey k_ue = otue::otue_setup(params.n(), params.family, rng);
  BitString x = params.layout().message_input(params.encoding().encode(k_ue));
  return PubHybridCiphertext{fe::fe_encrypt(pk, params.circuit, x, rng), otue::otue_encrypt(k_ue, m)};
}

inline OtueKey pub_recover_key(const PublicParams& params, const FeFunctionKey& sk, const FeCiphertext& ct1) {
  return params.encoding().decode(fe::fe_decrypt(sk, ct1));
}

inline BitString pub_decrypt(const PublicParams& params, const FeFunctionKey& sk, const PubHybridCiphertext& hct,
                             Rng& rng) {
  return otue::otue_decrypt_sample(pub_recover_key(params, sk, hct.ct1), hct.ct2, rng);
}

using PublicAdversary = pue::SchemeAdversary<FeCiphertext, FeFunctionKey>;

// B and C FE-decrypt ct1 with the revealed key to obtain the one-time key. A
// failed or undecodable decryption makes the party answer 0.
inline PublicAdversary lift_public_adversary(const PublicParams& params, const harness::CloningAdversary& inner) {
  harness::check_adversary(inner);
  PublicAdversary adv;
  adv.name = inner.name;
  adv.dim_b = inner.dim_b;
  adv.dim_c = inner.dim_c;
  adv.shared_count = inner.shared_count;
  adv.split = [inner](const FeCiphertext&, std::uint64_t s) { return inner.split(s); };
  std::size_t messages = params.family->dim();
  auto lift = [params, messages](std::function<Povm(const OtueKey&, std::uint64_t)> f, std::size_t dim) {
    return [params, messages, f, dim](const FeCiphertext& ct1, const FeFunctionKey& sk, std::uint64_t s) {
      try {
        return f(pub_recover_key(params, sk, ct1), s);
      } catch (const DecodeError&) {
        return Povm::constant(dim, messages, 0);
      } catch (const DecryptionFailure&) {
        return Povm::constant(dim, messages, 0);
      }
    };
  };
  adv.bob = lift(inner.bob, inner.dim_b);
  adv.charlie = lift(inner.charlie, inner.dim_c);
  return adv;
}

namespace detail {

// FE keys and the key for the embedded string, derived from one seed so that
// every party holding the seed rebuilds them bit for bit.
struct FeWorld {
  FeMasterPublicKey mpk;
  fe::FeMasterSecretKey msk;
};

inline FeWorld fe_world(const PublicParams& params, Rng& rng) {
  fe::FeKeys k = fe::fe_setup(params.backend, params.trojan_bits(), rng);
  return FeWorld{std::move(k.mpk), std::move(k.msk)};
}

// One hybrid cell: returns (ct1, revealed key). `trojan` is used by variant 1
// only; variants 2 and 3 derive it from (k_SKE, r).
inline std::pair<FeCiphertext, FeFunctionKey> hybrid_view(int variant, const PublicParams& params, const FeWorld& w,
                                                          const BitString& trojan, const SkeKey& k_ske,
                                                          const BitString& r, const OtueKey& k_ue, Rng& rng) {
  fe::FLayout lay = params.layout();
  BitString encoded = params.encoding().encode(k_ue);
  BitString d = variant == 1 ? trojan : lay.description(ske::ske_encrypt_with(k_ske, encoded, r));
  BitString x = variant == 3 ? lay.key_input(k_ske) : lay.message_input(encoded);
  FeCiphertext ct1 = fe::fe_encrypt(w.mpk, params.circuit, x, rng);
  return {std::move(ct1), fe::fe_keygen(w.msk.duplicate(), d)};
}

}  // namespace detail

// Variant 1: the real experiment, embedded string uniform.
// Variant 2: embedded string = SKE.Enc(k_SKE, encode(k_UE); r).
// Variant 3: as 2, and ct1 encrypts (0, k_SKE, bottom).
// The revealed key is the FE key for the variant's embedded string.
inline ExperimentReport pub_hybrid_experiment(int variant, const PublicParams& params, const PublicAdversary& adv,
                                              Mode mode, std::uint64_t trials = 0, std::uint64_t seed = 0) {
  if (variant < 1 || variant > 3) throw std::invalid_argument("hybrid variant must be 1, 2 or 3");
  pue::check_composed(adv);
  const auto& prf = *params.prf;
  std::size_t lam = prf.key_bits(), ell = prf.input_bits(), width = prf.output_bits();
  ExperimentReport report;
  report.n = params.n();
  report.mode = mode;
  report.scheme = "public-h" + std::to_string(variant);
  report.adversary = adv.name;

  if (mode == Mode::kMonteCarlo) {
    if (trials == 0) throw std::invalid_argument("Monte Carlo needs at least one trial");
    std::uint64_t wins = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng = harness::trial_rng(seed, t);
      detail::FeWorld w = detail::fe_world(params, rng);
      SkeKey k_ske = ske::ske_setup(params.prf, rng);
      BitString r = BitString::random(ell, rng);
      BitString trojan = BitString::random(params.trojan_bits(), rng);
      OtueKey k_ue = otue::otue_setup(params.n(), params.family, rng);
      BitString m = BitString::random(params.n(), rng);
      std::uint64_t s = adv.shared_count == 1 ? 0 : rng.below(adv.shared_count);
      auto [ct1, revealed] = detail::hybrid_view(variant, params, w, trojan, k_ske, r, k_ue, rng);
      if (pue::composed_sample(adv, ct1, revealed, otue::otue_encrypt(k_ue, m), static_cast<std::size_t>(m.to_uint()),
                               s, rng)) {
        ++wins;
      }
    }
    report.success_probability = static_cast<double>(wins) / static_cast<double>(trials);
    report.trials = trials;
    report.seed = seed;
    report.half_width = harness::wilson_half_width(wins, trials);
    return report;
  }

  if (params.backend != FeBackend::kReference) {
    throw BudgetExceeded("exact public hybrids need the reference FE backend; use Monte Carlo mode");
  }
  // Variant 1 enumerates the embedded string (2^(ell + width) values) with
  // weight 2^lambda; variants 2 and 3 enumerate (k, otp, r). All share the
  // denominator 2^(lambda + width + ell) |K_UE| 2^n S.
  std::uint64_t ue_keys = otue::key_space_size(*params.family);
  std::uint64_t messages = params.family->dim();
  long double ske_cells = std::ldexp(1.0L, static_cast<int>(lam + width + ell));
  long double cells = (variant == 1 ? std::ldexp(1.0L, static_cast<int>(ell + width)) : ske_cells) * ue_keys *
                      messages * adv.shared_count;
  pue::detail::check_budget(cells, "exact public hybrid experiment");
  Rng unused(0);
  detail::FeWorld w = detail::fe_world(params, unused);
  SkeKey zero_key{BitString::zeros(lam), BitString::zeros(width), params.prf};
  BitString zero_r = BitString::zeros(ell);
  ExactSum sum;
  auto accumulate = [&](const BitString& trojan, const SkeKey& k_ske, const BitString& r, double weight) {
    for (std::uint64_t ki = 0; ki < ue_keys; ++ki) {
      OtueKey k_ue = otue::key_from_index(params.family, ki);
      auto [ct1, revealed] = detail::hybrid_view(variant, params, w, trojan, k_ske, r, k_ue, unused);
      for (std::uint64_t mv = 0; mv < messages; ++mv) {
        auto ct2 = otue::otue_encrypt(k_ue, BitString::from_uint(mv, params.n()));
        for (std::uint64_t s = 0; s < adv.shared_count; ++s) {
          sum += weight * pue::composed_cell(adv, ct1, revealed, ct2, static_cast<std::size_t>(mv), s);
        }
      }
    }
  };
  if (variant == 1) {
    double weight = std::ldexp(1.0, static_cast<int>(lam));
    for (std::uint64_t tv = 0; tv < (std::uint64_t{1} << (ell + width)); ++tv) {
      accumulate(BitString::from_uint(tv, ell + width), zero_key, zero_r, weight);
    }
  } else {
    for (std::uint64_t kv = 0; kv < (std::uint64_t{1} << lam); ++kv) {
      for (std::uint64_t ov = 0; ov < (std::uint64_t{1} << width); ++ov) {
        SkeKey k_ske{BitString::from_uint(kv, lam), BitString::from_uint(ov, width), params.prf};
        for (std::uint64_t rv = 0; rv < (std::uint64_t{1} << ell); ++rv) {
          accumulate(BitString::zeros(0), k_ske, BitString::from_uint(rv, ell), 1.0);
        }
      }
    }
  }
  long double denom = ske_cells * ue_keys * messages * adv.shared_count;
  report.success_probability = sum.value() / static_cast<double>(denom);
  report.trials = static_cast<std::uint64_t>(cells);
  return report;
}

// Number of FE setup seeds the reduction's shared randomness ranges over.
inline std::uint64_t reduction_fe_seeds(const PublicParams& params) {
  return params.backend == FeBackend::kReference ? 1 : std::uint64_t{1} << 32;
}

// One-time adversary that simulates the Hybrid 3 view. The shared classical
// value encodes (FE seed, k, otp, r, s). Phase 1 rebuilds (mpk, msk) from the
// seed, forms ct1 = FE.Enc(mpk, (0, k_SKE, bottom)) and runs adv's channel.
// Phase 2 recomputes ct = SKE.Enc(k_SKE, encode(k_UE); r) and
// sk = KeyGen(msk, ct), then runs adv's measurements.
inline harness::CloningAdversary pub_reduction_to_otue(const PublicParams& params, const PublicAdversary& adv) {
  pue::check_composed(adv);
  const auto& prf = *params.prf;
  std::size_t lam = prf.key_bits(), ell = prf.input_bits(), width = prf.output_bits();
  std::size_t bits = lam + width + ell;
  std::uint64_t fe_seeds = reduction_fe_seeds(params);
  long double total = std::ldexp(1.0L, static_cast<int>(bits)) * fe_seeds * adv.shared_count;
  if (total >= std::ldexp(1.0L, 63)) throw BudgetExceeded("reduction shared randomness too large to index");

  struct View {
    std::shared_ptr<detail::FeWorld> world;
    FeCiphertext ct1;
    SkeKey k_ske;
    BitString r;
    std::uint64_t s;
  };
  auto unpack = [params, lam, ell, width, bits, fe_seeds](std::uint64_t shared) {
    std::uint64_t low = shared & ((std::uint64_t{1} << bits) - 1);
    std::uint64_t rest = shared >> bits;
    std::uint64_t fe_seed = rest % fe_seeds;
    std::uint64_t s = rest / fe_seeds;
    BitString all = BitString::from_uint(low, bits);
    SkeKey k_ske{all.slice(0, lam), all.slice(lam, width), params.prf};
    Rng rng(fe_seed);
    auto world = std::make_shared<detail::FeWorld>(detail::fe_world(params, rng));
    FeCiphertext ct1 = fe::fe_encrypt(world->mpk, params.circuit, params.layout().key_input(k_ske), rng);
    return View{std::move(world), std::move(ct1), std::move(k_ske), all.slice(lam + width, ell), s};
  };

  harness::CloningAdversary out;
  out.name = adv.name + "+reduction";
  out.dim_b = adv.dim_b;
  out.dim_c = adv.dim_c;
  out.shared_count = static_cast<std::uint64_t>(total);
  out.split = [unpack, adv](std::uint64_t shared) {
    View v = unpack(shared);
    return adv.split(v.ct1, v.s);
  };
  auto phase2 = [params, unpack](std::function<Povm(const FeCiphertext&, const FeFunctionKey&, std::uint64_t)> f) {
    return [params, unpack, f](const OtueKey& k_ue, std::uint64_t shared) {
      View v = unpack(shared);
      auto ct = ske::ske_encrypt_with(v.k_ske, params.encoding().encode(k_ue), v.r);
      FeFunctionKey sk = fe::fe_keygen(v.world->msk.duplicate(), params.layout().description(ct));
      return f(v.ct1, sk, v.s);
    };
  };
  out.bob = phase2(adv.bob);
  out.charlie = phase2(adv.charlie);
  return out;
}

// The key a reduction party derives in phase 2 for shared value `shared`.
inline FeFunctionKey reduction_phase2_key(const PublicParams& params, const OtueKey& k_ue, std::uint64_t shared) {
  const auto& prf = *params.prf;
  std::size_t lam = prf.key_bits(), ell = prf.input_bits(), width = prf.output_bits();
  std::size_t bits = lam + width + ell;
  std::uint64_t fe_seeds = reduction_fe_seeds(params);
  BitString all = BitString::from_uint(shared & ((std::uint64_t{1} << bits) - 1), bits);
  SkeKey k_ske{all.slice(0, lam), all.slice(lam, width), params.prf};
  Rng rng((shared >> bits) % fe_seeds);
  detail::FeWorld w = detail::fe_world(params, rng);
  auto ct = ske::ske_encrypt_with(k_ske, params.encoding().encode(k_ue), all.slice(lam + width, ell));
  return fe::fe_keygen(std::move(w.msk), params.layout().description(ct));
}

inline pue::IndScheme<PubUeKeys, PubHybridCiphertext> pub_ind_scheme(const PublicParams& params) {
  return {[params](Rng& rng) { return pub_setup(params, rng); },
          [params](const PubUeKeys& keys, const BitString& m, Rng& rng) {
            return pub_encrypt(params, keys.pk, m, rng);
          }};
}

// ---------------------------------------------------------------------------
// JSON for keys.

inline nlohmann::json keys_to_json(const PubUeKeys& keys) {
  return {{"pk", fe::to_json(keys.pk)}, {"sk", fe::to_json(keys.sk)}, {"trojan_ct", keys.trojan_ct.to_hex()}};
}

inline PubUeKeys keys_from_json(const nlohmann::json& j, const PublicParams& params) {
  try {
    PubUeKeys keys{fe::mpk_from_json(j.at("pk")), fe::function_key_from_json(j.at("sk")),
                   BitString::from_hex(j.at("trojan_ct").get<std::string>(), params.trojan_bits())};
    check_keys(params, keys);
    return keys;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed public UE keys: ") + e.what());
  } catch (const InvariantViolation& e) {
    throw DecodeError(std::string("inconsistent public UE keys: ") + e.what());
  }
}

}  // namespace ue::pub

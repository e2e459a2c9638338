#include "ue/cloner.hpp"
#include "ue/public_ue.hpp"

#include <set>

#include <gtest/gtest.h>

using namespace ue;
using namespace ue::pub;

namespace {

FamilyPtr wiesner(std::size_t n) { return std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(n)); }

PublicParams params_for(std::size_t n, FeBackend backend, std::uint64_t seed, std::size_t lambda = 2,
                        std::size_t ell = 2) {
  Rng rng(seed);
  return public_params_table(wiesner(n), lambda, ell, backend, rng);
}

constexpr double kSingleQubitCloneSuccess = 0.7285533905932737;

// B decrypts honestly; C answers with bits of the revealed key's description
// masked by s.
PublicAdversary probe_adversary(const PublicParams& params) {
  std::size_t d = params.family->dim();
  std::size_t n = params.n();
  PublicAdversary adv;
  adv.name = "probe";
  adv.dim_b = d;
  adv.dim_c = 1;
  adv.shared_count = 2;
  adv.split = [d](const FeCiphertext&, std::uint64_t) { return quantum::KrausChannel::identity(d); };
  adv.bob = [params](const FeCiphertext& ct1, const FeFunctionKey& sk, std::uint64_t) {
    return otue::decrypt_povm(pub_recover_key(params, sk, ct1));
  };
  adv.charlie = [d, n](const FeCiphertext&, const FeFunctionKey& sk, std::uint64_t s) {
    return quantum::Povm::constant(1, d, static_cast<std::size_t>(sk.d.slice(sk.d.size() - n, n).to_uint() ^ s) % d);
  };
  return adv;
}

double exact(int variant, const PublicParams& params, const PublicAdversary& adv) {
  return pub_hybrid_experiment(variant, params, adv, harness::Mode::kExact).success_probability;
}

}  // namespace

TEST(PublicSetup, DeterministicUnderSeed) {
  auto params = params_for(1, FeBackend::kGarbled, 1);
  Rng a(5), b(5), c(6);
  auto ka = pub_setup(params, a), kb = pub_setup(params, b), kc = pub_setup(params, c);
  EXPECT_EQ(ka.trojan_ct, kb.trojan_ct);
  EXPECT_EQ(ka.sk, kb.sk);
  EXPECT_EQ(ka.trojan_ct.size(), params.trojan_bits());
  EXPECT_EQ(ka.sk.d, ka.trojan_ct);
  check_keys(params, ka);
  Rng d(7);
  bool differ = false;
  for (int i = 0; i < 8 && !differ; ++i) differ = pub_setup(params, d).trojan_ct != kc.trojan_ct;
  EXPECT_TRUE(differ);
}

TEST(PublicSetup, ParamsRejectMismatchedPrf) {
  Rng rng(1);
  auto prf = std::make_shared<const ske::Prf>(ske::Prf::random_table(1, 1, 3, rng));
  EXPECT_THROW(public_params(wiesner(1), prf, FeBackend::kReference), DimensionError);
}

TEST(PublicEncrypt, RoundTripExhaustiveBothBackends) {
  for (auto backend : {FeBackend::kReference, FeBackend::kGarbled}) {
    auto params = params_for(1, backend, 2);
    Rng rng(8);
    for (int rep = 0; rep < 10; ++rep) {
      auto keys = pub_setup(params, rng);
      for (std::uint64_t mv = 0; mv < 2; ++mv) {
        BitString m = BitString::from_uint(mv, 1);
        ASSERT_EQ(pub_decrypt(params, keys.sk, pub_encrypt(params, keys.pk, m, rng), rng), m);
      }
    }
  }
}

TEST(PublicEncrypt, RoundTripRandomTrials) {
  auto params = params_for(2, FeBackend::kGarbled, 3, 1, 1);
  Rng rng(9);
  auto keys = pub_setup(params, rng);
  for (int t = 0; t < 200; ++t) {
    BitString m = BitString::random(2, rng);
    ASSERT_EQ(pub_decrypt(params, keys.sk, pub_encrypt(params, keys.pk, m, rng), rng), m);
  }
  EXPECT_THROW(pub_encrypt(params, keys.pk, BitString::zeros(1), rng), DimensionError);
}

TEST(PublicEncrypt, FreshOneTimeKeyPerMessage) {
  auto params = params_for(2, FeBackend::kReference, 4);
  Rng rng(10);
  auto keys = pub_setup(params, rng);
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 64; ++t) {
    auto hct = pub_encrypt(params, keys.pk, BitString::zeros(2), rng);
    seen.insert(otue::key_index(pub_recover_key(params, keys.sk, hct.ct1)));
  }
  EXPECT_GT(seen.size(), 8u);
}

TEST(PublicEncrypt, MessageBranchIgnoresEmbeddedString) {
  auto params = params_for(1, FeBackend::kReference, 5);
  auto lay = params.layout();
  Rng rng(11);
  for (std::uint64_t i = 0; i < otue::key_space_size(*params.family); ++i) {
    BitString x = lay.message_input(params.encoding().encode(otue::key_from_index(params.family, i)));
    for (std::uint64_t dv = 0; dv < (std::uint64_t{1} << lay.desc_bits()); ++dv) {
      EXPECT_TRUE(fe::description_sensitivity(*params.circuit, BitString::from_uint(dv, lay.desc_bits()), x).empty());
    }
  }
  SkeKey k = ske::ske_setup(params.prf, rng);
  BitString d = BitString::random(lay.desc_bits(), rng);
  EXPECT_FALSE(fe::description_sensitivity(*params.circuit, d, lay.key_input(k)).empty());
}

TEST(PublicDecrypt, KeyForOtherEmbeddedStringStillDecrypts) {
  for (auto backend : {FeBackend::kReference, FeBackend::kGarbled}) {
    auto params = params_for(1, backend, 6);
    Rng rng(12);
    auto fk = fe::fe_setup(backend, params.trojan_bits(), rng);
    auto msk2 = fk.msk.duplicate();
    auto sk_a = fe::fe_keygen(std::move(fk.msk), BitString::zeros(params.trojan_bits()));
    auto sk_b = fe::fe_keygen(std::move(msk2), BitString::random(params.trojan_bits(), rng) ^
                                                   BitString::from_uint(1, params.trojan_bits()));
    for (int t = 0; t < 10; ++t) {
      BitString m = BitString::random(1, rng);
      auto hct = pub_encrypt(params, fk.mpk, m, rng);
      EXPECT_EQ(pub_recover_key(params, sk_a, hct.ct1), pub_recover_key(params, sk_b, hct.ct1));
      EXPECT_EQ(pub_decrypt(params, sk_b, hct, rng), m);
    }
  }
}

TEST(PublicDecrypt, CorruptedCiphertextFailsExplicitly) {
  auto params = params_for(1, FeBackend::kGarbled, 7);
  Rng rng(13);
  auto keys = pub_setup(params, rng);
  auto hct = pub_encrypt(params, keys.pk, BitString::zeros(1), rng);
  auto bad = hct;
  bad.ct1.data_labels[0][0] ^= 1;
  EXPECT_THROW(pub_decrypt(params, keys.sk, bad, rng), DecryptionFailure);
  bad = hct;
  bad.ct1.desc_labels.pop_back();
  EXPECT_THROW(pub_decrypt(params, keys.sk, bad, rng), DecodeError);
  auto wrong_backend = pub_setup(params_for(1, FeBackend::kReference, 7), rng);
  EXPECT_THROW(pub_decrypt(params, wrong_backend.sk, hct, rng), DecodeError);
}

TEST(PublicHybrid, TrivialAdversaryWinsTwoToMinusN) {
  for (std::size_t n = 1; n <= 2; ++n) {
    auto params = params_for(n, FeBackend::kReference, 20, 1, 1);
    auto adv = lift_public_adversary(params, harness::trivial_adversary(params.family));
    for (int v = 1; v <= 3; ++v) EXPECT_NEAR(exact(v, params, adv), std::ldexp(1.0, -static_cast<int>(n)), 1e-12);
  }
  auto params = params_for(1, FeBackend::kGarbled, 21);
  auto adv = lift_public_adversary(params, harness::trivial_adversary(params.family));
  for (int v = 1; v <= 3; ++v) {
    auto r = pub_hybrid_experiment(v, params, adv, harness::Mode::kMonteCarlo, 800, 30 + v);
    EXPECT_LE(std::abs(r.success_probability - 0.5), 2 * *r.half_width) << v;
  }
}

TEST(PublicHybrid, HybridsAgreeExactly) {
  auto params = params_for(1, FeBackend::kReference, 22);
  for (const auto& adv : {lift_public_adversary(params, attacks::build_cloner_adversary(1)),
                          lift_public_adversary(params, harness::trivial_adversary(params.family)),
                          probe_adversary(params)}) {
    double h1 = exact(1, params, adv), h2 = exact(2, params, adv), h3 = exact(3, params, adv);
    EXPECT_EQ(h1, h2) << adv.name;
    EXPECT_EQ(h2, h3) << adv.name;
  }
}

TEST(PublicHybrid, ClonerMatchesOneTimeValue) {
  auto params = params_for(1, FeBackend::kReference, 23);
  auto adv = lift_public_adversary(params, attacks::build_cloner_adversary(1));
  EXPECT_NEAR(exact(3, params, adv), kSingleQubitCloneSuccess, 1e-9);
}

TEST(PublicHybrid, ExactNeedsReferenceBackend) {
  auto params = params_for(1, FeBackend::kGarbled, 24);
  auto adv = lift_public_adversary(params, harness::trivial_adversary(params.family));
  EXPECT_THROW(pub_hybrid_experiment(1, params, adv, harness::Mode::kExact), BudgetExceeded);
  EXPECT_THROW(pub_hybrid_experiment(4, params, adv, harness::Mode::kExact), std::invalid_argument);
  EXPECT_THROW(pub_hybrid_experiment(1, params, adv, harness::Mode::kMonteCarlo, 0), std::invalid_argument);
}

TEST(PublicReduction, TrivialAdversary) {
  auto params = params_for(1, FeBackend::kReference, 25);
  auto red = pub_reduction_to_otue(params, lift_public_adversary(params, harness::trivial_adversary(params.family)));
  EXPECT_NEAR(harness::cloning_success_exact(params.family, red).success_probability, 0.5, 1e-12);
}

TEST(PublicReduction, MatchesHybridThreeExactly) {
  for (std::size_t n = 1; n <= 2; ++n) {
    auto params = params_for(n, FeBackend::kReference, 26, 1, 1);
    for (const auto& adv : {lift_public_adversary(params, attacks::build_cloner_adversary(n)),
                            probe_adversary(params)}) {
      double h3 = exact(3, params, adv);
      double red =
          harness::cloning_success_exact(params.family, pub_reduction_to_otue(params, adv)).success_probability;
      EXPECT_EQ(red, h3) << adv.name << " n=" << n;
      double h1 = exact(1, params, adv);
      EXPECT_LE(harness::implied_t(h1, n), harness::implied_t(red, n) + 1e-6);
    }
  }
}

TEST(PublicReduction, GarbledBackendWithinMonteCarloError) {
  auto params = params_for(1, FeBackend::kGarbled, 27, 1, 1);
  auto adv = lift_public_adversary(params, attacks::build_cloner_adversary(1));
  auto red = pub_reduction_to_otue(params, adv);
  EXPECT_EQ(red.shared_count, (std::uint64_t{1} << 32) * 16);
  auto h3 = pub_hybrid_experiment(3, params, adv, harness::Mode::kMonteCarlo, 1500, 1);
  auto r = harness::cloning_success_mc(params.family, red, 1500, 2);
  EXPECT_LE(std::abs(h3.success_probability - r.success_probability), 2 * (*h3.half_width + *r.half_width));
}

TEST(PublicReduction, PartiesDeriveIdenticalKeys) {
  auto params = params_for(1, FeBackend::kGarbled, 28, 1, 1);
  auto inner = harness::trivial_adversary(params.family);
  auto adv = lift_public_adversary(params, inner);
  std::vector<FeFunctionKey> seen_b, seen_c;
  adv.bob = [&seen_b, f = adv.bob](const FeCiphertext& ct1, const FeFunctionKey& sk, std::uint64_t s) {
    seen_b.push_back(sk);
    return f(ct1, sk, s);
  };
  adv.charlie = [&seen_c, f = adv.charlie](const FeCiphertext& ct1, const FeFunctionKey& sk, std::uint64_t s) {
    seen_c.push_back(sk);
    return f(ct1, sk, s);
  };
  auto red = pub_reduction_to_otue(params, adv);
  Rng rng(14);
  for (int t = 0; t < 1000; ++t) {
    OtueKey k_ue = otue::otue_setup(1, params.family, rng);
    std::uint64_t shared = rng.below(red.shared_count);
    red.bob(k_ue, shared);
    red.charlie(k_ue, shared);
    ASSERT_EQ(seen_b.back(), seen_c.back());
    ASSERT_EQ(seen_b.back(), reduction_phase2_key(params, k_ue, shared));
  }
}

TEST(PublicKeys, JsonRoundTrip) {
  auto params = params_for(1, FeBackend::kGarbled, 29);
  Rng rng(15);
  auto keys = pub_setup(params, rng);
  auto back = keys_from_json(nlohmann::json::parse(keys_to_json(keys).dump()), params);
  EXPECT_EQ(back.sk, keys.sk);
  EXPECT_EQ(back.trojan_ct, keys.trojan_ct);
  auto hct = pub_encrypt(params, back.pk, BitString::from_uint(1, 1), rng);
  EXPECT_EQ(pub_decrypt(params, keys.sk, hct, rng), BitString::from_uint(1, 1));
  auto j = keys_to_json(keys);
  j["trojan_ct"] = (keys.trojan_ct ^ BitString::from_uint(1, keys.trojan_ct.size())).to_hex();
  EXPECT_THROW(keys_from_json(j, params), DecodeError);
  j = keys_to_json(keys);
  j.erase("sk");
  EXPECT_THROW(keys_from_json(j, params), DecodeError);
}

TEST(PublicInd, NullAndKeyHolderDistinguishers) {
  auto params = params_for(1, FeBackend::kGarbled, 30, 1, 1);
  using Dist = pue::IndDistinguisher<PubUeKeys, PubHybridCiphertext>;
  std::vector<std::pair<BitString, BitString>> pairs(2, {BitString::zeros(1), BitString::from_uint(1, 1)});
  Dist null{"null", false, [](const PubUeKeys*, const std::vector<PubHybridCiphertext>&, Rng&) { return 0; }};
  auto r0 = pue::ind_experiment(pub_ind_scheme(params), null, pairs, 1000, 1);
  EXPECT_LE(std::abs(r0.advantage), 2 * r0.half_width);
  Dist holder{"key-holder", true, [params](const PubUeKeys* k, const std::vector<PubHybridCiphertext>& cts, Rng& rng) {
                return pub_decrypt(params, k->sk, cts.front(), rng).is_zero() ? 0 : 1;
              }};
  EXPECT_EQ(pue::ind_experiment(pub_ind_scheme(params), holder, pairs, 200, 2).advantage, 1.0);
}

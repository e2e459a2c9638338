#pragma once

// Reusable private-key uncloneable encryption: each message gets a fresh
// one-time conjugate key, which is encrypted under a fake-key SKE. Includes
// the two hybrid cloning experiments, the reduction to a one-time adversary,
// and an empirical multi-message indistinguishability experiment.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ue/bits.hpp"
#include "ue/cloning.hpp"
#include "ue/conjugate.hpp"
#include "ue/exact_sum.hpp"
#include "ue/fakekey.hpp"

namespace ue::pue {

using harness::ExperimentReport;
using harness::Mode;
using otue::FamilyPtr;
using otue::OtueKey;
using otue::QuantumCiphertext;
using quantum::KrausChannel;
using quantum::Povm;
using ske::ClassicalCiphertext;
using ske::PrfPtr;
using ske::SkeKey;

// theta as a big-endian integer over index_width(|Theta|) bits, then r,
// zero-padded on the right to `width`.
class OtueKeyEncoding {
 public:
  explicit OtueKeyEncoding(FamilyPtr family, std::size_t width = 0) : family_(std::move(family)) {
    theta_bits_ = index_width(family_->size());
    std::size_t minimal = theta_bits_ + family_->n();
    width_ = width == 0 ? minimal : width;
    if (width_ < minimal) throw DimensionError("encoding width smaller than theta and pad bits");
  }

  std::size_t theta_bits() const { return theta_bits_; }
  std::size_t width() const { return width_; }
  const FamilyPtr& family() const { return family_; }

  BitString encode(const OtueKey& key) const {
    otue::check_key(key);
    if (key.family != family_) throw InvariantViolation("key belongs to a different family");
    BitString out = BitString::from_uint(key.theta, theta_bits_).concat(key.r);
    return out.concat(BitString::zeros(width_ - out.size()));
  }

  OtueKey decode(const BitString& bits) const {
    if (bits.size() != width_) throw DecodeError("encoded key has the wrong width");
    std::size_t n = family_->n();
    if (!bits.slice(theta_bits_ + n, width_ - theta_bits_ - n).is_zero()) throw DecodeError("nonzero key padding");
    auto theta = static_cast<std::size_t>(bits.slice(0, theta_bits_).to_uint());
    if (theta >= family_->size()) throw DecodeError("encoded theta outside the basis family");
    return OtueKey{theta, bits.slice(theta_bits_, n), family_};
  }

 private:
  FamilyPtr family_;
  std::size_t theta_bits_ = 0;
  std::size_t width_ = 0;
};

struct PrivateParams {
  FamilyPtr family;
  PrfPtr prf;  // output width = encoding width

  std::size_t n() const { return family->n(); }
  OtueKeyEncoding encoding() const { return OtueKeyEncoding(family, prf->output_bits()); }
};

// Truth-table PRF sized to the key encoding, for exhaustive experiments.
inline PrivateParams private_params_table(const FamilyPtr& family, std::size_t lambda, std::size_t ell, Rng& rng) {
  std::size_t width = OtueKeyEncoding(family).width();
  return PrivateParams{family, std::make_shared<const ske::Prf>(ske::Prf::random_table(lambda, ell, width, rng))};
}

inline PrivateParams private_params_hash(const FamilyPtr& family, std::size_t lambda = 128, std::size_t ell = 128) {
  std::size_t width = OtueKeyEncoding(family).width();
  return PrivateParams{family, std::make_shared<const ske::Prf>(ske::Prf::keyed_hash(lambda, ell, width))};
}

struct HybridCiphertext {
  ClassicalCiphertext ct1;
  QuantumCiphertext ct2;
};

inline SkeKey pue_setup(const PrivateParams& params, Rng& rng) {
  params.encoding();
  return ske::ske_setup(params.prf, rng);
}

inline HybridCiphertext pue_encrypt(const PrivateParams& params, const SkeKey& key, const BitString& m, Rng& rng) {
  if (m.size() != params.n()) throw DimensionError("message length differs from scheme parameter n");
  OtueKey k_ue = otue::otue_setup(params.n(), params.family, rng);
  auto ct1 = ske::ske_encrypt(key, params.encoding().encode(k_ue), rng);
  return HybridCiphertext{std::move(ct1), otue::otue_encrypt(k_ue, m)};
}

inline OtueKey pue_recover_key(const PrivateParams& params, const SkeKey& key, const ClassicalCiphertext& ct1) {
  return params.encoding().decode(ske::ske_decrypt(key, ct1));
}

inline BitString pue_decrypt(const PrivateParams& params, const SkeKey& key, const HybridCiphertext& hct, Rng& rng) {
  return otue::otue_decrypt_sample(pue_recover_key(params, key, hct.ct1), hct.ct2, rng);
}

// Cloning adversary against a hybrid scheme whose ciphertext has a classical
// part ct1 and a quantum part. ct1 is copied to everyone; A's channel may
// depend on it, and in phase 2 B and C see ct1, the revealed key and the
// shared value s.
template <typename Classical, typename Key>
struct SchemeAdversary {
  std::string name;
  std::size_t dim_b = 1;
  std::size_t dim_c = 1;
  std::uint64_t shared_count = 1;
  std::function<KrausChannel(const Classical& ct1, std::uint64_t s)> split;
  std::function<Povm(const Classical& ct1, const Key& key, std::uint64_t s)> bob;
  std::function<Povm(const Classical& ct1, const Key& key, std::uint64_t s)> charlie;
};

using ComposedAdversary = SchemeAdversary<ClassicalCiphertext, SkeKey>;

template <typename Classical, typename Key>
double composed_cell(const SchemeAdversary<Classical, Key>& adv, const Classical& ct1, const Key& revealed,
                     const QuantumCiphertext& ct2, std::size_t m, std::uint64_t s) {
  return harness::evaluate_cell(adv.split(ct1, s), ct2, adv.bob(ct1, revealed, s), adv.charlie(ct1, revealed, s),
                                adv.dim_b, adv.dim_c, m);
}

template <typename Classical, typename Key>
bool composed_sample(const SchemeAdversary<Classical, Key>& adv, const Classical& ct1, const Key& revealed,
                     const QuantumCiphertext& ct2, std::size_t m, std::uint64_t s, Rng& rng) {
  return harness::sample_cell(adv.split(ct1, s), ct2, adv.bob(ct1, revealed, s), adv.charlie(ct1, revealed, s), m, rng);
}

template <typename Classical, typename Key>
void check_composed(const SchemeAdversary<Classical, Key>& adv) {
  if (!adv.split || !adv.bob || !adv.charlie) throw InvariantViolation("adversary is missing a component");
  if (adv.shared_count == 0) throw InvariantViolation("shared randomness space must be non-empty");
}

// Runs a one-time adversary inside the composed scheme: B and C decrypt ct1
// with the revealed key to obtain the one-time key. An undecodable key makes
// the party answer 0.
inline ComposedAdversary lift_adversary(const PrivateParams& params, const harness::CloningAdversary& inner) {
  harness::check_adversary(inner);
  ComposedAdversary adv;
  adv.name = inner.name;
  adv.dim_b = inner.dim_b;
  adv.dim_c = inner.dim_c;
  adv.shared_count = inner.shared_count;
  adv.split = [inner](const ClassicalCiphertext&, std::uint64_t s) { return inner.split(s); };
  std::size_t messages = params.family->dim();
  auto lift = [params, messages](std::function<Povm(const OtueKey&, std::uint64_t)> f, std::size_t dim) {
    return [params, messages, f, dim](const ClassicalCiphertext& ct1, const SkeKey& key, std::uint64_t s) {
      try {
        return f(pue_recover_key(params, key, ct1), s);
      } catch (const DecodeError&) {
        return Povm::constant(dim, messages, 0);
      }
    };
  };
  adv.bob = lift(inner.bob, inner.dim_b);
  adv.charlie = lift(inner.charlie, inner.dim_c);
  return adv;
}

namespace detail {

inline void check_budget(long double cells, const char* what) {
  if (cells > static_cast<long double>(harness::kExactBudget)) {
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(static_cast<double>(cells)) +
                         " cells (budget 2^20); use Monte Carlo mode");
  }
}

// One hybrid cell: returns (ct1, revealed key).
inline std::pair<ClassicalCiphertext, SkeKey> hybrid_view(int variant, const PrivateParams& params, const SkeKey& key,
                                                          const BitString& r, const OtueKey& k_ue,
                                                          const BitString& k_prime) {
  BitString encoded = params.encoding().encode(k_ue);
  if (variant == 1) return {ske::ske_encrypt_with(key, encoded, r), key};
  auto ct0 = ske::ske_encrypt_with(key, BitString::zeros(encoded.size()), r);
  auto fk = ske::fake_gen_with(params.prf, ct0, encoded, k_prime);
  return {std::move(ct0), std::move(fk)};
}

}  // namespace detail

// Variant 1: ct = (SKE.Enc(key, encode(k_UE)), UE.Enc(k_UE, m)), reveal key.
// Variant 2: ct = (SKE.Enc(key, 0), UE.Enc(k_UE, m)), reveal
// FakeGen(ct1, encode(k_UE)). Success means B and C both output m.
inline ExperimentReport pue_hybrid_experiment(int variant, const PrivateParams& params, const ComposedAdversary& adv,
                                              Mode mode, std::uint64_t trials = 0, std::uint64_t seed = 0) {
  if (variant != 1 && variant != 2) throw std::invalid_argument("hybrid variant must be 1 or 2");
  check_composed(adv);
  const auto& prf = *params.prf;
  std::size_t lam = prf.key_bits(), ell = prf.input_bits(), width = prf.output_bits();
  ExperimentReport report;
  report.n = params.n();
  report.mode = mode;
  report.scheme = "private-h" + std::to_string(variant);
  report.adversary = adv.name;

  if (mode == Mode::kMonteCarlo) {
    if (trials == 0) throw std::invalid_argument("Monte Carlo needs at least one trial");
    std::uint64_t wins = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng = harness::trial_rng(seed, t);
      SkeKey key = ske::ske_setup(params.prf, rng);
      BitString r = BitString::random(ell, rng);
      OtueKey k_ue = otue::otue_setup(params.n(), params.family, rng);
      BitString m = BitString::random(params.n(), rng);
      std::uint64_t s = adv.shared_count == 1 ? 0 : rng.below(adv.shared_count);
      BitString k_prime = BitString::random(lam, rng);
      auto [ct1, revealed] = detail::hybrid_view(variant, params, key, r, k_ue, k_prime);
      if (composed_sample(adv, ct1, revealed, otue::otue_encrypt(k_ue, m), static_cast<std::size_t>(m.to_uint()), s, rng)) {
        ++wins;
      }
    }
    report.success_probability = static_cast<double>(wins) / static_cast<double>(trials);
    report.trials = trials;
    report.seed = seed;
    report.half_width = harness::wilson_half_width(wins, trials);
    return report;
  }

  // Exhaustive: both variants are normalized to the common denominator
  // 2^(2 lambda + width + ell) |K_UE| 2^n S so equal term multisets give
  // bit-identical results.
  std::uint64_t ue_keys = otue::key_space_size(*params.family);
  std::uint64_t messages = params.family->dim();
  long double ske_cells = std::ldexp(1.0L, static_cast<int>(lam + width + ell));
  long double fake_cells = variant == 2 ? std::ldexp(1.0L, static_cast<int>(lam)) : 1.0L;
  long double cells = ske_cells * fake_cells * ue_keys * messages * adv.shared_count;
  detail::check_budget(cells, "exact hybrid experiment");
  double weight = variant == 1 ? std::ldexp(1.0, static_cast<int>(lam)) : 1.0;
  std::uint64_t kps = variant == 2 ? std::uint64_t{1} << lam : 1;
  ExactSum sum;
  for (std::uint64_t kv = 0; kv < (std::uint64_t{1} << lam); ++kv) {
    for (std::uint64_t ov = 0; ov < (std::uint64_t{1} << width); ++ov) {
      SkeKey key{BitString::from_uint(kv, lam), BitString::from_uint(ov, width), params.prf};
      for (std::uint64_t rv = 0; rv < (std::uint64_t{1} << ell); ++rv) {
        BitString r = BitString::from_uint(rv, ell);
        for (std::uint64_t ki = 0; ki < ue_keys; ++ki) {
          OtueKey k_ue = otue::key_from_index(params.family, ki);
          for (std::uint64_t kp = 0; kp < kps; ++kp) {
            auto [ct1, revealed] = detail::hybrid_view(variant, params, key, r, k_ue, BitString::from_uint(kp, lam));
            for (std::uint64_t mv = 0; mv < messages; ++mv) {
              auto ct2 = otue::otue_encrypt(k_ue, BitString::from_uint(mv, params.n()));
              for (std::uint64_t s = 0; s < adv.shared_count; ++s) {
                sum += weight * composed_cell(adv, ct1, revealed, ct2, static_cast<std::size_t>(mv), s);
              }
            }
          }
        }
      }
    }
  }
  long double denom = ske_cells * std::ldexp(1.0L, static_cast<int>(lam)) * ue_keys * messages * adv.shared_count;
  report.success_probability = sum.value() / static_cast<double>(denom);
  report.trials = static_cast<std::uint64_t>(cells);
  return report;
}

// One-time adversary that simulates the Hybrid 2 view: the shared classical
// value encodes (k, otp, r, k', s). Phase 1 builds ct0 = SKE.Enc((k, otp), 0; r)
// and runs adv's channel; phase 2 computes fk = FakeGen(ct0, encode(k_UE); k')
// and runs adv's measurements.
inline harness::CloningAdversary pue_reduction_to_otue(const PrivateParams& params, const ComposedAdversary& adv) {
  check_composed(adv);
  const auto& prf = *params.prf;
  std::size_t lam = prf.key_bits(), ell = prf.input_bits(), width = prf.output_bits();
  std::size_t bits = 2 * lam + width + ell;
  if (bits >= 63) throw BudgetExceeded("reduction shared randomness too large to index");

  struct View {
    ClassicalCiphertext ct0;
    BitString k_prime;
    std::uint64_t s;
  };
  auto unpack = [params, lam, ell, width, bits, adv](std::uint64_t shared) {
    std::uint64_t s = shared >> bits;
    BitString all = BitString::from_uint(shared & ((std::uint64_t{1} << bits) - 1), bits);
    SkeKey key{all.slice(0, lam), all.slice(lam, width), params.prf};
    BitString r = all.slice(lam + width, ell);
    BitString k_prime = all.slice(lam + width + ell, lam);
    return View{ske::ske_encrypt_with(key, BitString::zeros(width), r), k_prime, s};
  };

  harness::CloningAdversary out;
  out.name = adv.name + "+reduction";
  out.dim_b = adv.dim_b;
  out.dim_c = adv.dim_c;
  out.shared_count = adv.shared_count << bits;
  out.split = [unpack, adv](std::uint64_t shared) {
    View v = unpack(shared);
    return adv.split(v.ct0, v.s);
  };
  auto phase2 = [params, unpack](std::function<Povm(const ClassicalCiphertext&, const SkeKey&, std::uint64_t)> f) {
    return [params, unpack, f](const OtueKey& k_ue, std::uint64_t shared) {
      View v = unpack(shared);
      SkeKey fk = ske::fake_gen_with(params.prf, v.ct0, params.encoding().encode(k_ue), v.k_prime);
      return f(v.ct0, fk, v.s);
    };
  };
  out.bob = phase2(adv.bob);
  out.charlie = phase2(adv.charlie);
  return out;
}

// ---------------------------------------------------------------------------
// Multi-message indistinguishability.

template <typename Key, typename Ciphertext>
struct IndScheme {
  std::function<Key(Rng&)> setup;
  std::function<Ciphertext(const Key&, const BitString&, Rng&)> encrypt;
};

// `key` is non-null only when reveal_key is set (a sanity distinguisher).
template <typename Key, typename Ciphertext>
struct IndDistinguisher {
  std::string name;
  bool reveal_key = false;
  std::function<int(const Key* key, const std::vector<Ciphertext>& cts, Rng& rng)> guess;
};

struct IndReport {
  double advantage;   // 2 Pr[correct] - 1
  double half_width;  // Wilson 95%, scaled to the advantage
  std::uint64_t trials;
  std::uint64_t seed;
};

// Each trial draws b, encrypts the b-side of every pair under one key and asks
// the distinguisher for b.
template <typename Key, typename Ciphertext>
IndReport ind_experiment(const IndScheme<Key, Ciphertext>& scheme, const IndDistinguisher<Key, Ciphertext>& dist,
                         const std::vector<std::pair<BitString, BitString>>& pairs, std::uint64_t trials,
                         std::uint64_t seed) {
  if (pairs.empty()) throw std::invalid_argument("need at least one message pair");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  for (const auto& [a, b] : pairs) {
    if (a.size() != b.size()) throw DimensionError("message pair lengths differ");
  }
  std::uint64_t correct = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = harness::trial_rng(seed, t);
    Key key = scheme.setup(rng);
    int b = rng.bit() ? 1 : 0;
    std::vector<Ciphertext> cts;
    cts.reserve(pairs.size());
    for (const auto& pr : pairs) cts.push_back(scheme.encrypt(key, b ? pr.second : pr.first, rng));
    int g = dist.guess(dist.reveal_key ? &key : nullptr, cts, rng);
    if (g == b) ++correct;
  }
  double p = static_cast<double>(correct) / static_cast<double>(trials);
  return IndReport{2.0 * p - 1.0, 2.0 * harness::wilson_half_width(correct, trials), trials, seed};
}

inline IndScheme<SkeKey, HybridCiphertext> private_ind_scheme(const PrivateParams& params) {
  return {[params](Rng& rng) { return pue_setup(params, rng); },
          [params](const SkeKey& key, const BitString& m, Rng& rng) { return pue_encrypt(params, key, m, rng); }};
}

}  // namespace ue::pue

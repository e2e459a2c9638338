#include "ue/cloner.hpp"
#include "ue/cloning.hpp"
#include "ue/conjugate.hpp"
#include "ue/fakekey.hpp"
#include "ue/fe.hpp"
#include "ue/private_ue.hpp"
#include "ue/public_ue.hpp"
#include "ue/quantum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace ue;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 for no limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

otue::FamilyPtr wiesner(std::size_t n) {
  return std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(n));
}

BitString bits(std::uint64_t v, std::size_t w) { return BitString::from_uint(v, w); }

constexpr double kSingleQubitCloneSuccess = 0.7285533905932737;

Outcome cloner_fidelity() {
  double f = attacks::xz_sweep_min_fidelity(attacks::equatorial_cloner().kraus, 360);
  return {std::abs(f - 0.853553390) <= 1e-8, fmt("min fidelity %.12f", f)};
}

Outcome clone_attack() {
  double p1 = harness::cloning_success_exact(wiesner(1), attacks::build_cloner_adversary(1)).success_probability;
  bool ok = p1 >= 0.70710678 - 1e-9 && std::abs(p1 - kSingleQubitCloneSuccess) <= 1e-12;
  std::string detail = fmt("n=1 %.16f", p1);
  for (std::size_t n = 2; n <= 3; ++n) {
    double p = harness::cloning_success_exact(wiesner(n), attacks::build_cloner_adversary(n)).success_probability;
    ok = ok && std::abs(p - std::pow(kSingleQubitCloneSuccess, static_cast<double>(n))) <= 1e-9;
    detail += " n=" + std::to_string(n) + fmt(" %.12f", p);
  }
  return {ok, detail};
}

Outcome implied_t_bound() {
  bool ok = true;
  std::string detail;
  for (std::size_t n = 1; n <= 3; ++n) {
    double p = harness::cloning_success_exact(wiesner(n), attacks::build_cloner_adversary(n)).success_probability;
    double t = harness::implied_t(p, n);
    ok = ok && t >= 0.5 * static_cast<double>(n) - 1e-6;
    detail += (n > 1 ? " " : "") + std::string("n=") + std::to_string(n) + fmt(" t=%.9f", t);
  }
  return {ok, detail};
}

Outcome moe_saturation() {
  harness::MoeGame game{wiesner(1)};
  double midway = harness::moe_value(game, attacks::midway_moe_strategy(game));
  bool ok = std::abs(midway - 0.853553390) <= 1e-8;
  double seesaw_min = 1.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    seesaw_min = std::min(seesaw_min, harness::moe_seesaw(game, 2, 2, 60, 100 + seed).value);
  }
  ok = ok && seesaw_min >= 0.8535;
  Rng rng(4242);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::size_t db = 1 + rng.below(2), dc = 1 + rng.below(2);
    harness::MoeStrategy s{quantum::random_density(2 * db * dc, 1 + rng.below(2), rng), db, dc, {}, {}};
    for (int t = 0; t < 2; ++t) {
      s.bob.push_back(quantum::random_povm(db, 2, rng));
      s.charlie.push_back(quantum::random_povm(dc, 2, rng));
    }
    worst = std::max(worst, harness::moe_value(game, s));
  }
  ok = ok && worst <= 0.853553 + 1e-6;
  return {ok, fmt("midway %.12f", midway) + fmt(" seesaw_min %.9f", seesaw_min) + fmt(" random_max %.9f", worst)};
}

double mixed_defect(const quantum::BasisFamily& fam, const BitString& m) {
  auto d = static_cast<Eigen::Index>(fam.dim());
  return quantum::max_abs(otue::average_ciphertext(fam, m).matrix() -
                          quantum::Matrix::Identity(d, d) / static_cast<double>(d));
}

Outcome average_ciphertext_identity() {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto fam = quantum::wiesner_family(n);
    for (std::uint64_t mv = 0; mv < fam.dim(); ++mv) worst = std::max(worst, mixed_defect(fam, bits(mv, n)));
  }
  Rng rng(2718);
  for (int f = 0; f < 20; ++f) {
    std::size_t n = 1 + f % 3;
    auto fam = quantum::random_orthogonal_family(n, 1 + rng.below(5), rng);
    worst = std::max(worst, mixed_defect(fam, BitString::random(n, rng)));
  }
  return {worst <= 1e-12, fmt("max entry deviation %.3e", worst)};
}

Outcome epr_lemma() {
  Rng rng(13);
  double worst = 0.0;
  for (std::size_t d : {2u, 4u, 8u, 16u}) {
    for (int i = 0; i < 10; ++i) {
      worst = std::max(worst, quantum::epr_invariance_defect(quantum::random_orthogonal(d, rng)));
    }
  }
  worst = std::max(worst, quantum::epr_invariance_defect(quantum::hadamard()));
  const double h = 1.0 / std::numbers::sqrt2;
  quantum::Matrix y_basis(2, 2);
  y_basis << h, h, quantum::Complex(0, h), quantum::Complex(0, -h);
  double control = quantum::epr_invariance_defect(y_basis);
  return {worst <= 1e-12 && control > 0.1, fmt("orthogonal max %.3e", worst) + fmt(" control %.6f", control)};
}

Outcome fake_key_property() {
  bool ok = true;
  double worst = 0.0;
  int tables = 0;
  for (std::size_t n = 1; n <= 2; ++n) {
    std::vector<ske::PrfPtr> prfs;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      prfs.push_back(std::make_shared<const ske::Prf>(ske::Prf::random_table(n, n, n, rng)));
    }
    std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    prfs.push_back(std::make_shared<const ske::Prf>(ske::Prf::constant_table(n, n, bits(mask, n))));
    std::vector<BitString> rows;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << (2 * n)); ++i) rows.push_back(bits(i & mask, n));
    prfs.push_back(std::make_shared<const ske::Prf>(ske::Prf::table(n, n, n, rows)));
    for (const auto& prf : prfs) {
      ++tables;
      for (std::uint64_t mv = 0; mv <= mask; ++mv) {
        double tvd = ske::fakekey_tvd_bruteforce(prf, bits(mv, n));
        worst = std::max(worst, tvd);
        ok = ok && tvd == 0.0;
      }
    }
  }
  return {ok, std::to_string(tables) + " tables" + fmt(" max tvd %g", worst)};
}

pue::PrivateParams private_table_params(std::uint64_t seed) {
  Rng rng(seed);
  return pue::private_params_table(wiesner(1), 2, 2, rng);
}

Outcome private_hybrids() {
  auto params = private_table_params(14);
  bool ok = true;
  std::string detail;
  for (const auto& adv : {pue::lift_adversary(params, harness::trivial_adversary(params.family)),
                          pue::lift_adversary(params, attacks::build_cloner_adversary(1))}) {
    double h1 = pue::pue_hybrid_experiment(1, params, adv, harness::Mode::kExact).success_probability;
    double h2 = pue::pue_hybrid_experiment(2, params, adv, harness::Mode::kExact).success_probability;
    double red =
        harness::cloning_success_exact(params.family, pue::pue_reduction_to_otue(params, adv)).success_probability;
    ok = ok && h1 == h2 && red == h2;
    detail += (detail.empty() ? "" : " ") + adv.name + fmt(" h1=%.16f", h1) + fmt(" h2=%.16f", h2) +
              fmt(" red=%.16f", red);
  }
  return {ok, detail};
}

Outcome fe_pipeline() {
  Rng prng(15);
  auto prf = std::make_shared<const ske::Prf>(ske::Prf::random_table(2, 2, 2, prng));
  auto circuit = std::make_shared<const fe::BooleanCircuit>(fe::build_F_circuit(*prf));
  fe::FLayout lay(*prf);
  Rng rng(16);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    BitString d = BitString::random(lay.desc_bits(), rng), x = BitString::random(lay.data_bits(), rng);
    auto keys = fe::fe_setup(fe::FeBackend::kGarbled, lay.desc_bits(), rng);
    auto fk = fe::fe_keygen(std::move(keys.msk), d);
    if (fe::fe_decrypt(fk, fe::fe_encrypt(keys.mpk, circuit, x, rng)) != circuit->evaluate(d, x)) ++failures;
  }
  int mismatches = 0, checks = 0;
  auto garbled = fe::fe_setup(fe::FeBackend::kGarbled, lay.desc_bits(), rng);
  for (std::uint64_t vv = 0; vv < 4; ++vv) {
    BitString v = bits(vv, 2);
    for (std::uint64_t kv = 0; kv < 16; ++kv) {
      ske::SkeKey key{bits(kv >> 2, 2), bits(kv & 3, 2), prf};
      for (std::uint64_t rv = 0; rv < 4; ++rv) {
        auto fk = fe::fe_keygen(garbled.msk.duplicate(), lay.description(ske::ske_encrypt_with(key, v, bits(rv, 2))));
        BitString via_message = fe::fe_decrypt(fk, fe::fe_encrypt(garbled.mpk, circuit, lay.message_input(v), rng));
        BitString via_key = fe::fe_decrypt(fk, fe::fe_encrypt(garbled.mpk, circuit, lay.key_input(key), rng));
        ++checks;
        if (via_message != v || via_key != v) ++mismatches;
      }
    }
  }
  return {failures == 0 && mismatches == 0, "trials 1000 failures " + std::to_string(failures) + " trojan checks " +
                                                std::to_string(checks) + " mismatches " + std::to_string(mismatches)};
}

Outcome public_reduction() {
  bool ok = true;
  std::string detail;
  Rng prng(26);
  auto params = pub::public_params_table(wiesner(1), 2, 2, fe::FeBackend::kReference, prng);
  for (const auto& adv : {pub::lift_public_adversary(params, harness::trivial_adversary(params.family)),
                          pub::lift_public_adversary(params, attacks::build_cloner_adversary(1))}) {
    double h3 = pub::pub_hybrid_experiment(3, params, adv, harness::Mode::kExact).success_probability;
    double red =
        harness::cloning_success_exact(params.family, pub::pub_reduction_to_otue(params, adv)).success_probability;
    ok = ok && red == h3;
    detail += adv.name + fmt(" h3=%.16f", h3) + fmt(" red=%.16f ", red);
  }
  int trials = 0, correct = 0;
  Rng rng(27);
  for (auto backend : {fe::FeBackend::kReference, fe::FeBackend::kGarbled}) {
    auto p = pub::public_params_table(wiesner(1), 2, 2, backend, rng);
    for (int rep = 0; rep < 10; ++rep) {
      auto keys = pub::pub_setup(p, rng);
      for (std::uint64_t mv = 0; mv < 2; ++mv) {
        ++trials;
        if (pub::pub_decrypt(p, keys.sk, pub::pub_encrypt(p, keys.pk, bits(mv, 1), rng), rng) == bits(mv, 1)) {
          ++correct;
        }
      }
    }
  }
  auto p2 = pub::public_params_table(wiesner(2), 1, 1, fe::FeBackend::kGarbled, rng);
  for (int t = 0; t < 1000; ++t) {
    auto keys = pub::pub_setup(p2, rng);
    BitString m = BitString::random(2, rng);
    ++trials;
    if (pub::pub_decrypt(p2, keys.sk, pub::pub_encrypt(p2, keys.pk, m, rng), rng) == m) ++correct;
  }
  ok = ok && correct == trials;
  return {ok, detail + "correct " + std::to_string(correct) + "/" + std::to_string(trials)};
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "cloner fidelity", 1.0, cloner_fidelity},
      {2, "cloning attack lower bound", 10.0, clone_attack},
      {3, "implied t of cloning attack", 0.0, implied_t_bound},
      {4, "monogamy bound saturation", 60.0, moe_saturation},
      {5, "average ciphertext is maximally mixed", 0.0, average_ciphertext_identity},
      {6, "EPR invariance under real orthogonal bases", 0.0, epr_lemma},
      {7, "perfect fake-key property", 5.0, fake_key_property},
      {8, "private UE hybrid equality", 0.0, private_hybrids},
      {9, "FE pipeline and Trojan equivalence", 120.0, fe_pipeline},
      {10, "public UE reduction fidelity and correctness", 0.0, public_reduction},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    bool ok = out.ok && in_time;
    if (!ok) ++failed;
    std::string timing = fmt("%.3fs", secs);
    if (c.budget_s > 0.0) timing += fmt(" (limit %gs)", c.budget_s);
    std::printf("%s %2d %s: %s [%s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str(),
                timing.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

// Command-line front end for the uncloneable encryption library.
//
// Exit codes: 0 ok, 1 runtime or decode error, 2 usage, 3 enumeration budget
// exceeded, 4 invariant violation.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ue/cloner.hpp"
#include "ue/cloning.hpp"
#include "ue/conjugate.hpp"
#include "ue/errors.hpp"
#include "ue/fakekey.hpp"
#include "ue/fe.hpp"
#include "ue/private_ue.hpp"
#include "ue/public_ue.hpp"
#include "ue/quantum.hpp"

namespace {

using nlohmann::json;
using namespace ue;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInvariant = 4;

// ---------------------------------------------------------------------------
// I/O

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("UE_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / p;
  }
  return p;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  auto p = resolve_output(path);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + p.string() + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DecodeError(path + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DecodeError(std::string("field '") + key + "': " + e.what());
  }
}

std::string g9(double v) { return harness::format_g9(v); }

// ---------------------------------------------------------------------------
// Scheme configuration shared by key, ciphertext and experiment commands.

struct SchemeConfig {
  std::string scheme = "otue";
  std::size_t n = 1;
  std::string family = "wiesner";
  std::size_t bases = 3;
  std::uint64_t family_seed = 0;
  std::string prf = "table";
  std::size_t lambda = 2;
  std::size_t ell = 2;
  std::uint64_t params_seed = 0;
  std::string fe = "garbled";

  json to_json() const {
    json j{{"scheme", scheme}, {"n", n}, {"family", family}};
    if (family == "orthogonal") {
      j["bases"] = bases;
      j["family_seed"] = family_seed;
    }
    if (scheme != "otue") {
      j["prf"] = prf;
      j["lambda"] = lambda;
      j["ell"] = ell;
      j["params_seed"] = params_seed;
    }
    if (scheme == "public") j["fe"] = fe;
    return j;
  }

  static SchemeConfig from_json(const json& j) {
    SchemeConfig c;
    c.scheme = field<std::string>(j, "scheme");
    c.n = field<std::size_t>(j, "n");
    c.family = field<std::string>(j, "family");
    if (c.family == "orthogonal") {
      c.bases = field<std::size_t>(j, "bases");
      c.family_seed = field<std::uint64_t>(j, "family_seed");
    }
    if (c.scheme != "otue") {
      c.prf = field<std::string>(j, "prf");
      c.lambda = field<std::size_t>(j, "lambda");
      c.ell = field<std::size_t>(j, "ell");
      c.params_seed = field<std::uint64_t>(j, "params_seed");
    }
    if (c.scheme == "public") c.fe = field<std::string>(j, "fe");
    return c;
  }

  otue::FamilyPtr make_family() const {
    if (family == "wiesner") return std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(n));
    if (family == "orthogonal") {
      if (bases == 0) throw std::invalid_argument("--bases must be at least 1");
      Rng rng(family_seed);
      return std::make_shared<const quantum::BasisFamily>(quantum::random_orthogonal_family(n, bases, rng));
    }
    throw std::invalid_argument("unknown family '" + family + "'");
  }

  ske::PrfPtr make_prf(std::size_t width) const {
    if (prf == "table") {
      Rng rng(params_seed);
      return std::make_shared<const ske::Prf>(ske::Prf::random_table(lambda, ell, width, rng));
    }
    if (prf == "hash") return std::make_shared<const ske::Prf>(ske::Prf::keyed_hash(lambda, ell, width));
    throw std::invalid_argument("unknown PRF '" + prf + "'");
  }

  pue::PrivateParams private_params() const {
    auto fam = make_family();
    return pue::PrivateParams{fam, make_prf(pue::OtueKeyEncoding(fam).width())};
  }

  pub::PublicParams public_params() const {
    if (prf != "table") throw std::invalid_argument("the public scheme needs --prf table");
    auto fam = make_family();
    return pub::public_params(fam, make_prf(pue::OtueKeyEncoding(fam).width()), fe::backend_from_string(fe));
  }
};

void add_family_options(CLI::App* cmd, SchemeConfig& c) {
  cmd->add_option("--n", c.n, "message length in bits")->required()->check(CLI::Range(1, 16));
  cmd->add_option("--family", c.family, "basis family")->check(CLI::IsMember({"wiesner", "orthogonal"}));
  cmd->add_option("--bases", c.bases, "number of bases for --family orthogonal");
  cmd->add_option("--family-seed", c.family_seed, "seed for --family orthogonal");
}

void add_prf_options(CLI::App* cmd, SchemeConfig& c, bool with_kind) {
  if (with_kind) cmd->add_option("--prf", c.prf, "PRF backend")->check(CLI::IsMember({"table", "hash"}));
  cmd->add_option("--lambda", c.lambda, "PRF key bits");
  cmd->add_option("--ell", c.ell, "PRF input bits");
  cmd->add_option("--params-seed", c.params_seed, "seed for the PRF truth table");
}

// ---------------------------------------------------------------------------
// Quantum ciphertexts as JSON.

json state_to_json(const otue::QuantumCiphertext& ct) {
  return {{"n", ct.n}, {"rho", quantum::dump_matrix(ct.state.matrix())}};
}

otue::QuantumCiphertext state_from_json(const json& j, std::size_t n) {
  if (field<std::size_t>(j, "n") != n) throw DecodeError("quantum ciphertext length differs from key");
  quantum::Matrix m = quantum::parse_matrix(field<std::string>(j, "rho"));
  if (static_cast<std::size_t>(m.rows()) != (std::size_t{1} << n)) throw DecodeError("quantum ciphertext dimension");
  try {
    return otue::QuantumCiphertext{quantum::DensityMatrix(std::move(m)), n};
  } catch (const InvariantViolation& e) {
    throw DecodeError(std::string("quantum ciphertext is not a state: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::uint8_t> hex_to_bytes(const std::string& hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd hex length");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    auto nib = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw DecodeError("invalid hex digit");
    };
    out.push_back(static_cast<std::uint8_t>(nib(hex[i]) << 4 | nib(hex[i + 1])));
  }
  return out;
}

std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// ue {otue|private|public} {keygen|encrypt|decrypt}

struct UeArgs {
  SchemeConfig config;
  std::optional<std::uint64_t> seed;
  std::string key_path;
  std::string ct_path;
  std::string message;
  std::string out;
  std::string public_out;
};

std::uint64_t need_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw std::invalid_argument("--seed is required");
  return *seed;
}

BitString parse_message(const std::string& text, std::size_t n) {
  BitString m = BitString::parse_binary(text);
  if (m.size() != n) throw std::invalid_argument("--message must have " + std::to_string(n) + " bits");
  return m;
}

void ue_keygen(const UeArgs& a) {
  Rng rng(need_seed(a.seed));
  const SchemeConfig& c = a.config;
  json out{{"config", c.to_json()}};
  if (c.scheme == "otue") {
    out["key"] = otue::key_to_json(otue::otue_setup(c.n, c.make_family(), rng));
  } else if (c.scheme == "private") {
    out["key"] = ske::key_to_json(pue::pue_setup(c.private_params(), rng));
  } else {
    auto params = c.public_params();
    auto keys = pub::pub_setup(params, rng);
    pub::check_keys(params, keys);
    out["keys"] = pub::keys_to_json(keys);
    if (!a.public_out.empty()) {
      write_output(a.public_out, dump(json{{"config", c.to_json()}, {"pk", fe::to_json(keys.pk)}}));
    }
  }
  write_output(a.out, dump(out));
}

void ue_encrypt(const UeArgs& a, const std::string& scheme) {
  Rng rng(need_seed(a.seed));
  json kf = read_json(a.key_path);
  SchemeConfig c = SchemeConfig::from_json(kf.at("config"));
  if (c.scheme != scheme) throw DecodeError("key file is for the " + c.scheme + " scheme");
  BitString m = parse_message(a.message, c.n);
  json out{{"config", c.to_json()}};
  if (scheme == "otue") {
    auto key = otue::key_from_json(kf.at("key"), c.make_family());
    out["ct2"] = state_to_json(otue::otue_encrypt(key, m));
  } else if (scheme == "private") {
    auto params = c.private_params();
    auto hct = pue::pue_encrypt(params, ske::key_from_json(kf.at("key"), params.prf), m, rng);
    out["ct1"] = ske::ciphertext_to_json(hct.ct1);
    out["ct2"] = state_to_json(hct.ct2);
  } else {
    auto params = c.public_params();
    const json& pk_json = kf.contains("keys") ? kf.at("keys").at("pk") : kf.at("pk");
    auto mpk = fe::mpk_from_json(pk_json);
    if (mpk.backend != params.backend || mpk.desc_bits != params.trojan_bits()) {
      throw DecodeError("public key does not match the scheme parameters");
    }
    auto hct = pub::pub_encrypt(params, mpk, m, rng);
    out["ct1"] = bytes_to_hex(fe::serialize(hct.ct1));
    out["ct2"] = state_to_json(hct.ct2);
  }
  write_output(a.out, dump(out));
}

void ue_decrypt(const UeArgs& a, const std::string& scheme) {
  Rng rng(need_seed(a.seed));
  json kf = read_json(a.key_path);
  json cf = read_json(a.ct_path);
  SchemeConfig c = SchemeConfig::from_json(kf.at("config"));
  if (c.scheme != scheme) throw DecodeError("key file is for the " + c.scheme + " scheme");
  if (SchemeConfig::from_json(cf.at("config")).to_json() != c.to_json()) {
    throw DecodeError("ciphertext parameters differ from the key's");
  }
  auto ct2 = state_from_json(cf.at("ct2"), c.n);
  BitString m;
  if (scheme == "otue") {
    m = otue::otue_decrypt_sample(otue::key_from_json(kf.at("key"), c.make_family()), ct2, rng);
  } else if (scheme == "private") {
    auto params = c.private_params();
    auto key = ske::key_from_json(kf.at("key"), params.prf);
    auto ct1 = ske::ciphertext_from_json(cf.at("ct1"), *params.prf);
    ske::check_ciphertext(*params.prf, ct1);
    m = pue::pue_decrypt(params, key, pue::HybridCiphertext{ct1, ct2}, rng);
  } else {
    auto params = c.public_params();
    if (!kf.contains("keys")) throw DecodeError("decryption needs the full key file, not the public key");
    auto keys = pub::keys_from_json(kf.at("keys"), params);
    auto ct1 = fe::deserialize(hex_to_bytes(field<std::string>(cf, "ct1")));
    m = pub::pub_decrypt(params, keys.sk, pub::PubHybridCiphertext{std::move(ct1), ct2}, rng);
  }
  write_output(a.out, m.to_string() + "\n");
}

void register_ue(CLI::App& app) {
  auto* ue_cmd = app.add_subcommand("ue", "key generation, encryption and decryption");
  ue_cmd->require_subcommand(1);
  for (std::string scheme : {"otue", "private", "public"}) {
    auto* s = ue_cmd->add_subcommand(scheme, scheme == "otue" ? "one-time conjugate scheme"
                                             : scheme == "private" ? "reusable private-key scheme"
                                                                   : "public-key scheme");
    s->require_subcommand(1);
    auto args = std::make_shared<UeArgs>();
    args->config.scheme = scheme;
    if (scheme == "private") args->config.prf = "hash";
    if (scheme == "public") {
      args->config.lambda = 1;
      args->config.ell = 1;
    }

    auto* kg = s->add_subcommand("keygen", "generate a key file");
    add_family_options(kg, args->config);
    if (scheme != "otue") add_prf_options(kg, args->config, scheme == "private");
    if (scheme == "public") {
      kg->add_option("--fe", args->config.fe, "FE backend")->check(CLI::IsMember({"reference", "garbled"}));
      kg->add_option("--public-out", args->public_out, "also write the public key alone to this file");
    }
    kg->add_option("--seed", args->seed, "randomness seed");
    kg->add_option("--out", args->out, "output file (default stdout)");
    kg->callback([args] { ue_keygen(*args); });

    auto* enc = s->add_subcommand("encrypt", "encrypt a message");
    enc->add_option("--key", args->key_path, scheme == "public" ? "key or public-key file" : "key file")->required();
    enc->add_option("--message", args->message, "message bits, e.g. 01")->required();
    enc->add_option("--seed", args->seed, "randomness seed");
    enc->add_option("--out", args->out, "output file (default stdout)");
    enc->callback([args, scheme] { ue_encrypt(*args, scheme); });

    auto* dec = s->add_subcommand("decrypt", "decrypt a ciphertext file");
    dec->add_option("--key", args->key_path, "key file")->required();
    dec->add_option("--ciphertext", args->ct_path, "ciphertext file")->required();
    dec->add_option("--seed", args->seed, "measurement seed");
    dec->add_option("--out", args->out, "output file (default stdout)");
    dec->callback([args, scheme] { ue_decrypt(*args, scheme); });
  }
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentArgs {
  SchemeConfig config;
  std::string mode = "exact";
  std::uint64_t trials = 0;
  std::optional<std::uint64_t> seed;
  std::string adversary = "cloner";
  std::string format = "csv";
  std::string out;
};

harness::Mode parse_mode(const ExperimentArgs& a) {
  if (a.mode == "exact") return harness::Mode::kExact;
  if (!a.seed) throw std::invalid_argument("--seed is required in mc mode");
  if (a.trials == 0) throw std::invalid_argument("--trials must be positive in mc mode");
  return harness::Mode::kMonteCarlo;
}

// JSON: {"name", "dim_b", "dim_c", "kraus": [matrix dumps]}. The channel acts
// on the whole ciphertext; a party whose register has the message dimension
// decrypts honestly with the revealed key, any other party answers 0.
harness::CloningAdversary adversary_from_file(const std::string& path, const otue::FamilyPtr& family) {
  json j = read_json(path);
  std::size_t d = family->dim();
  auto dim_b = field<std::size_t>(j, "dim_b"), dim_c = field<std::size_t>(j, "dim_c");
  std::vector<quantum::Matrix> ops;
  for (const auto& k : j.at("kraus")) ops.push_back(quantum::parse_matrix(k.get<std::string>()));
  std::optional<quantum::KrausChannel> parsed;
  try {
    parsed.emplace(d, dim_b * dim_c, std::move(ops));
  } catch (const std::logic_error& e) {
    throw DecodeError(path + ": " + e.what());
  }
  quantum::KrausChannel split = *parsed;
  harness::CloningAdversary adv;
  adv.name = j.value("name", "custom");
  adv.dim_b = dim_b;
  adv.dim_c = dim_c;
  adv.split = [split](std::uint64_t) { return split; };
  auto party = [d](std::size_t dim) {
    return [d, dim](const otue::OtueKey& key, std::uint64_t) {
      return dim == d ? otue::decrypt_povm(key) : quantum::Povm::constant(dim, d, 0);
    };
  };
  adv.bob = party(dim_b);
  adv.charlie = party(dim_c);
  return adv;
}

harness::CloningAdversary make_adversary(const std::string& spec, const otue::FamilyPtr& family) {
  if (spec == "trivial") return harness::trivial_adversary(family);
  if (spec == "cloner") {
    if (family->id() != "wiesner") throw std::invalid_argument("the cloner adversary needs --family wiesner");
    return attacks::build_cloner_adversary(family->n());
  }
  if (spec == "constant") return harness::constant_guess_adversary(family, 0);
  if (spec.rfind("file:", 0) == 0) return adversary_from_file(spec.substr(5), family);
  throw std::invalid_argument("unknown adversary '" + spec + "' (trivial, cloner, constant, file:PATH)");
}

void emit_reports(const ExperimentArgs& a, const std::vector<harness::ExperimentReport>& reports) {
  if (a.format == "csv") {
    write_output(a.out, harness::to_csv(reports));
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(harness::to_json(r));
    write_output(a.out, dump(arr));
  }
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--mode", a.mode, "exact enumeration or Monte Carlo")->check(CLI::IsMember({"exact", "mc"}));
  cmd->add_option("--trials", a.trials, "Monte Carlo trials");
  cmd->add_option("--seed", a.seed, "Monte Carlo seed");
  cmd->add_option("--adversary", a.adversary, "trivial, cloner, constant or file:PATH");
  cmd->add_option("--format", a.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", a.out, "output file (default stdout)");
}

harness::ExperimentReport run_clone(const otue::FamilyPtr& family, const harness::CloningAdversary& adv,
                                    harness::Mode mode, const ExperimentArgs& a) {
  return mode == harness::Mode::kExact ? harness::cloning_success_exact(family, adv)
                                       : harness::cloning_success_mc(family, adv, a.trials, *a.seed);
}

void attack_clone(const ExperimentArgs& a) {
  auto mode = parse_mode(a);
  auto family = a.config.make_family();
  emit_reports(a, {run_clone(family, make_adversary(a.adversary, family), mode, a)});
}

void require_equal(const harness::ExperimentReport& x, const harness::ExperimentReport& y) {
  if (x.success_probability != y.success_probability) {
    throw InvariantViolation(x.scheme + " success " + g9(x.success_probability) + " differs from " + y.scheme +
                             " success " + g9(y.success_probability));
  }
}

void attack_reduce_private(const ExperimentArgs& a) {
  auto mode = parse_mode(a);
  auto params = a.config.private_params();
  auto adv = pue::lift_adversary(params, make_adversary(a.adversary, params.family));
  std::uint64_t seed = a.seed.value_or(0);
  auto h1 = pue::pue_hybrid_experiment(1, params, adv, mode, a.trials, seed);
  auto h2 = pue::pue_hybrid_experiment(2, params, adv, mode, a.trials, seed + 1);
  ExperimentArgs shifted = a;
  if (shifted.seed) shifted.seed = seed + 2;
  auto red = run_clone(params.family, pue::pue_reduction_to_otue(params, adv), mode, shifted);
  red.scheme = "private-reduction";
  emit_reports(a, {h1, h2, red});
  if (mode == harness::Mode::kExact) {
    require_equal(h1, h2);
    require_equal(red, h2);
  }
}

void attack_reduce_public(const ExperimentArgs& a) {
  auto mode = parse_mode(a);
  auto params = a.config.public_params();
  auto adv = pub::lift_public_adversary(params, make_adversary(a.adversary, params.family));
  std::uint64_t seed = a.seed.value_or(0);
  std::vector<harness::ExperimentReport> rows;
  for (int v = 1; v <= 3; ++v) rows.push_back(pub::pub_hybrid_experiment(v, params, adv, mode, a.trials, seed + v - 1));
  ExperimentArgs shifted = a;
  if (shifted.seed) shifted.seed = seed + 3;
  auto red = run_clone(params.family, pub::pub_reduction_to_otue(params, adv), mode, shifted);
  red.scheme = "public-reduction";
  rows.push_back(red);
  emit_reports(a, rows);
  if (mode == harness::Mode::kExact) {
    require_equal(rows[0], rows[1]);
    require_equal(rows[1], rows[2]);
    require_equal(red, rows[2]);
  }
}

void register_attack(CLI::App& app) {
  auto* attack = app.add_subcommand("attack", "cloning experiments");
  attack->require_subcommand(1);

  auto clone_args = std::make_shared<ExperimentArgs>();
  auto* clone = attack->add_subcommand("clone", "cloning experiment against the one-time scheme");
  add_family_options(clone, clone_args->config);
  add_experiment_options(clone, *clone_args);
  clone->callback([clone_args] { attack_clone(*clone_args); });

  auto* reduce = attack->add_subcommand("reduce", "hybrid experiments and the reduction to the one-time scheme");
  reduce->require_subcommand(1);
  auto priv_args = std::make_shared<ExperimentArgs>();
  auto* priv = reduce->add_subcommand("private", "private-key scheme");
  add_family_options(priv, priv_args->config);
  add_prf_options(priv, priv_args->config, true);
  add_experiment_options(priv, *priv_args);
  priv->callback([priv_args] { attack_reduce_private(*priv_args); });

  auto pub_args = std::make_shared<ExperimentArgs>();
  pub_args->config.lambda = 1;
  pub_args->config.ell = 1;
  pub_args->config.fe = "reference";
  auto* pubc = reduce->add_subcommand("public", "public-key scheme");
  add_family_options(pubc, pub_args->config);
  add_prf_options(pubc, pub_args->config, false);
  pubc->add_option("--fe", pub_args->config.fe, "FE backend")->check(CLI::IsMember({"reference", "garbled"}));
  add_experiment_options(pubc, *pub_args);
  pubc->callback([pub_args] { attack_reduce_public(*pub_args); });
}

// ---------------------------------------------------------------------------
// moe {value|optimize}

struct MoeArgs {
  std::size_t n = 1;
  std::string strategy = "midway";
  std::uint64_t seed = 0;
  std::size_t iterations = 200;
  std::size_t dim_b = 2;
  std::size_t dim_c = 2;
  std::string format = "text";
  std::string out;
};

void emit_value(const MoeArgs& a, json j, double value) {
  if (a.format == "json") {
    j["value"] = value;
    write_output(a.out, dump(j));
  } else {
    write_output(a.out, g9(value) + "\n");
  }
}

void moe_value_cmd(const MoeArgs& a) {
  auto fam1 = std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(1));
  harness::MoeStrategy base = attacks::midway_moe_strategy(harness::MoeGame{fam1});
  harness::MoeStrategy s = base;
  for (std::size_t k = 2; k <= a.n; ++k) s = harness::tensor_strategy(quantum::wiesner_family(k - 1), s, *fam1, base);
  harness::MoeGame game{std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(a.n))};
  emit_value(a, {{"strategy", a.strategy}, {"n", a.n}}, harness::moe_value(game, s));
}

void moe_optimize_cmd(const MoeArgs& a) {
  harness::MoeGame game{std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(a.n))};
  auto res = harness::moe_seesaw(game, a.dim_b, a.dim_c, a.iterations, a.seed);
  emit_value(a,
             {{"strategy", "seesaw"},
              {"n", a.n},
              {"seed", a.seed},
              {"dim_b", a.dim_b},
              {"dim_c", a.dim_c},
              {"iterations", res.history.size()}},
             res.value);
}

void register_moe(CLI::App& app) {
  auto* moe = app.add_subcommand("moe", "BB84 monogamy-of-entanglement game");
  moe->require_subcommand(1);
  auto args = std::make_shared<MoeArgs>();
  auto* value = moe->add_subcommand("value", "value of a fixed strategy");
  value->add_option("--strategy", args->strategy, "strategy")->check(CLI::IsMember({"midway"}));
  value->add_option("--n", args->n, "qubits (the strategy is repeated in parallel)")->check(CLI::Range(1, 4));
  value->add_option("--format", args->format)->check(CLI::IsMember({"text", "json"}));
  value->add_option("--out", args->out, "output file (default stdout)");
  value->callback([args] { moe_value_cmd(*args); });

  auto* opt = moe->add_subcommand("optimize", "seesaw optimisation from a random start");
  opt->add_option("--n", args->n, "qubits")->check(CLI::Range(1, 2));
  opt->add_option("--seed", args->seed, "seed for the starting point")->required();
  opt->add_option("--iterations", args->iterations, "maximum seesaw rounds");
  opt->add_option("--dim-b", args->dim_b, "dimension of B's register");
  opt->add_option("--dim-c", args->dim_c, "dimension of C's register");
  opt->add_option("--format", args->format)->check(CLI::IsMember({"text", "json"}));
  opt->add_option("--out", args->out, "output file (default stdout)");
  opt->callback([args] { moe_optimize_cmd(*args); });
}

// ---------------------------------------------------------------------------
// fakekey check

struct FakeKeyArgs {
  std::size_t lambda = 2;
  std::size_t ell = 2;
  std::size_t n = 2;
  std::string prf = "random";
  std::uint64_t params_seed = 0;
  std::string variant = "honest";
  std::string format = "text";
  std::string out;
};

void fakekey_check(const FakeKeyArgs& a) {
  ske::PrfPtr prf;
  if (a.prf == "random") {
    Rng rng(a.params_seed);
    prf = std::make_shared<const ske::Prf>(ske::Prf::random_table(a.lambda, a.ell, a.n, rng));
  } else {
    prf = std::make_shared<const ske::Prf>(ske::Prf::constant_table(a.lambda, a.ell, BitString::zeros(a.n)));
  }
  auto variant = a.variant == "honest" ? ske::FakeGenVariant::kHonest : ske::FakeGenVariant::kUniformOtp;
  double worst = 0.0;
  json per = json::object();
  for (std::uint64_t mv = 0; mv < (std::uint64_t{1} << a.n); ++mv) {
    BitString m = BitString::from_uint(mv, a.n);
    double tvd = ske::fakekey_tvd_bruteforce(prf, m, variant);
    per[m.to_string()] = tvd;
    worst = std::max(worst, tvd);
  }
  if (a.format == "json") {
    write_output(a.out, dump({{"lambda", a.lambda},
                              {"ell", a.ell},
                              {"n", a.n},
                              {"prf", a.prf},
                              {"variant", a.variant},
                              {"tvd", per},
                              {"max_tvd", worst}}));
  } else {
    write_output(a.out, g9(worst) + "\n");
  }
  if (variant == ske::FakeGenVariant::kHonest && worst != 0.0) {
    throw InvariantViolation("fake keys are distinguishable: TVD " + g9(worst));
  }
}

void register_fakekey(CLI::App& app) {
  auto* fk = app.add_subcommand("fakekey", "fake-key property of the classical scheme");
  fk->require_subcommand(1);
  auto args = std::make_shared<FakeKeyArgs>();
  auto* check = fk->add_subcommand("check", "exact total-variation distance, maximised over messages");
  check->add_option("--lambda", args->lambda, "PRF key bits")->required();
  check->add_option("--ell", args->ell, "PRF input bits")->required();
  check->add_option("--n", args->n, "message bits")->required();
  check->add_option("--prf", args->prf, "truth table kind")->check(CLI::IsMember({"random", "constant"}));
  check->add_option("--params-seed", args->params_seed, "seed for --prf random");
  check->add_option("--variant", args->variant, "FakeGen variant")->check(CLI::IsMember({"honest", "uniform-otp"}));
  check->add_option("--format", args->format)->check(CLI::IsMember({"text", "json"}));
  check->add_option("--out", args->out, "output file (default stdout)");
  check->callback([args] { fakekey_check(*args); });
}

// ---------------------------------------------------------------------------
// fe demo

struct FeDemoArgs {
  SchemeConfig config;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100;
  std::string container_out;
  std::string out;
};

void fe_demo(const FeDemoArgs& a) {
  SchemeConfig c = a.config;
  c.scheme = "public";
  auto params = c.public_params();
  auto lay = params.layout();
  Rng rng(a.seed);
  std::uint64_t failures = 0;
  std::size_t bytes = 0;
  for (std::uint64_t t = 0; t < a.trials; ++t) {
    auto keys = fe::fe_setup(params.backend, lay.desc_bits(), rng);
    BitString d = BitString::random(lay.desc_bits(), rng);
    BitString x = BitString::random(lay.data_bits(), rng);
    auto sk = fe::fe_keygen(std::move(keys.msk), d);
    auto ct = fe::fe_encrypt(keys.mpk, params.circuit, x, rng);
    auto wire = fe::serialize(ct);
    bytes = wire.size();
    if (t == 0 && !a.container_out.empty()) {
      write_output(a.container_out, std::string(wire.begin(), wire.end()));
    }
    if (fe::fe_decrypt(sk, fe::deserialize(wire)) != params.circuit->evaluate(d, x)) ++failures;
  }
  // Hybrid-2 key against the message and key branches, every one-time key.
  std::uint64_t checks = 0, mismatches = 0;
  auto enc = params.encoding();
  for (std::uint64_t ki = 0; ki < otue::key_space_size(*params.family); ++ki) {
    auto k_ue = otue::key_from_index(params.family, ki);
    auto k_ske = ske::ske_setup(params.prf, rng);
    auto trojan = lay.description(ske::ske_encrypt(k_ske, enc.encode(k_ue), rng));
    auto keys = fe::fe_setup(params.backend, lay.desc_bits(), rng);
    auto sk = fe::fe_keygen(std::move(keys.msk), trojan);
    auto a1 = fe::fe_decrypt(sk, fe::fe_encrypt(keys.mpk, params.circuit, lay.message_input(enc.encode(k_ue)), rng));
    auto a0 = fe::fe_decrypt(sk, fe::fe_encrypt(keys.mpk, params.circuit, lay.key_input(k_ske), rng));
    ++checks;
    if (a1 != a0 || enc.decode(a1) != k_ue) ++mismatches;
  }
  std::ostringstream os;
  os << "backend " << fe::to_string(params.backend) << "\n"
     << "desc_bits " << lay.desc_bits() << "\n"
     << "data_bits " << lay.data_bits() << "\n"
     << "gates " << params.circuit->gates().size() << "\n"
     << "container_bytes " << bytes << "\n"
     << "trials " << a.trials << "\n"
     << "failures " << failures << "\n"
     << "trojan_checks " << checks << "\n"
     << "trojan_mismatches " << mismatches << "\n";
  write_output(a.out, os.str());
  if (failures != 0) throw InvariantViolation("FE decryption disagreed with the circuit");
  if (mismatches != 0) throw InvariantViolation("embedded-string key decrypts the two branches differently");
}

void register_fe(CLI::App& app) {
  auto* fe_cmd = app.add_subcommand("fe", "single-key functional encryption");
  fe_cmd->require_subcommand(1);
  auto args = std::make_shared<FeDemoArgs>();
  args->config.lambda = 1;
  args->config.ell = 1;
  auto* demo = fe_cmd->add_subcommand("demo", "random end-to-end trials on the F circuit");
  add_family_options(demo, args->config);
  add_prf_options(demo, args->config, false);
  demo->add_option("--backend", args->config.fe, "FE backend")->check(CLI::IsMember({"reference", "garbled"}));
  demo->add_option("--seed", args->seed, "randomness seed")->required();
  demo->add_option("--trials", args->trials, "end-to-end trials");
  demo->add_option("--container-out", args->container_out, "write the first FE ciphertext container here");
  demo->add_option("--out", args->out, "output file (default stdout)");
  demo->callback([args] { fe_demo(*args); });
}

// ---------------------------------------------------------------------------
// report table

struct ReportArgs {
  std::size_t n_max = 4;
  std::string format = "csv";
  std::string out;
};

void report_table(const ReportArgs& a) {
  std::vector<harness::ExperimentReport> rows;
  for (std::size_t n = 1; n <= a.n_max; ++n) {
    auto fam = std::make_shared<const quantum::BasisFamily>(quantum::wiesner_family(n));
    rows.push_back(harness::cloning_success_exact(fam, harness::trivial_adversary(fam)));
    rows.push_back(harness::cloning_success_exact(fam, attacks::build_cloner_adversary(n)));
  }
  ExperimentArgs ea;
  ea.format = a.format;
  ea.out = a.out;
  emit_reports(ea, rows);
}

void register_report(CLI::App& app) {
  auto* report = app.add_subcommand("report", "tables of exact success probabilities");
  report->require_subcommand(1);
  auto args = std::make_shared<ReportArgs>();
  auto* table = report->add_subcommand("table", "trivial and cloner adversaries for n = 1..n-max");
  table->add_option("--n-max", args->n_max, "largest message length")->check(CLI::Range(1, 4));
  table->add_option("--format", args->format)->check(CLI::IsMember({"csv", "json"}));
  table->add_option("--out", args->out, "output file (default stdout)");
  table->callback([args] { report_table(*args); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncloneable encryption experiments"};
  app.require_subcommand(1);
  register_ue(app);
  register_attack(app);
  register_moe(app);
  register_fakekey(app);
  register_fe(app);
  register_report(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

#pragma once

// The cloning experiment against one-time conjugate encryption (exact and
// Monte Carlo), implied uncloneability levels, and monogamy-of-entanglement
// game values with a see-saw strategy search.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ue/conjugate.hpp"
#include "ue/exact_sum.hpp"
#include "ue/quantum.hpp"

namespace ue::harness {

using otue::FamilyPtr;
using quantum::BasisFamily;
using otue::OtueKey;
using quantum::DensityMatrix;
using quantum::KrausChannel;
using quantum::Matrix;
using quantum::Povm;

// Maximum number of (key, message, shared value) cells an exact evaluation
// will enumerate. Wiesner n = 6 needs 8^6 = 2^18 cells with no shared values.
inline constexpr std::uint64_t kExactBudget = std::uint64_t{1} << 20;

// Splitter A -> B (x) C plus per-key measurements for B and C. The optional
// shared classical value s is drawn uniformly from [0, shared_count) in phase
// 1 and handed to both B and C, as a classical register copied to both
// parties would be; non-uniform shared randomness is expressed by repetition.
struct CloningAdversary {
  std::string name;
  std::size_t dim_b = 1;
  std::size_t dim_c = 1;
  std::uint64_t shared_count = 1;
  std::function<KrausChannel(std::uint64_t shared)> split;
  std::function<Povm(const OtueKey& key, std::uint64_t shared)> bob;
  std::function<Povm(const OtueKey& key, std::uint64_t shared)> charlie;
};

enum class Mode { kExact, kMonteCarlo };

inline std::string to_string(Mode m) { return m == Mode::kExact ? "exact" : "mc"; }

struct ExperimentReport {
  double success_probability = 0.0;
  std::size_t n = 0;
  Mode mode = Mode::kExact;
  std::uint64_t trials = 0;  // enumerated cells (exact) or samples (mc)
  std::uint64_t seed = 0;
  std::optional<double> half_width;  // Wilson 95%, Monte Carlo only
  std::string scheme = "otue";
  std::string adversary;
};

inline double implied_t(double p, std::size_t n) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("implied_t needs 0 < p <= 1");
  return static_cast<double>(n) + std::log2(p);
}

inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j{{"success_probability", r.success_probability},
                   {"n", r.n},
                   {"mode", to_string(r.mode)},
                   {"trials", r.trials},
                   {"seed", r.seed},
                   {"scheme", r.scheme},
                   {"adversary", r.adversary}};
  if (r.half_width) j["half_width"] = *r.half_width;
  if (r.success_probability > 0.0) j["implied_t"] = implied_t(r.success_probability, r.n);
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    r.success_probability = j.at("success_probability").get<double>();
    r.n = j.at("n").get<std::size_t>();
    auto mode = j.at("mode").get<std::string>();
    if (mode != "exact" && mode != "mc") throw DecodeError("unknown mode " + mode);
    r.mode = mode == "exact" ? Mode::kExact : Mode::kMonteCarlo;
    r.trials = j.at("trials").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.scheme = j.value("scheme", "otue");
    r.adversary = j.value("adversary", "");
    if (j.contains("half_width")) r.half_width = j.at("half_width").get<double>();
    if (r.half_width.has_value() != (r.mode == Mode::kMonteCarlo)) {
      throw DecodeError("half_width must be present exactly for Monte Carlo reports");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed report: ") + e.what());
  }
}

inline constexpr const char* kCsvHeader = "n,scheme,adversary,mode,success,halfwidth,implied_t,seed";

namespace detail {

inline std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw DecodeError("unterminated quoted CSV field");
  return out;
}

}  // namespace detail

inline std::string to_csv_row(const ExperimentReport& r) {
  std::string row = std::to_string(r.n) + "," + detail::csv_field(r.scheme) + "," + detail::csv_field(r.adversary) +
                    "," + to_string(r.mode) + "," + format_g9(r.success_probability) + ",";
  if (r.half_width) row += format_g9(*r.half_width);
  row += ",";
  if (r.success_probability > 0.0) row += format_g9(implied_t(r.success_probability, r.n));
  row += "," + std::to_string(r.seed);
  return row;
}

// Header line plus one row per report, '\n' terminated.
inline std::string to_csv(const std::vector<ExperimentReport>& reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) out += to_csv_row(r) + "\n";
  return out;
}

inline std::vector<ExperimentReport> reports_from_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty() || lines.front() != kCsvHeader) throw DecodeError("CSV header differs from report columns");
  std::vector<ExperimentReport> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = detail::split_csv_line(lines[i]);
    if (f.size() != 8) throw DecodeError("CSV row " + std::to_string(i) + " needs 8 fields");
    try {
      ExperimentReport r;
      r.n = std::stoull(f[0]);
      r.scheme = f[1];
      r.adversary = f[2];
      if (f[3] != "exact" && f[3] != "mc") throw DecodeError("unknown mode " + f[3]);
      r.mode = f[3] == "exact" ? Mode::kExact : Mode::kMonteCarlo;
      r.success_probability = std::stod(f[4]);
      if (!f[5].empty()) r.half_width = std::stod(f[5]);
      r.seed = std::stoull(f[7]);
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw DecodeError("CSV row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

inline double wilson_half_width(std::uint64_t successes, std::uint64_t trials) {
  constexpr double z = 1.959963984540054;
  double nt = static_cast<double>(trials);
  double p = static_cast<double>(successes) / nt;
  double denom = 1.0 + z * z / nt;
  return z / denom * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt));
}

// Tr((B_x (x) C_x) rho_BC) for the given outcome on both sides.
inline double joint_success(const Matrix& rho_bc, const Povm& bob, const Povm& charlie, std::size_t outcome) {
  if (bob.dim() * charlie.dim() != static_cast<std::size_t>(rho_bc.rows())) {
    throw DimensionError("B (x) C dimension does not match split output");
  }
  return (quantum::kron(bob.element(outcome), charlie.element(outcome)) * rho_bc).trace().real();
}

// Joint outcome distribution p(x, y) = Tr((B_x (x) C_y) rho_BC), row-major.
inline std::vector<double> joint_distribution(const Matrix& rho_bc, const Povm& bob, const Povm& charlie) {
  std::size_t db = bob.dim(), dc = charlie.dim();
  std::vector<double> out;
  out.reserve(bob.num_outcomes() * charlie.num_outcomes());
  for (const auto& bx : bob.elements()) {
    Matrix bi = quantum::kron(bx, Matrix::Identity(static_cast<Eigen::Index>(dc), static_cast<Eigen::Index>(dc)));
    Matrix sigma = quantum::partial_trace(Matrix(bi * rho_bc), {db, dc}, {1});
    for (const auto& cy : charlie.elements()) out.push_back(std::max(0.0, (cy * sigma).trace().real()));
  }
  return out;
}

inline void check_adversary(const CloningAdversary& adv) {
  if (!adv.split || !adv.bob || !adv.charlie) throw InvariantViolation("adversary is missing a component");
  if (adv.shared_count == 0) throw InvariantViolation("shared randomness space must be non-empty");
}

// Tr((B_m (x) C_m) split(ct)) with dimension checks.
inline double evaluate_cell(const KrausChannel& split, const otue::QuantumCiphertext& ct, const Povm& b, const Povm& c,
                            std::size_t dim_b, std::size_t dim_c, std::size_t m) {
  if (split.in_dim() != ct.state.dim() || split.out_dim() != dim_b * dim_c) {
    throw DimensionError("adversary split has wrong dimensions");
  }
  std::size_t messages = std::size_t{1} << ct.n;
  if (b.num_outcomes() != messages || c.num_outcomes() != messages) {
    throw InvariantViolation("adversary POVM outcomes must be the message space");
  }
  Matrix out = quantum::apply_channel(split, ct.state.matrix());
  return joint_success(out, b, c, m);
}

// Samples the joint (B, C) outcome and reports whether both equal m.
inline bool sample_cell(const KrausChannel& split, const otue::QuantumCiphertext& ct, const Povm& b, const Povm& c,
                        std::size_t m, Rng& rng) {
  Matrix out = quantum::apply_channel(split, ct.state.matrix());
  auto dist = joint_distribution(out, b, c);
  double total = 0.0;
  for (double p : dist) total += p;
  double u = rng.uniform01() * total;
  std::size_t pick = dist.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  std::size_t messages = b.num_outcomes();
  return pick / messages == m && pick % messages == m;
}

// Success probability of one (key, message, shared value) cell.
inline double cell_success(const CloningAdversary& adv, const OtueKey& key, const BitString& m, std::uint64_t s) {
  return evaluate_cell(adv.split(s), otue::otue_encrypt(key, m), adv.bob(key, s), adv.charlie(key, s), adv.dim_b,
                       adv.dim_c, static_cast<std::size_t>(m.to_uint()));
}

// E_{key, m, s} Tr((B_key[m] (x) C_key[m]) split_s(Enc(key, m))) by full
// enumeration, summed with correct rounding.
inline ExperimentReport cloning_success_exact(const FamilyPtr& family, const CloningAdversary& adv) {
  check_adversary(adv);
  std::uint64_t keys = otue::key_space_size(*family);
  std::uint64_t messages = family->dim();
  long double cells = static_cast<long double>(keys) * messages * adv.shared_count;
  if (cells > static_cast<long double>(kExactBudget)) {
    throw BudgetExceeded("exact cloning experiment needs " + std::to_string(static_cast<double>(cells)) +
                         " cells (budget 2^20); use Monte Carlo mode");
  }
  ExactSum sum;
  for (std::uint64_t k = 0; k < keys; ++k) {
    OtueKey key = otue::key_from_index(family, k);
    for (std::uint64_t mv = 0; mv < messages; ++mv) {
      BitString m = BitString::from_uint(mv, family->n());
      for (std::uint64_t s = 0; s < adv.shared_count; ++s) sum += cell_success(adv, key, m, s);
    }
  }
  ExperimentReport r;
  r.success_probability = sum.value() / static_cast<double>(cells);
  r.n = family->n();
  r.mode = Mode::kExact;
  r.trials = static_cast<std::uint64_t>(cells);
  r.adversary = adv.name;
  return r;
}

// Per-trial generator derived from (seed, trial) so trials are independent
// of evaluation order.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

inline ExperimentReport cloning_success_mc(const FamilyPtr& family, const CloningAdversary& adv, std::uint64_t trials,
                                           std::uint64_t seed) {
  check_adversary(adv);
  if (trials == 0) throw std::invalid_argument("Monte Carlo needs at least one trial");
  std::uint64_t wins = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, t);
    OtueKey key = otue::otue_setup(family->n(), family, rng);
    BitString m = BitString::random(family->n(), rng);
    std::uint64_t s = adv.shared_count == 1 ? 0 : rng.below(adv.shared_count);
    if (sample_cell(adv.split(s), otue::otue_encrypt(key, m), adv.bob(key, s), adv.charlie(key, s),
                    static_cast<std::size_t>(m.to_uint()), rng)) {
      ++wins;
    }
  }
  ExperimentReport r;
  r.success_probability = static_cast<double>(wins) / static_cast<double>(trials);
  r.n = family->n();
  r.mode = Mode::kMonteCarlo;
  r.trials = trials;
  r.seed = seed;
  r.half_width = wilson_half_width(wins, trials);
  r.adversary = adv.name;
  return r;
}

// B receives the ciphertext and decrypts honestly; C outputs the all-zeros
// message. Wins with probability 2^-n.
inline CloningAdversary trivial_adversary(const FamilyPtr& family) {
  std::size_t d = family->dim();
  CloningAdversary adv;
  adv.name = "trivial";
  adv.dim_b = d;
  adv.dim_c = 1;
  adv.split = [d](std::uint64_t) {
    return KrausChannel::identity(d);  // A -> B (x) C with C one-dimensional
  };
  adv.bob = [](const OtueKey& key, std::uint64_t) { return otue::decrypt_povm(key); };
  adv.charlie = [d](const OtueKey&, std::uint64_t) { return Povm::constant(1, d, 0); };
  return adv;
}

// Discards the ciphertext; both parties output `guess`.
inline CloningAdversary constant_guess_adversary(const FamilyPtr& family, std::uint64_t guess) {
  std::size_t d = family->dim();
  CloningAdversary adv;
  adv.name = "constant";
  adv.dim_b = 1;
  adv.dim_c = 1;
  adv.split = [d](std::uint64_t) {
    // Trace out: Kraus operators <i| for each basis vector.
    std::vector<Matrix> ops;
    for (std::size_t i = 0; i < d; ++i) {
      Matrix k = Matrix::Zero(1, static_cast<Eigen::Index>(d));
      k(0, static_cast<Eigen::Index>(i)) = 1.0;
      ops.push_back(k);
    }
    return KrausChannel(d, 1, std::move(ops));
  };
  adv.bob = [d, guess](const OtueKey&, std::uint64_t) { return Povm::constant(1, d, guess); };
  adv.charlie = adv.bob;
  return adv;
}

// Equivalent adversary whose shared classical value lives in explicit
// classical registers R_B, R_C appended to B and C (B' = B (x) R, C' = C (x) R).
// Exponentially larger; used to check the block-diagonal shortcut.
inline CloningAdversary materialize_shared(const CloningAdversary& adv, std::size_t input_dim) {
  check_adversary(adv);
  auto S = static_cast<std::size_t>(adv.shared_count);
  std::size_t db = adv.dim_b, dc = adv.dim_c;
  std::size_t out_b = db * S, out_c = dc * S;
  std::vector<Matrix> ops;
  double w = 1.0 / std::sqrt(static_cast<double>(S));
  // Reorder B (x) C (x) R_B (x) R_C into B (x) R_B (x) C (x) R_C.
  Matrix perm = quantum::subsystem_permutation({db, dc, S, S}, {0, 2, 1, 3});
  for (std::size_t s = 0; s < S; ++s) {
    Matrix reg = Matrix::Zero(static_cast<Eigen::Index>(S * S), 1);
    reg(static_cast<Eigen::Index>(s * S + s), 0) = 1.0;
    KrausChannel ch = adv.split(s);
    for (const auto& k : ch.kraus_ops()) ops.push_back(perm * quantum::kron(Matrix(k * w), reg));
  }
  CloningAdversary out;
  out.name = adv.name + "+registers";
  out.dim_b = out_b;
  out.dim_c = out_c;
  out.split = [ops, input_dim, out_b, out_c](std::uint64_t) { return KrausChannel(input_dim, out_b * out_c, ops); };
  auto lift = [S](std::function<Povm(const OtueKey&, std::uint64_t)> f, std::size_t dim) {
    return [f, S, dim](const OtueKey& key, std::uint64_t) {
      std::vector<Matrix> elems;
      for (std::size_t s = 0; s < S; ++s) {
        Povm p = f(key, s);
        if (elems.empty()) {
          elems.assign(p.num_outcomes(), Matrix::Zero(static_cast<Eigen::Index>(dim * S), static_cast<Eigen::Index>(dim * S)));
        }
        Matrix proj = Matrix::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
        proj(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
        for (std::size_t x = 0; x < p.num_outcomes(); ++x) elems[x] += quantum::kron(p.element(x), proj);
      }
      return Povm(dim * S, std::move(elems));
    };
  };
  out.bob = lift(adv.bob, db);
  out.charlie = lift(adv.charlie, dc);
  return out;
}

// ---------------------------------------------------------------------------
// Monogamy-of-entanglement games over real-orthogonal basis families.

struct MoeGame {
  FamilyPtr family;
};

struct MoeStrategy {
  DensityMatrix rho_abc;  // A (x) B (x) C, A of dimension 2^n
  std::size_t dim_b = 1;
  std::size_t dim_c = 1;
  std::vector<Povm> bob;      // indexed by theta
  std::vector<Povm> charlie;  // indexed by theta
};

inline void check_strategy(const MoeGame& game, const MoeStrategy& s) {
  std::size_t da = game.family->dim();
  if (s.rho_abc.dim() != da * s.dim_b * s.dim_c) throw DimensionError("strategy state has wrong dimension");
  if (s.bob.size() != game.family->size() || s.charlie.size() != game.family->size()) {
    throw DimensionError("strategy needs one POVM per basis");
  }
  for (std::size_t t = 0; t < s.bob.size(); ++t) {
    if (s.bob[t].dim() != s.dim_b || s.charlie[t].dim() != s.dim_c) throw DimensionError("POVM dimension mismatch");
    if (s.bob[t].num_outcomes() != da || s.charlie[t].num_outcomes() != da) {
      throw DimensionError("POVM outcomes must range over the basis labels");
    }
  }
}

// Pi^theta = sum_x |psi_x^theta><psi_x^theta| (x) B_x^theta (x) C_x^theta
inline Matrix winning_operator(const BasisFamily& family, std::size_t theta, const Povm& bob, const Povm& charlie) {
  auto d = static_cast<Eigen::Index>(family.dim() * bob.dim() * charlie.dim());
  Matrix pi = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < family.dim(); ++x) {
    pi += quantum::kron(family.projector(theta, x), quantum::kron(bob.element(x), charlie.element(x)));
  }
  return pi;
}

inline double moe_value(const MoeGame& game, const MoeStrategy& s) {
  check_strategy(game, s);
  double total = 0.0;
  for (std::size_t t = 0; t < game.family->size(); ++t) {
    total += (winning_operator(*game.family, t, s.bob[t], s.charlie[t]) * s.rho_abc.matrix()).trace().real();
  }
  return total / static_cast<double>(game.family->size());
}

namespace detail {

inline double povm_score(const std::vector<Matrix>& elems, const std::vector<Matrix>& scores) {
  double v = 0.0;
  for (std::size_t x = 0; x < elems.size(); ++x) v += (elems[x] * scores[x]).trace().real();
  return v;
}

// Best POVM among the current one and two candidates for maximizing
// sum_x Tr(E_x S_x): pick-the-winner in the eigenbasis of the mean score
// operator, and fixed-point steps E_x <- L^-1 S_x E_x S_x L^-1 with
// L = (sum_x S_x E_x S_x)^{1/2}.
inline Povm improve_povm(const Povm& current, const std::vector<Matrix>& scores) {
  std::size_t dim = current.dim();
  auto d = static_cast<Eigen::Index>(dim);
  std::size_t outcomes = scores.size();
  std::vector<Matrix> best = current.elements();
  double best_score = povm_score(best, scores);

  auto consider = [&](std::vector<Matrix> cand) {
    Matrix sum = Matrix::Zero(d, d);
    for (auto& e : cand) {
      e = (e + e.adjoint()) / 2.0;
      sum += e;
    }
    if (quantum::max_abs(sum - Matrix::Identity(d, d)) > 1e-11) return;
    for (const auto& e : cand) {
      if (quantum::min_eigenvalue(e) < -1e-11) return;
    }
    double sc = povm_score(cand, scores);
    if (sc > best_score) {
      best_score = sc;
      best = std::move(cand);
    }
  };

  Matrix mean = Matrix::Zero(d, d);
  for (const auto& s : scores) mean += s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(mean / static_cast<double>(outcomes));
  std::vector<Matrix> winner(outcomes, Matrix::Zero(d, d));
  for (Eigen::Index j = 0; j < d; ++j) {
    quantum::Vector e = es.eigenvectors().col(j);
    std::size_t arg = 0;
    double top = -1.0;
    for (std::size_t x = 0; x < outcomes; ++x) {
      double v = (e.adjoint() * scores[x] * e)(0, 0).real();
      if (v > top) {
        top = v;
        arg = x;
      }
    }
    winner[arg] += e * e.adjoint();
  }
  consider(winner);

  std::vector<Matrix> iter = best;
  for (int step = 0; step < 20; ++step) {
    Matrix r = Matrix::Zero(d, d);
    for (std::size_t x = 0; x < outcomes; ++x) r += scores[x] * iter[x] * scores[x];
    Eigen::SelfAdjointEigenSolver<Matrix> rs((r + r.adjoint()) / 2.0);
    if (rs.eigenvalues().minCoeff() < 1e-14) break;
    Matrix inv_sqrt = rs.eigenvectors() * rs.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      rs.eigenvectors().adjoint();
    for (std::size_t x = 0; x < outcomes; ++x) iter[x] = inv_sqrt * scores[x] * iter[x] * scores[x] * inv_sqrt;
    consider(iter);
  }
  return Povm(dim, std::move(best));
}

}  // namespace detail

struct SeesawResult {
  MoeStrategy strategy;
  double value;
  std::vector<double> history;  // value after each iteration
};

// Block-coordinate ascent over (state, Bob's POVMs, Charlie's POVMs) from a
// random start. Each block update never decreases the game value.
inline SeesawResult moe_seesaw(const MoeGame& game, std::size_t dim_b, std::size_t dim_c, std::size_t iterations,
                               std::uint64_t seed) {
  if (dim_b == 0 || dim_c == 0) throw DimensionError("party dimensions must be positive");
  const BasisFamily& fam = *game.family;
  std::size_t da = fam.dim();
  std::size_t thetas = fam.size();
  Rng rng(seed);
  std::vector<Povm> bob, charlie;
  for (std::size_t t = 0; t < thetas; ++t) {
    bob.push_back(quantum::random_povm(dim_b, da, rng));
    charlie.push_back(quantum::random_povm(dim_c, da, rng));
  }
  std::size_t total = da * dim_b * dim_c;
  auto dt = static_cast<Eigen::Index>(total);

  auto state_update = [&]() {
    Matrix avg = Matrix::Zero(dt, dt);
    for (std::size_t t = 0; t < thetas; ++t) avg += winning_operator(fam, t, bob[t], charlie[t]);
    avg /= static_cast<double>(thetas);
    Eigen::SelfAdjointEigenSolver<Matrix> es((avg + avg.adjoint()) / 2.0);
    quantum::Vector top = es.eigenvectors().col(dt - 1);
    return DensityMatrix(top * top.adjoint());
  };

  MoeStrategy strat{state_update(), dim_b, dim_c, bob, charlie};
  SeesawResult result{strat, moe_value(game, strat), {}};
  double last = result.value;

  for (std::size_t it = 0; it < iterations; ++it) {
    // Bob: S_x = Tr_AC[(P_x (x) I (x) C_x) rho].
    for (std::size_t t = 0; t < thetas; ++t) {
      std::vector<Matrix> scores;
      for (std::size_t x = 0; x < da; ++x) {
        Matrix op = quantum::kron(fam.projector(t, x),
                                  quantum::kron(Matrix::Identity(static_cast<Eigen::Index>(dim_b), static_cast<Eigen::Index>(dim_b)),
                                                strat.charlie[t].element(x)));
        Matrix s = quantum::partial_trace(Matrix(op * strat.rho_abc.matrix()), {da, dim_b, dim_c}, {1});
        scores.push_back((s + s.adjoint()) / 2.0);
      }
      strat.bob[t] = detail::improve_povm(strat.bob[t], scores);
    }
    for (std::size_t t = 0; t < thetas; ++t) {
      std::vector<Matrix> scores;
      for (std::size_t x = 0; x < da; ++x) {
        Matrix op = quantum::kron(fam.projector(t, x),
                                  quantum::kron(strat.bob[t].element(x),
                                                Matrix::Identity(static_cast<Eigen::Index>(dim_c), static_cast<Eigen::Index>(dim_c))));
        Matrix s = quantum::partial_trace(Matrix(op * strat.rho_abc.matrix()), {da, dim_b, dim_c}, {2});
        scores.push_back((s + s.adjoint()) / 2.0);
      }
      strat.charlie[t] = detail::improve_povm(strat.charlie[t], scores);
    }
    bob = strat.bob;
    charlie = strat.charlie;
    MoeStrategy candidate{state_update(), dim_b, dim_c, bob, charlie};
    double cv = moe_value(game, candidate);
    double pv = moe_value(game, strat);
    if (cv >= pv) strat = std::move(candidate);
    double v = std::max(cv, pv);
    result.history.push_back(v);
    if (v >= result.value) {
      result.value = v;
      result.strategy = strat;
    }
    if (std::abs(v - last) < 1e-15 && it > 5) break;
    last = v;
  }
  result.value = moe_value(game, result.strategy);
  return result;
}

// Product of two strategies for families fam_a (n_a qubits) and fam_b, played
// on the product family whose theta index is (theta_a, theta_b) big-endian.
inline MoeStrategy tensor_strategy(const BasisFamily& fam_a, const MoeStrategy& a, const BasisFamily& fam_b,
                                   const MoeStrategy& b) {
  std::size_t da1 = fam_a.dim(), da2 = fam_b.dim();
  Matrix joint = quantum::kron(a.rho_abc.matrix(), b.rho_abc.matrix());
  // A1 B1 C1 A2 B2 C2 -> A1 A2 B1 B2 C1 C2
  Matrix perm = quantum::subsystem_permutation({da1, a.dim_b, a.dim_c, da2, b.dim_b, b.dim_c}, {0, 3, 1, 4, 2, 5});
  MoeStrategy out{DensityMatrix(perm * joint * perm.adjoint()), a.dim_b * b.dim_b, a.dim_c * b.dim_c, {}, {}};
  for (std::size_t t1 = 0; t1 < fam_a.size(); ++t1) {
    for (std::size_t t2 = 0; t2 < fam_b.size(); ++t2) {
      out.bob.push_back(quantum::tensor(a.bob[t1], b.bob[t2]));
      out.charlie.push_back(quantum::tensor(a.charlie[t1], b.charlie[t2]));
    }
  }
  return out;
}

}  // namespace ue::harness

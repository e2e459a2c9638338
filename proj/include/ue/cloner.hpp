#pragma once

// Concrete attacks: a symmetric 1 -> 2 cloner for real (xz-plane) qubit
// states, the product cloning adversary built from it, and the midway-state
// strategy for the single-qubit BB84 monogamy game.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "ue/cloning.hpp"

namespace ue::attacks {

using harness::CloningAdversary;
using harness::MoeStrategy;
using quantum::Complex;
using quantum::DensityMatrix;
using quantum::KrausChannel;
using quantum::Matrix;
using quantum::Povm;
using quantum::PureState;

// 1/2 + 1/(2 sqrt 2)
inline constexpr double kEquatorialFidelity = 0.5 + 0.25 * std::numbers::sqrt2;

struct ClonerSpec {
  KrausChannel kraus;  // qubit -> qubit (x) qubit
  double worst_case_fidelity;
};

inline Matrix xz_state(double gamma) {
  Matrix v(2, 1);
  v << std::cos(gamma), std::sin(gamma);
  return v;
}

// Fidelity of each one-qubit output marginal with the pure input.
inline std::pair<double, double> marginal_fidelities(const KrausChannel& cloner, const PureState& psi) {
  if (psi.dim() != 2 || cloner.in_dim() != 2 || cloner.out_dim() != 4) {
    throw DimensionError("marginal fidelities are defined for qubit -> two-qubit cloners");
  }
  Matrix out = quantum::apply_channel(cloner, Matrix(psi.amplitudes() * psi.amplitudes().adjoint()));
  Matrix first = quantum::partial_trace(out, {2, 2}, {0});
  Matrix second = quantum::partial_trace(out, {2, 2}, {1});
  return {quantum::fidelity_to_pure(psi, first), quantum::fidelity_to_pure(psi, second)};
}

inline std::pair<double, double> marginal_fidelities(const ClonerSpec& cl, const PureState& psi) {
  return marginal_fidelities(cl.kraus, psi);
}

// Minimum over both marginals of an evenly spaced sweep of cos g|0> + sin g|1>.
inline double xz_sweep_min_fidelity(const KrausChannel& cloner, std::size_t points) {
  double worst = 1.0;
  for (std::size_t i = 0; i < points; ++i) {
    double gamma = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
    auto [fb, fc] = marginal_fidelities(cloner, PureState(xz_state(gamma).col(0)));
    worst = std::min({worst, fb, fc});
  }
  return worst;
}

// Economical phase-covariant cloner V|0> = |00>, V|1> = (|01> + |10>)/sqrt 2,
// conjugated by T = exp(i pi/4 X) so that it acts on the xz great circle:
// V' = (T^dag (x) T^dag) V T.
inline ClonerSpec equatorial_cloner() {
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0 / std::numbers::sqrt2;
  v(2, 1) = 1.0 / std::numbers::sqrt2;
  Matrix t(2, 2);
  t << Complex(1, 0), Complex(0, 1), Complex(0, 1), Complex(1, 0);
  t /= std::numbers::sqrt2;
  Matrix tt = quantum::kron(Matrix(t.adjoint()), Matrix(t.adjoint()));
  KrausChannel ch = KrausChannel::isometry(tt * v * t);
  double worst = xz_sweep_min_fidelity(ch, 360);
  return ClonerSpec{std::move(ch), worst};
}

// B keeps the input, C gets |0>.
inline ClonerSpec identity_cloner() {
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = 1.0;  // |0> -> |00>
  v(2, 1) = 1.0;  // |1> -> |10>
  KrausChannel ch = KrausChannel::isometry(v);
  return ClonerSpec{ch, xz_sweep_min_fidelity(ch, 360)};
}

// n-fold product cloner followed by a reordering so B holds every first copy
// and C every second copy.
inline KrausChannel product_cloner(const KrausChannel& single, std::size_t n) {
  KrausChannel acc = single;
  for (std::size_t i = 1; i < n; ++i) acc = quantum::tensor(acc, single);
  // Outputs are (b1 c1)(b2 c2)...; reorder to b1..bn c1..cn.
  std::vector<std::size_t> dims(2 * n, 2);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back(2 * i);
  for (std::size_t i = 0; i < n; ++i) order.push_back(2 * i + 1);
  Matrix perm = quantum::subsystem_permutation(dims, order);
  std::vector<Matrix> ops;
  for (const auto& k : acc.kraus_ops()) ops.push_back(perm * k);
  return KrausChannel(acc.in_dim(), acc.out_dim(), std::move(ops));
}

// Clone every qubit, then both parties decrypt honestly with the revealed key.
inline CloningAdversary build_cloner_adversary(std::size_t n, const ClonerSpec& cloner = equatorial_cloner()) {
  if (n == 0) throw DimensionError("cloner adversary needs n >= 1");
  std::size_t d = std::size_t{1} << n;
  CloningAdversary adv;
  adv.name = "cloner";
  adv.dim_b = d;
  adv.dim_c = d;
  KrausChannel split = product_cloner(cloner.kraus, n);
  adv.split = [split](std::uint64_t) { return split; };
  adv.bob = [](const otue::OtueKey& key, std::uint64_t) { return otue::decrypt_povm(key); };
  adv.charlie = adv.bob;
  return adv;
}

// cos(pi/8)|0> + sin(pi/8)|1>, the +1 eigenvector of (X + Z)/sqrt 2, with B and
// C one-dimensional and always answering 0. Only defined for the one-qubit
// BB84 game.
inline MoeStrategy midway_moe_strategy(const harness::MoeGame& game) {
  if (game.family->n() != 1 || game.family->size() != 2) {
    throw DimensionError("midway strategy is defined for the single-qubit BB84 game only");
  }
  Matrix v = xz_state(std::numbers::pi / 8.0);
  MoeStrategy s{DensityMatrix(v * v.adjoint()), 1, 1, {}, {}};
  for (std::size_t t = 0; t < 2; ++t) {
    s.bob.push_back(Povm::constant(1, 2, 0));
    s.charlie.push_back(Povm::constant(1, 2, 0));
  }
  return s;
}

}  // namespace ue::attacks

#pragma once

// Dense finite-dimensional quantum states, channels and measurements.
//
// Conventions: qubit 0 is the most significant bit of a computational-basis
// index; fidelity against a pure target is the squared overlap <psi|rho|psi>.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ue/errors.hpp"
#include "ue/rng.hpp"

#if !defined(UE_CHECK_INVARIANTS)
#if defined(NDEBUG)
#define UE_CHECK_INVARIANTS 0
#else
#define UE_CHECK_INVARIANTS 1
#endif
#endif

namespace ue::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

namespace tol {
inline constexpr double kExact = 1e-12;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kPsd = 1e-10;
}  // namespace tol

inline constexpr bool kCheckInvariants = UE_CHECK_INVARIANTS != 0;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

class PureState {
 public:
  explicit PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw InvariantViolation("pure state must have positive dimension");
    if (std::abs(amps_.norm() - 1.0) > tol::kExact) {
      throw InvariantViolation("pure state is not unit norm (norm " + std::to_string(amps_.norm()) + ")");
    }
  }

  static PureState basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw DimensionError("basis index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
  }

  // Normalizes `v` before construction.
  static PureState normalized(const Vector& v) { return PureState(v / v.norm()); }

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }

 private:
  Vector amps_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity when invariant checks are
  // compiled in; call validate() to force the check.
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw DimensionError("density matrix must be square and non-empty");
    if constexpr (kCheckInvariants) validate();
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    auto d = static_cast<Eigen::Index>(dim);
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(dim));
  }

  static DensityMatrix basis(std::size_t dim, std::size_t index) { return from_pure(PureState::basis(dim, index)); }

  void validate() const {
    if (max_abs(m_ - m_.adjoint()) > tol::kExact) throw InvariantViolation("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > tol::kExact) {
      throw InvariantViolation("density matrix trace is " + std::to_string(m_.trace().real()));
    }
    if (min_eigenvalue(m_) < -tol::kPsd) throw InvariantViolation("density matrix is not positive semidefinite");
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex trace() const { return m_.trace(); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  Matrix m_;
};

class KrausChannel {
 public:
  KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> ops)
      : in_dim_(in_dim), out_dim_(out_dim), ops_(std::move(ops)) {
    if (ops_.empty()) throw InvariantViolation("channel needs at least one Kraus operator");
    for (const auto& k : ops_) {
      if (static_cast<std::size_t>(k.rows()) != out_dim_ || static_cast<std::size_t>(k.cols()) != in_dim_) {
        throw DimensionError("Kraus operator has wrong shape");
      }
    }
    if (completeness_defect() > tol::kCompleteness) throw InvariantViolation("Kraus operators are not complete");
  }

  static KrausChannel identity(std::size_t dim) {
    auto d = static_cast<Eigen::Index>(dim);
    return KrausChannel(dim, dim, {Matrix::Identity(d, d)});
  }

  // Single-operator channel; `v` must be unitary or an isometry.
  static KrausChannel isometry(const Matrix& v) {
    return KrausChannel(static_cast<std::size_t>(v.cols()), static_cast<std::size_t>(v.rows()), {v});
  }

  double completeness_defect() const {
    auto d = static_cast<Eigen::Index>(in_dim_);
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& k : ops_) sum += k.adjoint() * k;
    return max_abs(sum - Matrix::Identity(d, d));
  }

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<Matrix>& kraus_ops() const { return ops_; }

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<Matrix> ops_;
};

class Povm {
 public:
  Povm(std::size_t dim, std::vector<Matrix> elements) : dim_(dim), elements_(std::move(elements)) {
    if (elements_.empty()) throw InvariantViolation("POVM needs at least one outcome");
    for (const auto& e : elements_) {
      if (static_cast<std::size_t>(e.rows()) != dim_ || static_cast<std::size_t>(e.cols()) != dim_) {
        throw DimensionError("POVM element has wrong shape");
      }
    }
    if (completeness_defect() > tol::kCompleteness) throw InvariantViolation("POVM elements do not sum to identity");
    if constexpr (kCheckInvariants) validate_positivity();
  }

  // Projective measurement onto the columns of a unitary (or orthogonal) matrix.
  static Povm from_basis(const Matrix& basis) {
    std::vector<Matrix> elems;
    elems.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index c = 0; c < basis.cols(); ++c) elems.emplace_back(basis.col(c) * basis.col(c).adjoint());
    return Povm(static_cast<std::size_t>(basis.rows()), std::move(elems));
  }

  // Outputs `outcome` with certainty, ignoring the state.
  static Povm constant(std::size_t dim, std::size_t num_outcomes, std::size_t outcome) {
    if (outcome >= num_outcomes) throw DimensionError("constant outcome out of range");
    auto d = static_cast<Eigen::Index>(dim);
    std::vector<Matrix> elems(num_outcomes, Matrix::Zero(d, d));
    elems[outcome] = Matrix::Identity(d, d);
    return Povm(dim, std::move(elems));
  }

  void validate_positivity() const {
    for (const auto& e : elements_) {
      if (max_abs(e - e.adjoint()) > tol::kCompleteness) throw InvariantViolation("POVM element is not Hermitian");
      if (min_eigenvalue(e) < -tol::kPsd) throw InvariantViolation("POVM element is not positive semidefinite");
    }
  }

  double completeness_defect() const {
    auto d = static_cast<Eigen::Index>(dim_);
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : elements_) sum += e;
    return max_abs(sum - Matrix::Identity(d, d));
  }

  std::size_t dim() const { return dim_; }
  std::size_t num_outcomes() const { return elements_.size(); }
  const std::vector<Matrix>& elements() const { return elements_; }
  const Matrix& element(std::size_t outcome) const { return elements_.at(outcome); }

 private:
  std::size_t dim_;
  std::vector<Matrix> elements_;
};

// Real orthogonal bases indexed by theta in [0, size()). Column x of
// matrix(theta) is the basis vector |psi_x^theta>.
class BasisFamily {
 public:
  BasisFamily(std::size_t n, std::vector<RealMatrix> matrices, std::string id)
      : n_(n), matrices_(std::move(matrices)), id_(std::move(id)) {
    if (n_ == 0) throw DimensionError("basis family needs at least one qubit");
    if (matrices_.empty()) throw InvariantViolation("basis family needs at least one basis");
    auto d = static_cast<Eigen::Index>(std::size_t{1} << n_);
    for (const auto& o : matrices_) {
      if (o.rows() != d || o.cols() != d) throw DimensionError("basis matrix has wrong dimension");
      if ((o.transpose() * o - RealMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::kExact) {
        throw InvariantViolation("basis matrix is not orthogonal");
      }
    }
  }

  std::size_t n() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  std::size_t size() const { return matrices_.size(); }
  const RealMatrix& matrix(std::size_t theta) const { return matrices_.at(theta); }
  const std::string& id() const { return id_; }

  Vector vector(std::size_t theta, std::size_t x) const { return matrix(theta).col(static_cast<Eigen::Index>(x)).cast<Complex>(); }

  Matrix projector(std::size_t theta, std::size_t x) const {
    Vector v = vector(theta, x);
    return v * v.adjoint();
  }

 private:
  std::size_t n_;
  std::vector<RealMatrix> matrices_;
  std::string id_;
};

// Kronecker product of states. Dimensions multiply; trace is preserved.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

// Reduced state on the subsystems listed in `keep` (any order; the result
// keeps the original subsystem order).
inline Matrix partial_trace(const Matrix& rho, const std::vector<std::size_t>& dims, std::vector<std::size_t> keep) {
  std::size_t total = 1;
  for (auto d : dims) {
    if (d == 0) throw DimensionError("subsystem dimension must be positive");
    total *= d;
  }
  if (total != static_cast<std::size_t>(rho.rows()) || rho.rows() != rho.cols()) {
    throw DimensionError("product of subsystem dims " + std::to_string(total) + " does not match state dim " +
                         std::to_string(rho.rows()));
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto k : keep) {
    if (k >= dims.size()) throw DimensionError("kept subsystem index out of range");
  }
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) kept[k] = true;

  // Strides for splitting a full index into kept and traced parts.
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? kept_dim : traced_dim) *= dims[s];
  std::vector<std::size_t> kept_index(total);
  std::vector<std::size_t> traced_index(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::size_t ki = 0, kmul = 1, ti = 0, tmul = 1;
    for (std::size_t s = dims.size(); s-- > 0;) {
      std::size_t digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        ki += digit * kmul;
        kmul *= dims[s];
      } else {
        ti += digit * tmul;
        tmul *= dims[s];
      }
    }
    kept_index[idx] = ki;
    traced_index[idx] = ti;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (traced_index[i] == traced_index[j]) {
        out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& dims,
                                   std::vector<std::size_t> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), dims, std::move(keep)));
}

inline Matrix apply_channel(const KrausChannel& ch, const Matrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != ch.in_dim()) {
    throw DimensionError("channel input dim " + std::to_string(ch.in_dim()) + " does not match state dim " +
                         std::to_string(rho.rows()));
  }
  auto d = static_cast<Eigen::Index>(ch.out_dim());
  Matrix out = Matrix::Zero(d, d);
  for (const auto& k : ch.kraus_ops()) out.noalias() += k * rho * k.adjoint();
  return out;
}

inline DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  return DensityMatrix(apply_channel(ch, rho.matrix()));
}

// Tr(F_x rho) per outcome, clipped to [0, 1].
inline std::vector<double> povm_probabilities(const Povm& p, const DensityMatrix& rho) {
  if (p.dim() != rho.dim()) throw DimensionError("POVM and state dimensions differ");
  std::vector<double> probs;
  probs.reserve(p.num_outcomes());
  for (const auto& e : p.elements()) {
    double v = (e * rho.matrix()).trace().real();
    probs.push_back(std::clamp(v, 0.0, 1.0));
  }
  return probs;
}

// Inverse-CDF draw from povm_probabilities; consumes one uniform variate.
inline std::size_t sample_povm(const Povm& p, const DensityMatrix& rho, Rng& rng) {
  auto probs = povm_probabilities(p, rho);
  double total = 0.0;
  for (double q : probs) total += q;
  double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (probs[x] <= 0.0) continue;
    last_nonzero = x;
    acc += probs[x];
    if (u < acc) return x;
  }
  return last_nonzero;
}

inline double fidelity_to_pure(const PureState& target, const Matrix& rho) {
  if (target.dim() != static_cast<std::size_t>(rho.rows())) throw DimensionError("fidelity dimension mismatch");
  const Vector& v = target.amplitudes();
  return (v.adjoint() * rho * v)(0, 0).real();
}

inline double fidelity_to_pure(const PureState& target, const DensityMatrix& rho) {
  return fidelity_to_pure(target, rho.matrix());
}

// || sum_x |xx> - sum_x |psi_x psi_x> ||_2 for the columns |psi_x> of `basis`.
// Zero for every real orthogonal matrix.
inline double epr_invariance_defect(const Matrix& basis) {
  if (basis.rows() != basis.cols()) throw DimensionError("basis matrix must be square");
  auto d = basis.rows();
  if (max_abs(basis.adjoint() * basis - Matrix::Identity(d, d)) > tol::kCompleteness) {
    throw InvariantViolation("basis matrix is not orthogonal/unitary");
  }
  Vector diff = Vector::Zero(d * d);
  for (Eigen::Index x = 0; x < d; ++x) {
    diff(x * d + x) += 1.0;
    Vector col = basis.col(x);
    diff -= kron(col, col);
  }
  return diff.norm();
}

inline double epr_invariance_defect(const RealMatrix& basis) { return epr_invariance_defect(Matrix(basis.cast<Complex>())); }

inline RealMatrix hadamard() {
  RealMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::numbers::sqrt2;
}

inline RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Theta ranges over {0,1}^n read big-endian; bit i selects computational (0)
// or Hadamard (1) basis on qubit i.
inline BasisFamily wiesner_family(std::size_t n) {
  if (n == 0) throw DimensionError("Wiesner family needs n >= 1");
  if (n > 16) throw DimensionError("Wiesner family limited to 16 qubits");
  std::vector<RealMatrix> mats;
  std::size_t count = std::size_t{1} << n;
  mats.reserve(count);
  RealMatrix id = RealMatrix::Identity(2, 2);
  RealMatrix h = hadamard();
  for (std::size_t theta = 0; theta < count; ++theta) {
    RealMatrix m = RealMatrix::Identity(1, 1);
    for (std::size_t q = 0; q < n; ++q) {
      bool had = (theta >> (n - 1 - q)) & 1U;
      m = kron(m, had ? h : id);
    }
    mats.push_back(std::move(m));
  }
  return BasisFamily(n, std::move(mats), "wiesner");
}

// Haar-random orthogonal matrix: QR of a Gaussian matrix with the signs of
// R's diagonal folded into Q.
inline RealMatrix random_orthogonal(std::size_t dim, Rng& rng) {
  auto d = static_cast<Eigen::Index>(dim);
  RealMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

inline Matrix random_unitary(std::size_t dim, Rng& rng) {
  auto d = static_cast<Eigen::Index>(dim);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    Complex diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

inline BasisFamily random_orthogonal_family(std::size_t n, std::size_t num_bases, Rng& rng) {
  std::vector<RealMatrix> mats;
  mats.reserve(num_bases);
  for (std::size_t i = 0; i < num_bases; ++i) mats.push_back(random_orthogonal(std::size_t{1} << n, rng));
  return BasisFamily(n, std::move(mats), "haar-orthogonal");
}

inline PureState random_pure_state(std::size_t dim, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.gaussian(), rng.gaussian());
  return PureState::normalized(v);
}

// Ginibre-distributed mixed state of the given rank.
inline DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng) {
  auto d = static_cast<Eigen::Index>(dim);
  Matrix g(d, static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(std::move(rho));
}

// Random POVM: Gaussian positive operators normalized by S^{-1/2} . S^{-1/2}.
inline Povm random_povm(std::size_t dim, std::size_t num_outcomes, Rng& rng) {
  auto d = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> raw;
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < num_outcomes; ++x) {
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
    Matrix p = g * g.adjoint();
    sum += p;
    raw.push_back(std::move(p));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
  Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    es.eigenvectors().adjoint();
  for (auto& p : raw) {
    p = inv_sqrt * p * inv_sqrt;
    p = (p + p.adjoint()) / 2.0;
  }
  // Absorb roundoff so the elements sum to the identity.
  Matrix total = Matrix::Zero(d, d);
  for (const auto& p : raw) total += p;
  raw.back() += Matrix::Identity(d, d) - total;
  return Povm(dim, std::move(raw));
}

// Tensor product of POVMs; the outcome of the product is the big-endian
// concatenation of the factor outcomes.
inline Povm tensor(const Povm& a, const Povm& b) {
  std::vector<Matrix> elems;
  elems.reserve(a.num_outcomes() * b.num_outcomes());
  for (const auto& ea : a.elements()) {
    for (const auto& eb : b.elements()) elems.push_back(kron(ea, eb));
  }
  return Povm(a.dim() * b.dim(), std::move(elems));
}

inline KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ops;
  for (const auto& ka : a.kraus_ops()) {
    for (const auto& kb : b.kraus_ops()) ops.push_back(kron(ka, kb));
  }
  return KrausChannel(a.in_dim() * b.in_dim(), a.out_dim() * b.out_dim(), std::move(ops));
}

// Permutation unitary reordering subsystems: output subsystem i is input
// subsystem order[i].
inline Matrix subsystem_permutation(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order) {
  if (order.size() != dims.size()) throw DimensionError("permutation size mismatch");
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::size_t> out_dims(dims.size());
  for (std::size_t i = 0; i < order.size(); ++i) out_dims[i] = dims.at(order[i]);
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t s = dims.size(); s-- > 0;) {
      digits[s] = rem % dims[s];
      rem /= dims[s];
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < order.size(); ++i) out = out * out_dims[i] + digits[order[i]];
    p(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return p;
}

// Row-major text dump: first line "rows cols", then one line per row of
// "re,im" pairs separated by spaces, 17 significant digits.
inline std::string dump_matrix(const Matrix& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
  return os.str();
}

inline Matrix parse_matrix(const std::string& text) {
  std::istringstream is(text);
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw DecodeError("matrix dump: bad header");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(is >> tok)) throw DecodeError("matrix dump: truncated");
      auto comma = tok.find(',');
      if (comma == std::string::npos) throw DecodeError("matrix dump: expected re,im");
      m(i, j) = Complex(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
  }
  return m;
}

}  // namespace ue::quantum

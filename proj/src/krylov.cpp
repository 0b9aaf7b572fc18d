#include "kspread/krylov.hpp"

#include "kspread/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kspread {

namespace {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
void commutator_into(const Matrix<Scalar>& h, const Scalar* op, Eigen::Index d, Scalar* out) {
  Eigen::Map<const Matrix<Scalar>> o(op, d, d);
  Eigen::Map<Matrix<Scalar>> res(out, d, d);
  res.noalias() = h * o;
  res.noalias() -= o * h;
}

template <class Scalar>
LanczosResult run_lanczos(const Matrix<Scalar>& h, const Vector<Scalar>& seed, Eigen::Index d,
                          const LanczosOptions& opts) {
  const double norm0 = seed.norm();
  if (!(norm0 > 0.0)) throw InvalidArgument("Lanczos needs a nonzero initial operator");

  const Eigen::Index bound = krylov_bound(d);
  Eigen::Index cap = bound;
  bool capped_by_user = false;
  if (opts.max_iter > 0 && static_cast<Eigen::Index>(opts.max_iter) + 1 < bound) {
    cap = static_cast<Eigen::Index>(opts.max_iter) + 1;
    capped_by_user = true;
  }

  // Energy scale that keeps the closure test meaningful when b_1 itself is
  // rounding noise (O commuting with H).
  const double h_scale = h.norm() / std::sqrt(static_cast<double>(d));

  const Eigen::Index n2 = d * d;
  Matrix<Scalar> q(n2, cap);
  q.col(0) = seed / norm0;

  LanczosResult out;
  out.hilbert_dim = d;
  out.b.reserve(static_cast<std::size_t>(cap - 1));
  Vector<Scalar> u(n2);
  Vector<Scalar> overlaps;
  double b_max = h_scale;

  Eigen::Index n = 1;
  for (;; ++n) {
    if (n == cap) {
      out.termination = capped_by_user ? Termination::max_iter : Termination::natural;
      break;
    }
    commutator_into<Scalar>(h, q.col(n - 1).data(), d, u.data());
    for (int pass = 0; pass < 2; ++pass) {
      overlaps.noalias() = q.leftCols(n).adjoint() * u;
      u.noalias() -= q.leftCols(n) * overlaps;
    }
    const double bn = u.norm();
    b_max = std::max(b_max, bn);
    if (bn <= opts.tol * b_max) {
      out.termination = Termination::tolerance;
      break;
    }
    out.b.push_back(bn);
    q.col(n) = u / bn;
  }
  out.K = n;
  if (opts.store_basis) {
    if constexpr (std::is_same_v<Scalar, double>)
      out.basis = KrylovBasis(RealMatrix(q.leftCols(n)));
    else
      out.basis = KrylovBasis(ComplexMatrix(q.leftCols(n)));
  }
  return out;
}

} // namespace

OperatorVector::OperatorVector(RealVector v, Eigen::Index dim) : data_(std::move(v)), dim_(dim) {
  if (std::get<RealVector>(data_).size() != dim * dim)
    throw DimensionMismatch("operator vector length does not match dim^2");
}

OperatorVector::OperatorVector(ComplexVector v, Eigen::Index dim) : data_(std::move(v)), dim_(dim) {
  if (std::get<ComplexVector>(data_).size() != dim * dim)
    throw DimensionMismatch("operator vector length does not match dim^2");
}

OperatorVector OperatorVector::flatten(const DenseOperator& op) {
  const Eigen::Index d = op.dim();
  if (op.is_real()) return OperatorVector(RealVector(op.real().reshaped()), d);
  return OperatorVector(ComplexVector(op.complex().reshaped()), d);
}

DenseOperator OperatorVector::unflatten() const {
  return visit([&](const auto& v) {
    using V = std::decay_t<decltype(v)>;
    using M = Eigen::Matrix<typename V::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return DenseOperator(M(v.reshaped(dim_, dim_)));
  });
}

const RealVector& OperatorVector::real() const {
  if (!is_real()) throw InvalidArgument("operator vector is complex");
  return std::get<RealVector>(data_);
}

ComplexVector OperatorVector::to_complex() const {
  if (is_real()) return std::get<RealVector>(data_).cast<Complex>();
  return std::get<ComplexVector>(data_);
}

Complex inner_product(const OperatorVector& a, const OperatorVector& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("inner product of operators with dims " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
  if (a.is_real() && b.is_real()) return {a.real().dot(b.real()), 0.0};
  // Eigen's dot conjugates its first argument.
  return a.to_complex().dot(b.to_complex());
}

OperatorVector liouvillian_apply(const SectorOperator& h, const OperatorVector& o) {
  const Eigen::Index d = h.dim();
  if (o.dim() != d)
    throw DimensionMismatch("Liouvillian of dim " + std::to_string(d) + " applied to operator of dim " +
                            std::to_string(o.dim()));
  if (h.is_real() && o.is_real()) {
    RealVector out(d * d);
    commutator_into<double>(h.matrix().real(), o.real().data(), d, out.data());
    return OperatorVector(std::move(out), d);
  }
  const ComplexMatrix hc = h.matrix().to_complex();
  const ComplexVector oc = o.to_complex();
  ComplexVector out(d * d);
  commutator_into<Complex>(hc, oc.data(), d, out.data());
  return OperatorVector(std::move(out), d);
}

std::string_view to_string(Termination t) {
  switch (t) {
  case Termination::natural: return "natural";
  case Termination::tolerance: return "tolerance";
  case Termination::max_iter: return "max_iter";
  }
  return "?";
}

OperatorVector LanczosResult::basis_vector(Eigen::Index n) const {
  if (!basis) throw InvalidArgument("Lanczos result has no stored basis");
  if (n < 0 || n >= K) throw InvalidArgument("Krylov index out of range");
  return std::visit(
      [&](const auto& q) {
        using M = std::decay_t<decltype(q)>;
        using V = Eigen::Matrix<typename M::Scalar, Eigen::Dynamic, 1>;
        return OperatorVector(V(q.col(n)), hilbert_dim);
      },
      *basis);
}

LanczosResult lanczos(const SectorOperator& h, const OperatorVector& o, const LanczosOptions& opts) {
  const Eigen::Index d = h.dim();
  if (o.dim() != d)
    throw DimensionMismatch("initial operator dim " + std::to_string(o.dim()) + " does not match H dim " +
                            std::to_string(d));
  if (!h.matrix().is_hermitian(1e-12)) throw NotHermitian("Lanczos needs a Hermitian Hamiltonian");
  if (!(opts.tol >= 0.0)) throw InvalidArgument("Lanczos tolerance must be nonnegative");
  if (h.is_real() && o.is_real()) return run_lanczos<double>(h.matrix().real(), o.real(), d, opts);
  return run_lanczos<Complex>(h.matrix().to_complex(), o.to_complex(), d, opts);
}

Tridiagonal reconstruct_tridiagonal(const LanczosResult& result, const SectorOperator& h) {
  if (!result.basis) throw InvalidArgument("tridiagonal reconstruction needs a stored Krylov basis");
  const Eigen::Index K = result.K;
  const Eigen::Index d = result.hilbert_dim;
  if (h.dim() != d) throw DimensionMismatch("Hamiltonian does not match the Lanczos run");

  Tridiagonal out;
  out.T = RealMatrix::Zero(K, K);
  for (Eigen::Index n = 0; n + 1 < K; ++n) {
    out.T(n, n + 1) = result.b[static_cast<std::size_t>(n)];
    out.T(n + 1, n) = result.b[static_cast<std::size_t>(n)];
  }
  out.residual = std::visit(
      [&](const auto& q) -> double {
        using M = std::decay_t<decltype(q)>;
        using Scalar = typename M::Scalar;
        const Matrix<Scalar> hm = [&] {
          if constexpr (std::is_same_v<Scalar, double>) return h.matrix().real();
          else return h.matrix().to_complex();
        }();
        M lq(q.rows(), K);
        for (Eigen::Index n = 0; n < K; ++n) commutator_into<Scalar>(hm, q.col(n).data(), d, lq.col(n).data());
        const M proj = q.adjoint() * lq;
        return (proj - out.T.cast<Scalar>()).cwiseAbs().maxCoeff();
      },
      *result.basis);
  return out;
}

double orthonormality_error(const LanczosResult& result) {
  if (!result.basis) throw InvalidArgument("orthonormality check needs a stored Krylov basis");
  return std::visit(
      [](const auto& q) -> double {
        using M = std::decay_t<decltype(q)>;
        const M gram = q.adjoint() * q;
        return (gram - M::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
      },
      *result.basis);
}

std::vector<double> log_ratios(std::span<const double> b) {
  std::vector<double> out;
  if (b.size() < 2) return out;
  out.reserve(b.size() - 1);
  for (std::size_t n = 0; n + 1 < b.size(); ++n) {
    if (!(b[n] > 0.0) || !(b[n + 1] > 0.0)) throw InvalidArgument("Lanczos coefficients must be positive");
    out.push_back(std::log(b[n] / b[n + 1]));
  }
  return out;
}

double log_ratio_mean(std::span<const double> b) {
  if (b.size() < 2) throw InvalidArgument("log-ratio statistics need at least two coefficients");
  const auto r = log_ratios(b);
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double sigma_log(std::span<const double> b) {
  const double mean = log_ratio_mean(b);
  const auto r = log_ratios(b);
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(r.size()));
}

} // namespace kspread

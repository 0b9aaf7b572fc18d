#pragma once

#include "kspread/dense_operator.hpp"
#include "kspread/spin_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace kspread {

// A dim x dim operator flattened column-major into a vector of dim^2 entries.
// The inner product is (A|B) = Tr(A^dagger B).
class OperatorVector {
public:
  OperatorVector(RealVector v, Eigen::Index dim);
  OperatorVector(ComplexVector v, Eigen::Index dim);
  static OperatorVector flatten(const DenseOperator& op);
  static OperatorVector flatten(const SectorOperator& op) { return flatten(op.matrix()); }

  DenseOperator unflatten() const;
  Eigen::Index dim() const { return dim_; }
  Eigen::Index size() const { return dim_ * dim_; }
  bool is_real() const { return std::holds_alternative<RealVector>(data_); }
  const RealVector& real() const;
  ComplexVector to_complex() const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

private:
  std::variant<RealVector, ComplexVector> data_;
  Eigen::Index dim_;
};

Complex inner_product(const OperatorVector& a, const OperatorVector& b);

// [H, O]
OperatorVector liouvillian_apply(const SectorOperator& h, const OperatorVector& o);

enum class Termination {
  natural,   // reached the D^2 - D + 1 Krylov bound
  tolerance, // b_n fell below tol * max(b_1..b_n)
  max_iter,  // user step cap
};

std::string_view to_string(Termination t);

struct LanczosOptions {
  // Relative closure threshold on b_n.
  double tol = 1e-8;
  // Maximum number of coefficients; 0 means only the Krylov bound applies.
  std::size_t max_iter = 0;
  bool store_basis = false;
};

// Columns are the orthonormal Krylov vectors |O_0), |O_1), ...
using KrylovBasis = std::variant<RealMatrix, ComplexMatrix>;

struct LanczosResult {
  std::vector<double> b; // b_1 .. b_{K-1}
  Eigen::Index K = 1;
  Eigen::Index hilbert_dim = 0;
  Termination termination = Termination::natural;
  std::optional<KrylovBasis> basis;

  OperatorVector basis_vector(Eigen::Index n) const;
};

inline Eigen::Index krylov_bound(Eigen::Index hilbert_dim) {
  return hilbert_dim * hilbert_dim - hilbert_dim + 1;
}

// Lanczos recursion on the Liouvillian with two classical Gram-Schmidt passes
// against every previous Krylov vector at each step. Real arithmetic is used
// when both H and O are real; otherwise the complex path runs.
LanczosResult lanczos(const SectorOperator& h, const OperatorVector& o, const LanczosOptions& opts = {});

struct Tridiagonal {
  RealMatrix T;
  // max_{m,n} |(O_m|L|O_n) - T[m,n]|
  double residual;
};

// Requires a result produced with store_basis.
Tridiagonal reconstruct_tridiagonal(const LanczosResult& result, const SectorOperator& h);

// Largest |(O_m|O_n) - delta_mn| over the stored basis.
double orthonormality_error(const LanczosResult& result);

// log(b_n / b_{n+1}) for consecutive coefficients.
std::vector<double> log_ratios(std::span<const double> b);
// Population standard deviation of log_ratios(b).
double sigma_log(std::span<const double> b);
double log_ratio_mean(std::span<const double> b);

} // namespace kspread

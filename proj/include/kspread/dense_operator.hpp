#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>

namespace kspread {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Dense square matrix that stays real unless it has to be complex
// (S^y-type operators). Most of the pipeline runs on the real branch.
class DenseOperator {
public:
  DenseOperator() = default;
  explicit DenseOperator(RealMatrix m);
  explicit DenseOperator(ComplexMatrix m);

  bool is_real() const { return std::holds_alternative<RealMatrix>(data_); }
  Eigen::Index dim() const;

  // Throws InvalidArgument on the complex branch.
  const RealMatrix& real() const;
  const ComplexMatrix& complex() const;
  ComplexMatrix to_complex() const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

  double max_abs() const;
  // max |A - A^dagger| <= rel_tol * max(1, max |A|)
  bool is_hermitian(double rel_tol = 1e-12) const;
  // Drops the imaginary part when it is exactly zero.
  DenseOperator simplified() const;

private:
  std::variant<RealMatrix, ComplexMatrix> data_;
};

} // namespace kspread

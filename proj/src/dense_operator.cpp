#include "kspread/dense_operator.hpp"

#include "kspread/error.hpp"

#include <algorithm>

namespace kspread {

DenseOperator::DenseOperator(RealMatrix m) : data_(std::move(m)) {
  if (std::get<RealMatrix>(data_).rows() != std::get<RealMatrix>(data_).cols())
    throw DimensionMismatch("operator matrix must be square");
}

DenseOperator::DenseOperator(ComplexMatrix m) : data_(std::move(m)) {
  if (std::get<ComplexMatrix>(data_).rows() != std::get<ComplexMatrix>(data_).cols())
    throw DimensionMismatch("operator matrix must be square");
}

Eigen::Index DenseOperator::dim() const {
  return visit([](const auto& m) { return m.rows(); });
}

const RealMatrix& DenseOperator::real() const {
  if (!is_real()) throw InvalidArgument("operator is complex");
  return std::get<RealMatrix>(data_);
}

const ComplexMatrix& DenseOperator::complex() const {
  if (is_real()) throw InvalidArgument("operator is real");
  return std::get<ComplexMatrix>(data_);
}

ComplexMatrix DenseOperator::to_complex() const {
  if (is_real()) return std::get<RealMatrix>(data_).cast<Complex>();
  return std::get<ComplexMatrix>(data_);
}

double DenseOperator::max_abs() const {
  return visit([](const auto& m) -> double {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
  });
}

bool DenseOperator::is_hermitian(double rel_tol) const {
  return visit([&](const auto& m) {
    if (m.size() == 0) return true;
    const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    return asym <= rel_tol * scale;
  });
}

DenseOperator DenseOperator::simplified() const {
  if (is_real()) return *this;
  const auto& m = std::get<ComplexMatrix>(data_);
  if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() == 0.0) return DenseOperator(RealMatrix(m.real()));
  return *this;
}

} // namespace kspread

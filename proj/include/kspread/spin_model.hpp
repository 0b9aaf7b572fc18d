#pragma once

#include "kspread/dense_operator.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kspread {

// Open Ising chain H = sum_k (hx X_k + hz Z_k) - J sum_{k<L} Z_k Z_{k+1}.
struct SpinChainParams {
  int L = 6;
  double J = 1.0;
  double hx = 1.0;
  double hz = 0.2;

  void validate() const;
};

enum class Sector { even, odd };
enum class Axis { x, y, z };

std::string_view to_string(Sector s);
std::string_view to_string(Axis a);
Sector parse_sector(std::string_view s);

// Computational states use one bit per site. Site k (1-based) is bit L-k,
// so site 1 is the most significant bit and matches kron(site1, site2, ...).
// Bit 0 is spin up (Z = +1).
std::uint64_t reflect(std::uint64_t state, int L);

// Symmetric or antisymmetric combination of a state and its mirror image.
// For self-mirrored states (even sector only) mirror == state and the vector
// is the bare state.
struct ParityBasisVector {
  std::uint64_t state;
  std::uint64_t mirror;
  double weight;        // coefficient on `state`
  double mirror_weight; // coefficient on `mirror`; zero when self-mirrored
};

class ParitySectorBasis {
public:
  ParitySectorBasis(int L, Sector sector, std::vector<ParityBasisVector> vectors);

  int L() const { return L_; }
  Sector sector() const { return sector_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(vectors_.size()); }
  std::uint64_t full_dim() const { return std::uint64_t{1} << L_; }
  const std::vector<ParityBasisVector>& vectors() const { return vectors_; }

  // Overlap <state|v_index>; index is -1 when the state has no weight here.
  struct Component {
    Eigen::Index index;
    double coeff;
  };
  Component component(std::uint64_t state) const;

  // Columns are the basis vectors in the full 2^L space.
  RealMatrix to_matrix() const;

private:
  int L_;
  Sector sector_;
  std::vector<ParityBasisVector> vectors_;
  std::vector<std::int32_t> index_of_;
};

// Hermitian matrix in a parity sector basis, tagged with where it came from.
class SectorOperator {
public:
  SectorOperator(DenseOperator matrix, std::string label);

  const DenseOperator& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  Eigen::Index dim() const { return matrix_.dim(); }
  bool is_real() const { return matrix_.is_real(); }

private:
  DenseOperator matrix_;
  std::string label_;
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{256} << 20;

DenseOperator build_hamiltonian(const SpinChainParams& params,
                                std::size_t memory_budget = kDefaultMemoryBudget);

ParitySectorBasis build_parity_basis(int L, Sector sector);

// Analytic sector dimension (2^L +/- 2^ceil(L/2)) / 2.
Eigen::Index parity_sector_dim(int L, Sector sector);

// Largest |(P O P - O)_{ij}| where P is the reflection k -> L+1-k.
double reflection_commutator(const DenseOperator& op, int L);

inline constexpr double kReflectionTolerance = 1e-10;

// B^dagger op B; throws SymmetryViolation when op does not commute with P.
SectorOperator project(const DenseOperator& op, const ParitySectorBasis& basis,
                       std::string label = {});

// Same matrix as project(build_hamiltonian(params), basis), assembled
// directly from the bit representation so it works for chains whose full
// 2^L matrix does not fit in memory.
SectorOperator sector_hamiltonian(const SpinChainParams& params,
                                  const ParitySectorBasis& basis);

// S^a_T = sum_k sigma^a_k / 2
DenseOperator build_total_spin(Axis axis, int L,
                               std::size_t memory_budget = kDefaultMemoryBudget);

struct SiteTerm {
  int site; // 1-based
  Axis axis;
  double weight = 1.0;
};

// sum_i weight_i * sigma^{axis_i}_{site_i} / 2
DenseOperator build_site_combination(std::span<const SiteTerm> terms, int L,
                                     std::size_t memory_budget = kDefaultMemoryBudget);

// Symmetrized i.i.d. N(0,1) matrix with its trace removed.
SectorOperator random_gaussian_traceless(Eigen::Index dim, std::uint64_t seed);

} // namespace kspread

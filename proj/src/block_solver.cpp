#include <cmath>
#include <string>
#include <vector>

#include "vmsgf/error.hpp"
#include "vmsgf/sgfem.hpp"

namespace vmsgf {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

// Block LU of a block-tridiagonal matrix without pivoting across blocks:
// D'_0 = D_0, D'_i = D_i - L_i C_{i-1}, C_i = D'_i^{-1} U_i.
class BlockTridiagonalLU {
 public:
  BlockTridiagonalLU(const SparseMatrix& a, std::size_t n_blocks, std::size_t bs)
      : n_(n_blocks), bs_(bs) {
    std::vector<ColSparse> diag(n_), upper(n_ > 0 ? n_ - 1 : 0);
    lower_.resize(n_ > 0 ? n_ - 1 : 0);
    extract(a, diag, upper);

    lu_.resize(n_);
    c_.resize(n_ > 0 ? n_ - 1 : 0);
    const auto b = static_cast<Eigen::Index>(bs_);
    for (std::size_t i = 0; i < n_; ++i) {
      Eigen::MatrixXd d = Eigen::MatrixXd(diag[i]);
      if (i > 0) d.noalias() -= lower_[i - 1] * c_[i - 1];
      lu_[i].compute(d);
      const double rcond = lu_[i].rcond();
      if (!std::isfinite(rcond) || rcond < 1e-15) {
        throw SolverError("block pivot " + std::to_string(i) + " is singular (rcond = " +
                          std::to_string(rcond) + ")");
      }
      if (i + 1 < n_) {
        c_[i] = lu_[i].solve(Eigen::MatrixXd(upper[i]));
        if (!c_[i].allFinite()) throw SolverError("non-finite block factor at node " + std::to_string(i));
      }
      diag[i] = ColSparse(b, b);
      if (i + 1 < n_) upper[i] = ColSparse(b, b);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const auto b = static_cast<Eigen::Index>(bs_);
    Eigen::VectorXd y(rhs.size());
    Eigen::VectorXd t(b);
    for (std::size_t i = 0; i < n_; ++i) {
      t = rhs.segment(static_cast<Eigen::Index>(i) * b, b);
      if (i > 0) t.noalias() -= lower_[i - 1] * y.segment(static_cast<Eigen::Index>(i - 1) * b, b);
      y.segment(static_cast<Eigen::Index>(i) * b, b) = lu_[i].solve(t);
    }
    for (std::size_t i = n_ - 1; i-- > 0;) {
      y.segment(static_cast<Eigen::Index>(i) * b, b).noalias() -=
          c_[i] * y.segment(static_cast<Eigen::Index>(i + 1) * b, b);
    }
    return y;
  }

 private:
  void extract(const SparseMatrix& a, std::vector<ColSparse>& diag, std::vector<ColSparse>& upper) {
    std::vector<std::vector<Eigen::Triplet<double>>> td(n_), tl(lower_.size()), tu(upper.size());
    for (Eigen::Index row = 0; row < a.outerSize(); ++row) {
      const std::size_t bi = static_cast<std::size_t>(row) / bs_;
      const auto r = static_cast<int>(static_cast<std::size_t>(row) % bs_);
      for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
        const std::size_t bj = static_cast<std::size_t>(it.col()) / bs_;
        const auto c = static_cast<int>(static_cast<std::size_t>(it.col()) % bs_);
        if (bj == bi) {
          td[bi].emplace_back(r, c, it.value());
        } else if (bj + 1 == bi) {
          tl[bi - 1].emplace_back(r, c, it.value());
        } else if (bj == bi + 1) {
          tu[bi].emplace_back(r, c, it.value());
        } else {
          throw SolverError("matrix is not block tridiagonal");
        }
      }
    }
    const auto b = static_cast<Eigen::Index>(bs_);
    auto build = [b](ColSparse& m, const std::vector<Eigen::Triplet<double>>& t) {
      m.resize(b, b);
      m.setFromTriplets(t.begin(), t.end());
    };
    for (std::size_t i = 0; i < n_; ++i) build(diag[i], td[i]);
    for (std::size_t i = 0; i < lower_.size(); ++i) build(lower_[i], tl[i]);
    for (std::size_t i = 0; i < upper.size(); ++i) build(upper[i], tu[i]);
  }

  std::size_t n_;
  std::size_t bs_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::vector<Eigen::MatrixXd> c_;
  std::vector<ColSparse> lower_;  // A_{i+1,i}
};

constexpr double kResidualTarget = 1e-10;
constexpr int kMaxRefinement = 4;

double relative_residual(const CoupledSystem& system, const Eigen::VectorXd& x) {
  const double bnorm = system.rhs.norm();
  const Eigen::VectorXd r = system.rhs - system.matrix * x;
  return bnorm > 0.0 ? r.norm() / bnorm : r.norm();
}

CoefficientField to_field(const CoupledSystem& system, const Eigen::VectorXd& x) {
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(system.n_nodes()),
                         static_cast<Eigen::Index>(system.n_modes()));
  for (std::size_t i = 0; i < system.n_nodes(); ++i) {
    for (std::size_t m = 0; m < system.n_modes(); ++m) {
      coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
          x(static_cast<Eigen::Index>(system.flat(i, m)));
    }
  }
  return CoefficientField(system.basis, system.mesh, std::move(coeffs));
}

}  // namespace

double solver_memory_bytes(std::size_t n_nodes, std::size_t n_modes) {
  // LU factors and D'^{-1} U per node, plus one dense work block.
  const double block = static_cast<double>(n_modes) * static_cast<double>(n_modes) * sizeof(double);
  return (2.0 * static_cast<double>(n_nodes) + 2.0) * block;
}

CoefficientField solve(const CoupledSystem& system, SolveReport* report) {
  const std::size_t n = system.n_nodes();
  const std::size_t bs = system.n_modes();
  if (static_cast<std::size_t>(system.matrix.rows()) != n * bs ||
      static_cast<std::size_t>(system.rhs.size()) != n * bs) {
    throw SolverError("system size does not match its discretization");
  }
  if (!system.rhs.allFinite()) throw SolverError("right-hand side is not finite");

  const BlockTridiagonalLU lu(system.matrix, n, bs);
  Eigen::VectorXd x = lu.solve(system.rhs);
  double res = relative_residual(system, x);
  int steps = 0;
  while (std::isfinite(res) && res > 1e-3 * kResidualTarget && steps < kMaxRefinement) {
    const Eigen::VectorXd r = system.rhs - system.matrix * x;
    Eigen::VectorXd candidate = x + lu.solve(r);
    const double next = relative_residual(system, candidate);
    ++steps;
    if (!(next < res)) break;
    x = std::move(candidate);
    res = next;
  }
  if (!std::isfinite(res) || !x.allFinite()) throw SolverError("direct solve produced non-finite values");
  if (res > kResidualTarget) {
    throw SolverError("direct solve reached relative residual " + std::to_string(res) +
                      " after " + std::to_string(steps) + " refinement steps (target 1e-10)");
  }
  if (report != nullptr) {
    report->relative_residual = res;
    report->refinement_steps = steps;
  }
  return to_field(system, x);
}

}  // namespace vmsgf

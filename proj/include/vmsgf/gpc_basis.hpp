#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vmsgf {

/// Degrees of a multivariate polynomial, one entry per random coordinate.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }
  int total_order() const;

  // "(1,0,2)"
  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// (q+p)!/(q!p!) with overflow detection; throws ConfigError when the count
/// does not fit in size_t.
std::size_t basis_dimension(int q, int p);

/// All multi-indices of length q with total order <= p in graded-lexicographic
/// order: ascending total order, and within one order descending
/// lexicographically, so (1,0) precedes (0,1). The zero index comes first.
std::vector<MultiIndex> enumerate_indices(int q, int p);

/// Orthonormal shifted Legendre polynomial of degree k on (0,1) with respect
/// to the uniform density: E[phi_k^2] = 1.
double legendre01(int k, double xi);

/// phi_0..phi_pmax at xi via the three-term recurrence.
void legendre01_all(int pmax, double xi, std::span<double> out);

/// Total-degree gPC basis for q independent uniform(0,1) inputs.
///
/// Immutable after construction. Index ranks follow enumerate_indices, so for a
/// fixed q the basis of order p is a prefix of the basis of any order > p.
class GpcBasis {
 public:
  GpcBasis(int q, int p);

  int dimension() const { return q_; }
  int order() const { return p_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& index(std::size_t rank) const { return indices_[rank]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Rank of m in this basis; DomainError if m is not a member.
  std::size_t rank_of(const MultiIndex& m) const;
  bool contains(const MultiIndex& m) const;

  /// Phi_m(xi); DomainError if m is not in the basis.
  double eval(const MultiIndex& m, std::span<const double> xi) const;
  double eval(std::size_t rank, std::span<const double> xi) const;

  /// All Phi values at xi in rank order.
  std::vector<double> eval_all(std::span<const double> xi) const;
  void eval_all(std::span<const double> xi, std::span<double> out) const;

 private:
  int q_;
  int p_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> ranks_;
};

}  // namespace vmsgf

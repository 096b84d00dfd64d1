#include "vmsgf/gpc_basis.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "vmsgf/error.hpp"

namespace vmsgf {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw DomainError("multi-index entries must be non-negative");
  }
}

int MultiIndex::total_order() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(entries_[i]);
  }
  return s + ")";
}

std::size_t basis_dimension(int q, int p) {
  if (q < 1) throw ConfigError("stochastic dimension q must be >= 1");
  if (p < 0) throw ConfigError("polynomial order p must be >= 0");
  // C(q+p, p) built incrementally; each partial product is itself a binomial
  // coefficient so the division is exact.
  std::size_t n = 1;
  for (int k = 1; k <= p; ++k) {
    std::size_t next = 0;
    if (__builtin_mul_overflow(n, static_cast<std::size_t>(q + k), &next)) {
      throw ConfigError("basis dimension overflows for q=" + std::to_string(q) +
                        ", p=" + std::to_string(p));
    }
    n = next / static_cast<std::size_t>(k);
  }
  return n;
}

namespace {

// Compositions of `total` into `parts` non-negative entries, descending lex.
void compositions(int total, int parts, std::vector<int>& prefix,
                  std::vector<MultiIndex>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_indices(int q, int p) {
  const std::size_t count = basis_dimension(q, p);
  std::vector<MultiIndex> out;
  out.reserve(count);
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(q));
  for (int order = 0; order <= p; ++order) compositions(order, q, prefix, out);
  return out;
}

void legendre01_all(int pmax, double xi, std::span<double> out) {
  // P_{k+1}(t) = ((2k+1) t P_k - k P_{k-1}) / (k+1) with t = 2 xi - 1, then
  // scale by sqrt(2k+1).
  const double t = 2.0 * xi - 1.0;
  double prev = 1.0;
  double cur = t;
  out[0] = 1.0;
  if (pmax >= 1) out[1] = std::sqrt(3.0) * t;
  for (int k = 1; k < pmax; ++k) {
    const double next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    out[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 * (k + 1) + 1.0) * cur;
  }
}

double legendre01(int k, double xi) {
  if (k < 0) throw DomainError("polynomial degree must be non-negative");
  std::vector<double> vals(static_cast<std::size_t>(k) + 1);
  legendre01_all(k, xi, vals);
  return vals.back();
}

GpcBasis::GpcBasis(int q, int p) : q_(q), p_(p), indices_(enumerate_indices(q, p)) {
  for (std::size_t r = 0; r < indices_.size(); ++r) ranks_.emplace(indices_[r], r);
}

bool GpcBasis::contains(const MultiIndex& m) const { return ranks_.count(m) != 0; }

std::size_t GpcBasis::rank_of(const MultiIndex& m) const {
  auto it = ranks_.find(m);
  if (it == ranks_.end()) {
    throw DomainError("multi-index " + m.to_string() + " is not in the basis (q=" +
                      std::to_string(q_) + ", p=" + std::to_string(p_) + ")");
  }
  return it->second;
}

double GpcBasis::eval(const MultiIndex& m, std::span<const double> xi) const {
  return eval(rank_of(m), xi);
}

double GpcBasis::eval(std::size_t rank, std::span<const double> xi) const {
  if (rank >= indices_.size()) throw DomainError("basis rank out of range");
  if (xi.size() != static_cast<std::size_t>(q_)) {
    throw DomainError("point has wrong dimension for the basis");
  }
  const MultiIndex& m = indices_[rank];
  double value = 1.0;
  for (int i = 0; i < q_; ++i) {
    if (m[i] > 0) value *= legendre01(m[i], xi[i]);
  }
  return value;
}

std::vector<double> GpcBasis::eval_all(std::span<const double> xi) const {
  std::vector<double> out(indices_.size());
  eval_all(xi, out);
  return out;
}

void GpcBasis::eval_all(std::span<const double> xi, std::span<double> out) const {
  if (xi.size() != static_cast<std::size_t>(q_)) {
    throw DomainError("point has wrong dimension for the basis");
  }
  const std::size_t stride = static_cast<std::size_t>(p_) + 1;
  std::vector<double> uni(static_cast<std::size_t>(q_) * stride);
  for (int i = 0; i < q_; ++i) {
    legendre01_all(p_, xi[i], std::span<double>(uni).subspan(i * stride, stride));
  }
  for (std::size_t r = 0; r < indices_.size(); ++r) {
    const MultiIndex& m = indices_[r];
    double value = 1.0;
    for (int i = 0; i < q_; ++i) value *= uni[i * stride + static_cast<std::size_t>(m[i])];
    out[r] = value;
  }
}

}  // namespace vmsgf

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wce {

using BigInt = boost::multiprecision::cpp_int;

/// Position (i, k) in the double array of Gaussian coordinates: i is the
/// time-mode index, k the noise channel. Both are 1-based.
struct Slot {
  int i = 1;
  int k = 1;

  friend constexpr auto operator<=>(const Slot&, const Slot&) = default;
};

class IncompleteTripleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidMuError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multi-index over (i, k) slots stored in sparse canonical form: entries are
/// sorted i-major, k-minor and no stored exponent is zero.
class MultiIndex {
 public:
  using Entry = std::pair<Slot, int>;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<Entry> entries);
  explicit MultiIndex(std::vector<Entry> entries);

  /// Unit index e_(i,k).
  static MultiIndex unit(int i, int k = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Exponent at (i, k); zero when absent.
  int at(int i, int k) const;
  int at(Slot s) const { return at(s.i, s.k); }

  int order() const { return order_; }
  int max_time_mode() const;
  int max_channel() const;

  MultiIndex raised(int i, int k) const;
  MultiIndex lowered(int i, int k) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Entrywise difference; throws if any entry would become negative.
  MultiIndex operator-(const MultiIndex& other) const;
  MultiIndex scaled(int factor) const;

  /// Entrywise minimum over the union of supports.
  MultiIndex min_with(const MultiIndex& other) const;
  /// Entrywise |alpha - beta| over the union of supports.
  MultiIndex abs_diff(const MultiIndex& other) const;
  /// True when every entry is <= the corresponding entry of `other`.
  bool le(const MultiIndex& other) const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }

 private:
  void canonicalize();

  std::vector<Entry> entries_;
  int order_ = 0;
};

/// Canonical total order: by order ascending, then by the dense exponent vector
/// (i-major, k-minor) with larger leading exponents first, so that
/// e_(1,1) < e_(1,2) < e_(2,1).
std::strong_ordering canonical_compare(const MultiIndex& a, const MultiIndex& b);

struct CanonicalLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return canonical_compare(a, b) < 0; }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept;
};

struct TruncationSpec {
  int max_order = 0;      // N
  int time_modes = 1;     // n
  int channels = 1;       // r
};

/// Number of indices produced by enumerate(spec): binom(n r + N, N).
std::size_t truncation_size(const TruncationSpec& spec);

using CharacteristicSet = std::vector<Slot>;

int order(const MultiIndex& alpha);
BigInt factorial(const MultiIndex& alpha);
double log_factorial(const MultiIndex& alpha);
MultiIndex lower(const MultiIndex& alpha, int i, int k);
MultiIndex raise(const MultiIndex& alpha, int i, int k);
CharacteristicSet characteristic_set(const MultiIndex& alpha);
MultiIndex from_characteristic_set(const CharacteristicSet& set);

/// All multi-indices with |alpha| <= N, i <= n, k <= r in canonical order.
std::vector<MultiIndex> enumerate(const TruncationSpec& spec);

bool is_complete(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);

/// E[xi_alpha xi_beta xi_gamma] for a complete triple.
double psi(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);
/// Exact rational-free check value: psi^2 as a ratio of big integers.
std::pair<BigInt, BigInt> psi_squared_exact(const MultiIndex& alpha, const MultiIndex& beta,
                                            const MultiIndex& gamma);

/// Hermite product coefficient for xi_gamma xi_beta at gamma + beta - 2 mu.
double c_coeff(const MultiIndex& gamma, const MultiIndex& beta, const MultiIndex& mu);

struct ProductTerm {
  MultiIndex index;
  double coefficient = 0.0;
};

/// xi_gamma xi_beta = sum over mu <= gamma ^ beta of C(gamma, beta, mu) xi_{gamma+beta-2mu}.
std::vector<ProductTerm> product_expand(const MultiIndex& gamma, const MultiIndex& beta);

BigInt big_factorial(int n);
BigInt big_binomial(int n, int k);
double log_factorial(int n);

/// Enumerated index set with O(1) lookup and the lowering edges used by the
/// propagator.
class IndexSet {
 public:
  struct Edge {
    std::size_t lower = 0;   // position of alpha^-(i,k)
    int i = 1;
    int k = 1;
    double weight = 0.0;     // sqrt(alpha_i^k)
  };

  IndexSet() = default;
  explicit IndexSet(const TruncationSpec& spec);

  const TruncationSpec& spec() const { return spec_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Position of alpha, or size() when absent.
  std::size_t find(const MultiIndex& alpha) const;
  bool contains(const MultiIndex& alpha) const { return find(alpha) != size(); }

  const std::vector<Edge>& edges(std::size_t pos) const { return edges_[pos]; }
  /// Positions of all indices with |alpha| == level, in canonical order.
  const std::vector<std::size_t>& level(int n) const { return levels_.at(static_cast<std::size_t>(n)); }
  int max_order() const { return spec_.max_order; }

 private:
  TruncationSpec spec_;
  std::vector<MultiIndex> indices_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<std::size_t>> levels_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

}  // namespace wce

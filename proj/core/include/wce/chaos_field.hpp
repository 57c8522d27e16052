#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "wce/basis.hpp"
#include "wce/propagator.hpp"

namespace wce {

/// r_alpha = q^alpha = prod q_k^{alpha_i^k}.
struct QWeights {
  std::vector<double> q;  // per channel, missing entries read as 1
};

/// r_alpha^2 = (alpha!)^rho prod (2 i k)^{gamma alpha_i^k}.
struct RhoGammaWeights {
  double rho = 0.0;
  double gamma = 0.0;
};

struct WeightSequence {
  std::variant<QWeights, RhoGammaWeights> kind;

  double weight(const MultiIndex& alpha) const;
  double squared(const MultiIndex& alpha) const;
};

/// Evaluation point; x is snapped to the nearest grid node.
struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;
};

/// Sum over alpha of u_alpha(t) xi_alpha(coords), in canonical order.
Field sample_field(const PropagatorSolution& sol, const SlotMatrix& coords, double t);
inline Field sample_field(const PropagatorSolution& sol, const GaussianCoordinates& c, double t) {
  return sample_field(sol, c.xi, t);
}

/// Expectation: the coefficient of the empty index.
Field mean(const PropagatorSolution& sol, double t);
/// E u(t,x) u(s,y) = sum over all alpha of u_alpha(t,x) u_alpha(s,y).
double second_moment(const PropagatorSolution& sol, SpaceTimePoint p, SpaceTimePoint q);
/// Centered covariance: the same sum without the empty index.
double covariance(const PropagatorSolution& sol, SpaceTimePoint p, SpaceTimePoint q);
/// Values u_alpha(t, x) for all alpha in index-set order.
std::vector<double> point_coefficients(const PropagatorSolution& sol, SpaceTimePoint p);

/// Table of Hermite product expansions for all pairs of a truncation's indices.
/// Targets may lie outside the truncation (orders up to 2N).
class ProductTable {
 public:
  explicit ProductTable(const IndexSet& set);

  struct Term {
    std::size_t target;  // position in targets()
    double coefficient;
  };

  const std::vector<MultiIndex>& targets() const { return targets_; }
  /// Position of a target index in the index set, or set.size() if outside.
  std::size_t target_in_set(std::size_t target) const { return target_in_set_[target]; }
  const std::vector<Term>& terms(std::size_t a, std::size_t b) const;

 private:
  std::size_t n_ = 0;
  std::vector<MultiIndex> targets_;
  std::vector<std::size_t> target_in_set_;
  std::vector<std::vector<Term>> terms_;  // packed upper triangle a <= b
};

/// Cached per truncation; thread-safe.
std::shared_ptr<const ProductTable> product_table(const IndexSet& set);

/// Coefficients c_gamma of theta_1 theta_2 = sum_gamma c_gamma xi_gamma, indexed by target.
std::vector<double> pair_expansion(const ProductTable& table, const std::vector<double>& u1,
                                   const std::vector<double>& u2);

/// Truncated moment sums over complete triples of the index set.
double third_moment(const PropagatorSolution& sol, SpaceTimePoint p1, SpaceTimePoint p2, SpaceTimePoint p3);
double fourth_moment(const PropagatorSolution& sol, SpaceTimePoint p1, SpaceTimePoint p2, SpaceTimePoint p3,
                     SpaceTimePoint p4);
/// The same sums on explicit coefficient vectors (index-set order).
double third_moment(const IndexSet& set, const std::vector<double>& u1, const std::vector<double>& u2,
                    const std::vector<double>& u3);
double fourth_moment(const IndexSet& set, const std::vector<double>& u1, const std::vector<double>& u2,
                     const std::vector<double>& u3, const std::vector<double>& u4);

struct WeightedNorm {
  double value = 0.0;       // sum r_alpha^2 ||u_alpha||^2 (squared norm)
  double tail_ratio = 0.0;  // weighted level-N contribution over level N-1
  bool divergent = false;   // tail_ratio > 0.5
  std::vector<double> levels;
};

WeightedNorm weighted_norm(const PropagatorSolution& sol, const WeightSequence& w, double t);
/// Multiplies every coefficient by r_alpha.
PropagatorSolution apply_weights(const PropagatorSolution& sol, const WeightSequence& w);

/// Sum over alpha of u_alpha(t) h^alpha / sqrt(alpha!).
Field s_transform_field(const PropagatorSolution& sol, const TestDirection& h, double t);

struct SCheckResult {
  double residual = 0.0;     // L2 distance at the horizon
  double shifted_norm = 0.0; // L2 norm of the directly solved shifted field
  Field shifted;             // directly solved field at the horizon
};

/// Solves v' = A v + Sf(h) + h_k(t) (M_k v + Sg_k(h)), v(0) = Su0(h), on the
/// problem's time grid and compares with s_transform_field(sol, h, T).
SCheckResult s_check(const SpdeProblem& problem, const PropagatorSolution& sol, const TestDirection& h);

}  // namespace wce

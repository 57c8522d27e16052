#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "wce/spatial.hpp"

namespace wce {
namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;
using Vec = Eigen::VectorXd;

Eigen::Map<const Vec> view(const State& s) { return {s.data(), static_cast<Eigen::Index>(s.size())}; }

/// First and second difference matrices on an interval grid. Dirichlet rows at
/// the end nodes are left empty so those values stay pinned at zero.
std::pair<SpMat, SpMat> difference_matrices(const Grid& g) {
  const int n = g.points();
  const double h = g.spacing();
  std::vector<Triplet> d1, d2;
  for (int j = 1; j < n - 1; ++j) {
    d1.emplace_back(j, j - 1, -0.5 / h);
    d1.emplace_back(j, j + 1, 0.5 / h);
    d2.emplace_back(j, j - 1, 1.0 / (h * h));
    d2.emplace_back(j, j, -2.0 / (h * h));
    d2.emplace_back(j, j + 1, 1.0 / (h * h));
  }
  if (g.boundary() == Boundary::kExtrapolate) {
    const int e = n - 1;
    d1.emplace_back(0, 0, -1.5 / h);
    d1.emplace_back(0, 1, 2.0 / h);
    d1.emplace_back(0, 2, -0.5 / h);
    d1.emplace_back(e, e, 1.5 / h);
    d1.emplace_back(e, e - 1, -2.0 / h);
    d1.emplace_back(e, e - 2, 0.5 / h);
    const double s = 1.0 / (h * h);
    d2.emplace_back(0, 0, 2.0 * s);
    d2.emplace_back(0, 1, -5.0 * s);
    d2.emplace_back(0, 2, 4.0 * s);
    d2.emplace_back(0, 3, -1.0 * s);
    d2.emplace_back(e, e, 2.0 * s);
    d2.emplace_back(e, e - 1, -5.0 * s);
    d2.emplace_back(e, e - 2, 4.0 * s);
    d2.emplace_back(e, e - 3, -1.0 * s);
  }
  SpMat D1(n, n), D2(n, n);
  D1.setFromTriplets(d1.begin(), d1.end());
  D2.setFromTriplets(d2.begin(), d2.end());
  return {D1, D2};
}

SpMat diagonal(const Grid& g, const Coefficient& f) {
  const int n = g.points();
  SpMat d(n, n);
  d.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int j = 0; j < n; ++j) d.insert(j, j) = f(g.node(j));
  return d;
}

SpMat identity(int n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

/// Zeroes the rows of pinned Dirichlet nodes.
void pin_rows(const Grid& g, SpMat& m) {
  if (g.boundary() != Boundary::kDirichlet) return;
  const int e = g.points() - 1;
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      if (it.row() == 0 || it.row() == e) it.valueRef() = 0.0;
    }
  }
  m.prune(0.0);
}

class LuSolver {
 public:
  explicit LuSolver(const SpMat& m) {
    lu_.analyzePattern(m);
    lu_.factorize(m);
    if (lu_.info() != Eigen::Success) {
      throw LinearSolveError("sparse LU factorization failed: " + lu_.lastErrorMessage());
    }
  }
  void solve(const Vec& rhs, State& x) const {
    // SparseLU::solve is const but returns an expression evaluated here.
    Vec sol = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success || !sol.allFinite()) throw LinearSolveError("sparse LU solve failed");
    x.assign(sol.data(), sol.data() + sol.size());
  }

 private:
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

class FdStepper final : public Stepper {
 public:
  FdStepper(double dt, const SpMat& A, bool dirichlet)
      : dt_(dt), explicit_(identity(static_cast<int>(A.rows())) + 0.5 * dt * A),
        lu_(identity(static_cast<int>(A.rows())) - 0.5 * dt * A), dirichlet_(dirichlet) {}

  double dt() const override { return dt_; }

  void advance(const State& u0, const State& early, const State& late, State& u1) const override {
    Vec rhs = explicit_ * view(u0) + view(early) + view(late);
    if (dirichlet_) rhs(0) = rhs(rhs.size() - 1) = 0.0;
    lu_.solve(rhs, u1);
  }

 private:
  double dt_;
  SpMat explicit_;
  LuSolver lu_;
  bool dirichlet_;
};

class FdDiscretization final : public Discretization {
 public:
  FdDiscretization(const Grid& grid, const OperatorSpec& op) : grid_(grid), op_(op) {
    const auto [D1, D2] = difference_matrices(grid);
    auto constant = [](double v) { return Coefficient([v](double) { return v; }); };
    VariableCoefficients vc;
    if (op.is_constant()) {
      const auto& c = op.constant();
      vc.a = constant(c.a);
      vc.b = constant(c.b);
      vc.c = constant(c.c);
      for (std::size_t k = 0; k < c.sigma.size(); ++k) {
        vc.sigma.push_back(constant(c.sigma[k]));
        vc.nu.push_back(constant(c.nu[k]));
      }
    } else {
      vc = op.variable();
    }
    const bool adjoint = !op.is_constant() && vc.form == VariableCoefficients::Form::kAdjoint;
    auto compose = [&](const SpMat& D, const Coefficient& f) -> SpMat {
      const SpMat F = diagonal(grid, f);
      return adjoint ? SpMat(D * F) : SpMat(F * D);
    };
    A_ = compose(D2, vc.a) + compose(D1, vc.b) + diagonal(grid, vc.c);
    pin_rows(grid, A_);
    A_.makeCompressed();
    for (std::size_t k = 0; k < vc.sigma.size(); ++k) {
      SpMat m = compose(D1, vc.sigma[k]) + diagonal(grid, vc.nu[k]);
      pin_rows(grid, m);
      m.makeCompressed();
      M_.push_back(std::move(m));
    }
    weights_ = grid.weights();
  }

  const Grid& grid() const override { return grid_; }
  const OperatorSpec& spec() const override { return op_; }
  std::size_t state_size() const override { return static_cast<std::size_t>(grid_.points()); }
  std::size_t channels() const override { return M_.size(); }

  State encode(std::span<const double> field) const override {
    if (field.size() != state_size()) throw DimensionMismatch("field size does not match grid");
    State s(field.begin(), field.end());
    if (dirichlet()) s.front() = s.back() = 0.0;
    return s;
  }
  Field decode(const State& state) const override {
    check(state);
    return state;
  }

  void apply_A(const State& in, State& out) const override { apply(A_, in, out); }
  void apply_M(std::size_t k, const State& in, State& out) const override { apply(M_.at(k), in, out); }

  std::unique_ptr<Stepper> stepper(double dt) const override {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    return std::make_unique<FdStepper>(dt, A_, dirichlet());
  }

  void solve_shifted(double alpha, std::span<const double> w, const State& rhs, State& x) const override {
    check(rhs);
    const SpMat B = combined(w);
    const int n = grid_.points();
    LuSolver lu(SpMat(identity(n) - alpha * B));
    Vec r = view(rhs);
    if (dirichlet()) r(0) = r(n - 1) = 0.0;
    lu.solve(r, x);
  }

  void advance_shifted(const State& v0, double dt, std::span<const double> h_mid,
                       std::span<const double> /*h_increment*/, const State& early, const State& late,
                       State& v1) const override {
    check(v0);
    const SpMat B = combined(h_mid);
    const int n = grid_.points();
    LuSolver lu(SpMat(identity(n) - 0.5 * dt * B));
    Vec rhs = view(v0) + 0.5 * dt * (B * view(v0)) + view(early) + view(late);
    if (dirichlet()) rhs(0) = rhs(n - 1) = 0.0;
    lu.solve(rhs, v1);
  }

  double norm2(const State& s) const override { return inner(s, s); }
  double inner(const State& a, const State& b) const override {
    check(a);
    check(b);
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += weights_[j] * a[j] * b[j];
    return sum;
  }

 private:
  bool dirichlet() const { return grid_.boundary() == Boundary::kDirichlet; }

  void check(const State& s) const {
    if (s.size() != state_size()) throw DimensionMismatch("state size does not match finite-difference grid");
  }

  void apply(const SpMat& m, const State& in, State& out) const {
    check(in);
    out.resize(in.size());
    Eigen::Map<Vec>(out.data(), static_cast<Eigen::Index>(out.size())) = m * view(in);
  }

  SpMat combined(std::span<const double> w) const {
    SpMat B = A_;
    for (std::size_t k = 0; k < M_.size() && k < w.size(); ++k) B += w[k] * M_[k];
    return B;
  }

  Grid grid_;
  OperatorSpec op_;
  SpMat A_;
  std::vector<SpMat> M_;
  std::vector<double> weights_;
};

}  // namespace

std::shared_ptr<const Discretization> make_finite_difference(const Grid& grid, const OperatorSpec& op) {
  op.validate();
  if (grid.boundary() == Boundary::kPeriodic) throw std::invalid_argument("finite-difference backend needs an interval grid");
  return std::make_shared<FdDiscretization>(grid, op);
}

}  // namespace wce

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "wce/spatial.hpp"

namespace wce {
namespace {

using cd = std::complex<double>;

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPair {
 public:
  explicit FftPair(int n) : n_(n) {
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<fftw_complex> modes(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(n, real.data(), modes.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_c2r_1d(n, modes.data(), real.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    if (forward_ == nullptr || backward_ == nullptr) throw std::runtime_error("FFTW plan creation failed");
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(const double* in, double* out_interleaved) const {
    // r2c does not modify its input; the cast is required by the C API.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out_interleaved));
  }
  void backward(double* in_interleaved, double* out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in_interleaved), out);
  }

 private:
  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Per-mode multipliers for a diagonal operator; applied to the packed state.
void multiply(const std::vector<cd>& symbol, const State& in, State& out) {
  out.resize(in.size());
  for (std::size_t m = 0; m < symbol.size(); ++m) {
    const cd v = symbol[m] * cd(in[2 * m], in[2 * m + 1]);
    out[2 * m] = v.real();
    out[2 * m + 1] = v.imag();
  }
}

class SpectralStepper final : public Stepper {
 public:
  SpectralStepper(double dt, std::vector<cd> propagator) : dt_(dt), e_(std::move(propagator)) {}
  double dt() const override { return dt_; }
  void advance(const State& u0, const State& early, const State& late, State& u1) const override {
    u1.resize(u0.size());
    for (std::size_t m = 0; m < e_.size(); ++m) {
      const cd v = e_[m] * cd(u0[2 * m] + early[2 * m], u0[2 * m + 1] + early[2 * m + 1]);
      u1[2 * m] = v.real() + late[2 * m];
      u1[2 * m + 1] = v.imag() + late[2 * m + 1];
    }
  }

 private:
  double dt_;
  std::vector<cd> e_;
};

class SpectralDiscretization final : public Discretization {
 public:
  SpectralDiscretization(const Grid& grid, const OperatorSpec& op) : grid_(grid), op_(op), fft_(grid.points()) {
    const int n = grid.points();
    const std::size_t modes = static_cast<std::size_t>(n / 2 + 1);
    const auto& c = op.constant();
    lambda_.resize(modes);
    mu_.assign(c.sigma.size(), std::vector<cd>(modes));
    for (std::size_t m = 0; m < modes; ++m) {
      const double y = 2.0 * std::numbers::pi * static_cast<double>(m) / grid.length();
      // Odd-order derivatives have no real representation at the Nyquist mode.
      const bool nyquist = m == modes - 1;
      cd a = symbol_A(c, y);
      if (nyquist) a.imag(0.0);
      lambda_[m] = a;
      for (std::size_t k = 0; k < c.sigma.size(); ++k) {
        cd s = symbol_M(c, k, y);
        if (nyquist) s.imag(0.0);
        mu_[k][m] = s;
      }
    }
  }

  const Grid& grid() const override { return grid_; }
  const OperatorSpec& spec() const override { return op_; }
  std::size_t state_size() const override { return 2 * lambda_.size(); }
  std::size_t channels() const override { return mu_.size(); }

  State encode(std::span<const double> field) const override {
    if (field.size() != static_cast<std::size_t>(grid_.points())) throw DimensionMismatch("field size does not match grid");
    State s(state_size());
    fft_.forward(field.data(), s.data());
    const double scale = 1.0 / grid_.points();
    for (double& v : s) v *= scale;
    return s;
  }

  Field decode(const State& state) const override {
    check(state);
    State work = state;  // c2r destroys its input
    Field out(static_cast<std::size_t>(grid_.points()));
    fft_.backward(work.data(), out.data());
    return out;
  }

  void apply_A(const State& in, State& out) const override {
    check(in);
    multiply(lambda_, in, out);
  }
  void apply_M(std::size_t k, const State& in, State& out) const override {
    check(in);
    multiply(mu_.at(k), in, out);
  }

  std::unique_ptr<Stepper> stepper(double dt) const override {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    std::vector<cd> e(lambda_.size());
    for (std::size_t m = 0; m < e.size(); ++m) e[m] = std::exp(lambda_[m] * dt);
    return std::make_unique<SpectralStepper>(dt, std::move(e));
  }

  void solve_shifted(double alpha, std::span<const double> w, const State& rhs, State& x) const override {
    check(rhs);
    x.resize(rhs.size());
    for (std::size_t m = 0; m < lambda_.size(); ++m) {
      cd sym = lambda_[m];
      for (std::size_t k = 0; k < mu_.size() && k < w.size(); ++k) sym += w[k] * mu_[k][m];
      const cd v = cd(rhs[2 * m], rhs[2 * m + 1]) / (1.0 - alpha * sym);
      x[2 * m] = v.real();
      x[2 * m + 1] = v.imag();
    }
  }

  void advance_shifted(const State& v0, double dt, std::span<const double> /*h_mid*/,
                       std::span<const double> h_increment, const State& early, const State& late,
                       State& v1) const override {
    check(v0);
    v1.resize(v0.size());
    for (std::size_t m = 0; m < lambda_.size(); ++m) {
      cd exponent = lambda_[m] * dt;
      for (std::size_t k = 0; k < mu_.size() && k < h_increment.size(); ++k) exponent += h_increment[k] * mu_[k][m];
      const cd v = std::exp(exponent) * cd(v0[2 * m] + early[2 * m], v0[2 * m + 1] + early[2 * m + 1]);
      v1[2 * m] = v.real() + late[2 * m];
      v1[2 * m + 1] = v.imag() + late[2 * m + 1];
    }
  }

  double norm2(const State& s) const override { return inner(s, s); }

  double inner(const State& a, const State& b) const override {
    check(a);
    check(b);
    const std::size_t last = lambda_.size() - 1;
    double sum = 0.0;
    for (std::size_t m = 0; m <= last; ++m) {
      const double w = (m == 0 || m == last) ? 1.0 : 2.0;
      sum += w * (a[2 * m] * b[2 * m] + a[2 * m + 1] * b[2 * m + 1]);
    }
    return grid_.length() * sum;
  }

 private:
  void check(const State& s) const {
    if (s.size() != state_size()) throw DimensionMismatch("state size does not match spectral discretization");
  }

  Grid grid_;
  OperatorSpec op_;
  FftPair fft_;
  std::vector<cd> lambda_;
  std::vector<std::vector<cd>> mu_;
};

}  // namespace

std::shared_ptr<const Discretization> make_spectral(const Grid& grid, const OperatorSpec& op) {
  op.validate();
  if (grid.boundary() != Boundary::kPeriodic) throw std::invalid_argument("spectral backend needs a periodic grid");
  if (!op.is_constant()) throw std::invalid_argument("spectral backend needs constant coefficients");
  if (grid.points() < 8 || !is_power_of_two(grid.points())) {
    throw std::invalid_argument("spectral grid size must be a power of two >= 8");
  }
  return std::make_shared<SpectralDiscretization>(grid, op);
}

}  // namespace wce

#pragma once

// Reversible oracle computer over C^(2^(n+1)) and its trembling-input
// conversion.
//
// Basis index convention: (x, b) lives at index b*2^n + x, with b the output
// bit. The oracle is the permutation (x, b) -> (x, b XOR P(x)); applied to
// the launch state sum_x a_x |x, 0> it yields sum_x a_x |x, P(x)>, so the
// probability of reading output bit 1 is the satisfying mass of the input
// distribution.
//
// Tremble law: p_x(theta) = (1 + eps*cos(omega_x*theta)) / Z(theta) with
// omega_x = x + 1 and Z normalizing; amplitudes are sqrt(p_x), all strictly
// positive for eps < 1. Distinct integer frequencies make the cosine modes
// linearly independent, which gives the dichotomy the decision rule needs:
//
//   f(theta) = (|S| + eps*C_S(theta)) / (2^n + eps*C_all(theta)),
//   C_T(theta) = sum_{x in T} cos(omega_x*theta),   S = satisfying set,
//
// and f is constant in theta exactly when S is empty (f = 0) or S is the
// full set (f = 1). Flat-zero value => UNSAT, flat-one => tautology, any
// variation => a witness exists. The derivative is the quotient rule applied
// to the closed form.
//
// Output-bit measurements are the two-outcome specialization of the
// projection postulate (block mass of the b=1 half); the sampling convention
// matches core::measure (one uniform draw, ascending-eigenvalue cumulative
// walk), asserted against the dense-projector route in the test suite.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "zitter/core.hpp"
#include "zitter/errors.hpp"
#include "zitter/formula.hpp"
#include "zitter/rng.hpp"

namespace zitter::qtp {

inline constexpr int kDefaultComputerCap = 20;
inline constexpr double kDefaultDecisionTol = 1e-9;

// theta-parameterized input family with all-positive coefficients.
class TrembleSchedule {
 public:
  TrembleSchedule(int n, double epsilon) : n_(n), epsilon_(epsilon) {
    if (n < 0) throw Error("TrembleSchedule: n must be >= 0");
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
      throw BadEpsilon("TrembleSchedule: epsilon must lie in [0, 1), got " +
                       std::to_string(epsilon));
  }

  int n() const { return n_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t num_inputs() const { return std::uint64_t{1} << n_; }
  // Distinct integer frequencies; the top one belongs to x = 2^n - 1.
  double frequency(std::uint64_t x) const { return static_cast<double>(x + 1); }

 private:
  int n_;
  double epsilon_;
};

// Oracle permutation (x, b) -> (x, b XOR P(x)) plus the truth table it was
// compiled from. The permutation is an involution, hence unitary.
class GedankenComputer {
 public:
  explicit GedankenComputer(formula::TruthTable table, int cap = kDefaultComputerCap)
      : truth_(std::move(table)) {
    if (truth_.n > cap)
      throw VariableLimit("GedankenComputer: " + std::to_string(truth_.n) +
                          " variables exceed the cap of " + std::to_string(cap));
    if (truth_.bits.size() != (std::uint64_t{1} << truth_.n))
      throw Error("GedankenComputer: malformed truth table");
    const std::uint64_t half = truth_.bits.size();
    permutation_.resize(2 * half);
    for (std::uint64_t x = 0; x < half; ++x) {
      const std::uint64_t flip = truth_.bits[x] ? half : 0;
      permutation_[x] = static_cast<std::uint32_t>(x ^ flip);
      permutation_[half + x] = static_cast<std::uint32_t>((half + x) ^ flip);
    }
    satisfying_ = truth_.satisfying_indices();
  }

  int n() const { return truth_.n; }
  std::uint64_t num_inputs() const { return truth_.bits.size(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * truth_.bits.size()); }
  const formula::TruthTable& truth() const { return truth_; }
  const std::vector<std::uint32_t>& satisfying() const { return satisfying_; }
  std::uint64_t satisfying_count() const { return satisfying_.size(); }
  std::uint32_t permute(std::uint64_t i) const { return permutation_[i]; }

  core::Vector apply_oracle(const core::Vector& in) const {
    if (in.size() != dim()) throw DimensionMismatch("apply_oracle: dimension mismatch");
    core::Vector out(in.size());
    for (Eigen::Index i = 0; i < in.size(); ++i) out[i] = in[permutation_[i]];
    return out;
  }

 private:
  formula::TruthTable truth_;
  std::vector<std::uint32_t> permutation_;
  std::vector<std::uint32_t> satisfying_;
};

inline GedankenComputer build_computer(formula::TruthTable table,
                                       int cap = kDefaultComputerCap) {
  return GedankenComputer(std::move(table), cap);
}

inline formula::TruthTable make_planted_table(int n, const std::vector<std::uint32_t>& witnesses) {
  formula::TruthTable t;
  t.n = n;
  t.bits.assign(std::uint64_t{1} << n, false);
  for (std::uint32_t w : witnesses) {
    if (w >= t.bits.size()) throw IndexOutOfRange("make_planted_table: witness out of range");
    t.bits[w] = true;
  }
  return t;
}

// sqrt(p_x(theta)) over the 2^n input register states; unit norm, every
// amplitude strictly positive.
inline core::StateVector tremble_state(const TrembleSchedule& sched, double theta) {
  const std::uint64_t count = sched.num_inputs();
  core::Vector amps(static_cast<Eigen::Index>(count));
  for (std::uint64_t x = 0; x < count; ++x)
    amps[static_cast<Eigen::Index>(x)] =
        std::sqrt(1.0 + sched.epsilon() * std::cos(sched.frequency(x) * theta));
  return core::StateVector::normalized(amps);
}

// tremble_state tensored with |b=0>: the full launch state.
inline core::StateVector launch_state(const TrembleSchedule& sched, double theta) {
  const core::StateVector input = tremble_state(sched, theta);
  core::Vector full = core::Vector::Zero(2 * input.dim());
  full.head(input.dim()) = input.amplitudes();
  return core::StateVector(std::move(full));
}

// Born probability of output bit 1: the mass of the b=1 block.
inline double output_bit_probability(const core::Vector& state, std::uint64_t num_inputs) {
  return state.tail(static_cast<Eigen::Index>(num_inputs)).squaredNorm();
}

// One projective output-bit measurement. Convention matches core::measure:
// a single uniform draw walked against the ascending-eigenvalue cumulative
// distribution, so outcome 0 wins iff u < 1 - p1. An exactly-zero p1 can
// never produce outcome 1.
inline int measure_output_bit(const core::Vector& state, std::uint64_t num_inputs, Rng& rng) {
  const double p1 = output_bit_probability(state, num_inputs);
  return rng.uniform() < 1.0 - p1 ? 0 : 1;
}

// Dense two-projector decomposition of the output-bit observable, the
// core-module route to the same measurement. Test-scale dims only.
inline core::SpectralDecomposition output_bit_decomposition(int n) {
  const Eigen::Index half = Eigen::Index{1} << n;
  core::Matrix p0 = core::Matrix::Zero(2 * half, 2 * half);
  core::Matrix p1 = core::Matrix::Zero(2 * half, 2 * half);
  for (Eigen::Index i = 0; i < half; ++i) {
    p0(i, i) = 1.0;
    p1(half + i, half + i) = 1.0;
  }
  return core::SpectralDecomposition({0.0, 1.0}, {std::move(p0), std::move(p1)});
}

// Loads a definite input x into the register, runs the oracle, and reads the
// output bit; deterministic with probability 1 and equal to the truth bit.
inline bool classical_run(const GedankenComputer& gc, std::uint64_t x) {
  if (x >= gc.num_inputs()) throw IndexOutOfRange("classical_run: input index out of range");
  core::Vector psi = core::Vector::Zero(gc.dim());
  psi[static_cast<Eigen::Index>(x)] = 1.0;  // (x, b=0)
  const core::Vector out = gc.apply_oracle(psi);
  const double p1 = output_bit_probability(out, gc.num_inputs());
  if (p1 != 0.0 && p1 != 1.0)
    throw Error("classical_run: non-deterministic outcome on a classical input");
  return p1 == 1.0;
}

namespace detail {

struct ClosedForm {
  double numerator;    // |S| + eps*C_S
  double denominator;  // 2^n + eps*C_all
  double d_numerator;    // -eps * sum_{x in S} omega_x sin(omega_x theta)
  double d_denominator;  // -eps * sum_x omega_x sin(omega_x theta)
};

inline ClosedForm closed_form_terms(const GedankenComputer& gc, const TrembleSchedule& sched,
                                    double theta) {
  if (gc.n() != sched.n())
    throw DimensionMismatch("qtp: computer and schedule disagree on n");
  const double eps = sched.epsilon();
  double c_all = 0.0, w_all = 0.0;
  for (std::uint64_t x = 0; x < gc.num_inputs(); ++x) {
    const double w = sched.frequency(x);
    c_all += std::cos(w * theta);
    w_all += w * std::sin(w * theta);
  }
  double c_sat = 0.0, w_sat = 0.0;
  for (std::uint32_t x : gc.satisfying()) {
    const double w = sched.frequency(x);
    c_sat += std::cos(w * theta);
    w_sat += w * std::sin(w * theta);
  }
  ClosedForm cf;
  cf.numerator = static_cast<double>(gc.satisfying_count()) + eps * c_sat;
  cf.denominator = static_cast<double>(gc.num_inputs()) + eps * c_all;
  cf.d_numerator = -eps * w_sat;
  cf.d_denominator = -eps * w_all;
  return cf;
}

}  // namespace detail

// f(theta) by full state-vector simulation: launch, oracle, output-bit mass.
inline double output_expectation(const GedankenComputer& gc, const TrembleSchedule& sched,
                                 double theta) {
  if (gc.n() != sched.n())
    throw DimensionMismatch("output_expectation: computer and schedule disagree on n");
  const core::StateVector launch = launch_state(sched, theta);
  const core::Vector processed = gc.apply_oracle(launch.amplitudes());
  return output_bit_probability(processed, gc.num_inputs());
}

// f(theta) by the closed form; agrees with the simulation to 1e-10.
inline double closed_form_expectation(const GedankenComputer& gc, const TrembleSchedule& sched,
                                      double theta) {
  const auto cf = detail::closed_form_terms(gc, sched, theta);
  return cf.numerator / cf.denominator;
}

// f'(theta), quotient rule on the closed form. Identically zero exactly for
// S empty or S full; the sums for S = full cancel term-for-term, so the zero
// is exact in floating point too.
inline double output_derivative(const GedankenComputer& gc, const TrembleSchedule& sched,
                                double theta) {
  const auto cf = detail::closed_form_terms(gc, sched, theta);
  return (cf.d_numerator * cf.denominator - cf.numerator * cf.d_denominator) /
         (cf.denominator * cf.denominator);
}

enum class SatOutcome { Unsat, Sat, Tautology };

inline const char* to_string(SatOutcome o) {
  switch (o) {
    case SatOutcome::Unsat: return "UNSAT";
    case SatOutcome::Sat: return "SAT";
    case SatOutcome::Tautology: return "TAUTOLOGY";
  }
  return "?";
}

struct ZitterVerdict {
  struct Probe {
    double theta;
    double f;
    double fprime;
  };
  SatOutcome outcome;
  std::vector<Probe> evidence;
  double tol;
  double max_abs_f = 0.0;
  double min_f = 1.0;
  double max_abs_fprime = 0.0;
};

// Samples f and f' at random theta values. A flat-zero value certifies an
// empty satisfying set; a flat-one value certifies a tautology (which also
// has zero derivative, so the value must be inspected as well); anything
// else is a satisfiable non-tautology.
inline ZitterVerdict decide_sat(const GedankenComputer& gc, const TrembleSchedule& sched,
                                int num_samples, Rng& rng, double tol = kDefaultDecisionTol) {
  if (num_samples < 3)
    throw BadSampleCount("decide_sat: need at least 3 theta samples, got " +
                         std::to_string(num_samples));
  ZitterVerdict v;
  v.tol = tol;
  for (int s = 0; s < num_samples; ++s) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double f = output_expectation(gc, sched, theta);
    const double fp = output_derivative(gc, sched, theta);
    v.evidence.push_back({theta, f, fp});
    v.max_abs_f = std::max(v.max_abs_f, std::abs(f));
    v.min_f = std::min(v.min_f, f);
    v.max_abs_fprime = std::max(v.max_abs_fprime, std::abs(fp));
  }
  if (v.max_abs_f < tol)
    v.outcome = SatOutcome::Unsat;
  else if (v.min_f > 1.0 - tol)
    v.outcome = SatOutcome::Tautology;
  else
    v.outcome = SatOutcome::Sat;
  return v;
}

// Empirical output-bit frequency over `shots` measurements of identically
// prepared launches. Standard error <= 0.5/sqrt(shots). Sampling cannot
// certify an exact zero, so this never decides UNSAT on its own.
inline double estimate_expectation(const GedankenComputer& gc, const TrembleSchedule& sched,
                                   double theta, std::uint64_t shots, Rng& rng) {
  if (shots < 1) throw BadSampleCount("estimate_expectation: shots must be >= 1");
  const core::StateVector launch = launch_state(sched, theta);
  const core::Vector processed = gc.apply_oracle(launch.amplitudes());
  const double p1 = output_bit_probability(processed, gc.num_inputs());
  std::uint64_t ones = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    if (!(rng.uniform() < 1.0 - p1)) ++ones;
  return static_cast<double>(ones) / static_cast<double>(shots);
}

// Planted-witness scaling report: the value signal maxes out at
// Theta(|S|/2^n), while handing the witness the top frequency omega = 2^n
// lifts the derivative signal to order eps.
struct MagnitudeStudy {
  struct Extremes {
    double max_abs_f = 0.0;
    double max_abs_fprime = 0.0;
    double theta_at_max_f = 0.0;
    double theta_at_max_fprime = 0.0;
  };
  int n = 0;
  std::uint64_t sat_count = 0;
  double epsilon = 0.0;
  int grid_points = 0;
  Extremes low_frequency;  // witnesses at indices 0..|S|-1
  Extremes top_frequency;  // witnesses at the highest indices, top one included
  double value_lower_bound = 0.0;  // (1-eps)*|S|/2^n
  double value_upper_bound = 0.0;  // (1+eps)*|S|/(2^n*(1-eps))
};

namespace detail {

inline MagnitudeStudy::Extremes scan_extremes(const GedankenComputer& gc,
                                              const TrembleSchedule& sched, int grid_points) {
  MagnitudeStudy::Extremes e;
  for (int j = 0; j < grid_points; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / grid_points;
    const double f = closed_form_expectation(gc, sched, theta);
    const double fp = output_derivative(gc, sched, theta);
    if (std::abs(f) > e.max_abs_f) {
      e.max_abs_f = std::abs(f);
      e.theta_at_max_f = theta;
    }
    if (std::abs(fp) > e.max_abs_fprime) {
      e.max_abs_fprime = std::abs(fp);
      e.theta_at_max_fprime = theta;
    }
  }
  return e;
}

}  // namespace detail

// grid_points = 0 chooses 4*2^n points, dense enough to resolve the top
// frequency. theta = 0 is always on the grid, pinning max|f| >= |S|/2^n.
inline MagnitudeStudy derivative_magnitude_study(const TrembleSchedule& sched,
                                                 std::uint64_t satisfying_count,
                                                 int grid_points = 0) {
  const std::uint64_t total = sched.num_inputs();
  if (satisfying_count > total)
    throw InfeasibleRequest("derivative_magnitude_study: |S| exceeds 2^n");
  if (grid_points <= 0) grid_points = static_cast<int>(4 * total);

  MagnitudeStudy study;
  study.n = sched.n();
  study.sat_count = satisfying_count;
  study.epsilon = sched.epsilon();
  study.grid_points = grid_points;
  const double ratio = static_cast<double>(satisfying_count) / static_cast<double>(total);
  study.value_lower_bound = (1.0 - sched.epsilon()) * ratio;
  study.value_upper_bound = (1.0 + sched.epsilon()) * ratio / (1.0 - sched.epsilon());

  std::vector<std::uint32_t> low, top;
  for (std::uint64_t i = 0; i < satisfying_count; ++i) {
    low.push_back(static_cast<std::uint32_t>(i));
    top.push_back(static_cast<std::uint32_t>(total - 1 - i));
  }
  const GedankenComputer gc_low(make_planted_table(sched.n(), low));
  const GedankenComputer gc_top(make_planted_table(sched.n(), top));
  study.low_frequency = detail::scan_extremes(gc_low, sched, grid_points);
  study.top_frequency = detail::scan_extremes(gc_top, sched, grid_points);
  return study;
}

}  // namespace zitter::qtp

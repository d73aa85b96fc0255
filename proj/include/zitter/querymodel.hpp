#pragma once

// Two-filter query models over d = 4 or 8 preparable states. Odd states
// belong to filter A, even states to filter B (1-indexed). The outcome table
// P(i,k) gives the probability of YES to the query "is the state k?" given
// preparation i:
//
//   P(i,i) = 1
//   P(i,k) = 0              same filter, i != k
//   P(i,k) = 2/num_states   cross filter
//
// The Hilbert realization places filter A on the computational basis and
// filter B on the discrete-Fourier basis of a (d/2)-dimensional space; the
// two bases are mutually unbiased, which is exactly the cross-filter 1/dim
// law. Sampling one ion's reply is a projective measurement in the queried
// filter's basis via core::measure; every call consumes a fresh ion, so no
// collapse carries across calls.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "zitter/core.hpp"
#include "zitter/errors.hpp"
#include "zitter/rng.hpp"

namespace zitter::query {

enum class Outcome { No = 0, Yes = 1 };

struct QueryModel {
  int num_states;   // 4 or 8
  int filter_size;  // num_states / 2
  // table[i-1][k-1] = P(i,k)
  std::vector<std::vector<double>> table;

  double p(int i, int k) const {
    if (i < 1 || i > num_states || k < 1 || k > num_states)
      throw IndexOutOfRange("QueryModel::p: state index out of range");
    return table[i - 1][k - 1];
  }
};

struct HilbertRealization {
  int dim;                            // filter_size
  std::vector<core::Vector> basis_a;  // computational
  std::vector<core::Vector> basis_b;  // discrete Fourier

  // state index (1-based) -> basis vector: odd i -> a[(i-1)/2], even i -> b[i/2-1]
  const core::Vector& state_vector(int i) const {
    if (i % 2 == 1) return basis_a[(i - 1) / 2];
    return basis_b[i / 2 - 1];
  }
};

inline QueryModel make_model(int num_states) {
  if (num_states != 4 && num_states != 8)
    throw UnsupportedSize("make_model: num_states must be 4 or 8");
  QueryModel m;
  m.num_states = num_states;
  m.filter_size = num_states / 2;
  const double cross = 2.0 / num_states;
  m.table.assign(num_states, std::vector<double>(num_states, 0.0));
  for (int i = 1; i <= num_states; ++i)
    for (int k = 1; k <= num_states; ++k) {
      if (i == k)
        m.table[i - 1][k - 1] = 1.0;
      else if ((i - k) % 2 == 0)
        m.table[i - 1][k - 1] = 0.0;  // same filter, distinct states
      else
        m.table[i - 1][k - 1] = cross;
    }
  return m;
}

inline HilbertRealization realize_in_hilbert(const QueryModel& model) {
  const int d = model.filter_size;
  HilbertRealization r;
  r.dim = d;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    core::Vector a = core::Vector::Zero(d);
    a[j] = 1.0;
    r.basis_a.push_back(std::move(a));
    core::Vector b(d);
    for (int k = 0; k < d; ++k) {
      const double angle = 2.0 * std::numbers::pi * j * k / d;
      b[k] = std::polar(inv_sqrt_d, angle);
    }
    r.basis_b.push_back(std::move(b));
  }
  return r;
}

// Projective decomposition of the filter holding state `query`: one rank-1
// projector per basis vector, eigenvalue = basis position (0-based).
inline core::SpectralDecomposition filter_decomposition(const HilbertRealization& r,
                                                        bool filter_a) {
  std::vector<double> eigenvalues;
  std::vector<core::Matrix> projectors;
  const auto& basis = filter_a ? r.basis_a : r.basis_b;
  for (int j = 0; j < r.dim; ++j) {
    eigenvalues.push_back(static_cast<double>(j));
    projectors.push_back(basis[j] * basis[j].adjoint());
  }
  return core::SpectralDecomposition(std::move(eigenvalues), std::move(projectors));
}

// Caches the realization and both filter decompositions so repeated sampling
// does not rebuild them. One ion per sample() call.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const QueryModel& model)
      : model_(model),
        realization_(realize_in_hilbert(model)),
        decomp_a_(filter_decomposition(realization_, true)),
        decomp_b_(filter_decomposition(realization_, false)) {}

  Outcome sample(int true_state, int query, Rng& rng) const {
    if (true_state < 1 || true_state > model_.num_states || query < 1 ||
        query > model_.num_states)
      throw IndexOutOfRange("sample_outcome: state index out of range");
    const core::StateVector ion(realization_.state_vector(true_state));
    const bool query_in_a = (query % 2 == 1);
    const auto& decomp = query_in_a ? decomp_a_ : decomp_b_;
    const int position = query_in_a ? (query - 1) / 2 : query / 2 - 1;
    const core::MeasurementOutcome out = core::measure(ion, decomp, rng);
    return static_cast<int>(std::lround(out.value)) == position ? Outcome::Yes : Outcome::No;
  }

  const QueryModel& model() const { return model_; }

 private:
  QueryModel model_;
  HilbertRealization realization_;
  core::SpectralDecomposition decomp_a_;
  core::SpectralDecomposition decomp_b_;
};

inline Outcome sample_outcome(const QueryModel& model, int true_state, int query, Rng& rng) {
  return OutcomeSampler(model).sample(true_state, query, rng);
}

}  // namespace zitter::query

#pragma once

// Finite-dimensional quantum machinery: unit state vectors, self-adjoint
// observables, spectral decomposition A = sum_i a_i P_i, unitary evolution
// psi(t) = exp(-iHt) psi(0), and projective measurement with collapse.
//
// Evolution goes through the eigendecomposition (phase e^{-i a_i t} per
// eigenspace) rather than a truncated series, so the semigroup law
// U(t+s) = U(t)U(s) holds to round-off.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zitter/errors.hpp"
#include "zitter/rng.hpp"

namespace zitter::core {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDecompositionTol = 1e-10;
// Eigenvalues closer than this (relative to the spectral radius) are treated
// as one degenerate level and share a projector.
inline constexpr double kClusterRelTol = 1e-9;
inline constexpr double kCollapseTol = 1e-12;

// Multiplies by a global phase making the first non-negligible amplitude
// real-positive. States are physically defined only up to phase; fixing the
// representative makes equality checks well-defined.
inline Vector canonical_phase(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > kCollapseTol) {
      v *= std::conj(v[i]) / mag;
      break;
    }
  }
  return v;
}

// Unit-norm complex amplitude vector.
class StateVector {
 public:
  explicit StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw DimensionMismatch("StateVector: dim must be >= 1");
    const double err = std::abs(amps_.squaredNorm() - 1.0);
    if (err > kNormTol)
      throw NotNormalized("StateVector: squared norm deviates from 1 by " + std::to_string(err));
  }

  // Rescales an arbitrary nonzero vector onto the unit sphere.
  static StateVector normalized(const Vector& raw) {
    const double n = raw.norm();
    if (!(n > 0.0)) throw NotNormalized("StateVector::normalized: zero vector");
    return StateVector(raw / n);
  }

  static StateVector basis(Eigen::Index dim, Eigen::Index k) {
    if (k < 0 || k >= dim) throw IndexOutOfRange("StateVector::basis: index out of range");
    Vector v = Vector::Zero(dim);
    v[k] = 1.0;
    return StateVector(std::move(v));
  }

  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Complex amplitude(Eigen::Index i) const { return amps_[i]; }

 private:
  Vector amps_;
};

// Self-adjoint operator; hermiticity is checked at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw NonHermitianInput("HermitianOperator: matrix must be square");
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTol)
      throw NonHermitianInput("HermitianOperator: symmetry check failed, max |A - A^H| = " +
                              std::to_string(asym));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

// Eigenvalue / projector pairs of a self-adjoint operator. Eigenvalues are
// distinct after clustering and sorted ascending; projectors are validated to
// be an orthogonal resolution of the identity.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::vector<double> eigenvalues, std::vector<Matrix> projectors)
      : eigenvalues_(std::move(eigenvalues)), projectors_(std::move(projectors)) {
    validate();
  }

  std::size_t size() const { return eigenvalues_.size(); }
  Eigen::Index dim() const { return projectors_.front().rows(); }
  double eigenvalue(std::size_t i) const { return eigenvalues_[i]; }
  const Matrix& projector(std::size_t i) const { return projectors_[i]; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  // sum_i a_i P_i
  Matrix reconstruct() const {
    Matrix acc = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) acc += eigenvalues_[i] * projectors_[i];
    return acc;
  }

 private:
  void validate() const {
    if (eigenvalues_.empty() || eigenvalues_.size() != projectors_.size())
      throw DimensionMismatch("SpectralDecomposition: eigenvalue/projector count mismatch");
    const Eigen::Index d = projectors_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
      const Matrix& p = projectors_[i];
      if (p.rows() != d || p.cols() != d)
        throw DimensionMismatch("SpectralDecomposition: projector dimension mismatch");
      if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kDecompositionTol)
        throw NonHermitianInput("SpectralDecomposition: projector not self-adjoint");
      if ((p * p - p).cwiseAbs().maxCoeff() > kDecompositionTol)
        throw Error("SpectralDecomposition: projector not idempotent");
      for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
        if ((p * projectors_[j]).cwiseAbs().maxCoeff() > kDecompositionTol)
          throw Error("SpectralDecomposition: projectors not mutually orthogonal");
      }
      sum += p;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kDecompositionTol)
      throw Error("SpectralDecomposition: projectors do not resolve the identity");
    for (std::size_t i = 1; i < eigenvalues_.size(); ++i)
      if (!(eigenvalues_[i] > eigenvalues_[i - 1]))
        throw Error("SpectralDecomposition: eigenvalues not strictly ascending");
  }

  std::vector<double> eigenvalues_;
  std::vector<Matrix> projectors_;
};

struct MeasurementOutcome {
  double value;            // observed eigenvalue a_i
  StateVector post_state;  // P_i psi / ||P_i psi||, phase-canonicalized
  double probability;      // ||P_i psi||^2
};

inline SpectralDecomposition spectral_decompose(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.entries());
  if (solver.info() != Eigen::Success)
    throw Error("spectral_decompose: eigensolver failed to converge");
  const Eigen::VectorXd vals = solver.eigenvalues();  // ascending
  const Matrix& vecs = solver.eigenvectors();

  const double radius = std::max(std::abs(vals[0]), std::abs(vals[vals.size() - 1]));
  const double gap_tol = kClusterRelTol * radius;

  std::vector<double> eigenvalues;
  std::vector<Matrix> projectors;
  Eigen::Index lo = 0;
  while (lo < vals.size()) {
    Eigen::Index hi = lo + 1;
    while (hi < vals.size() && vals[hi] - vals[hi - 1] <= gap_tol) ++hi;
    const Eigen::Index k = hi - lo;
    const auto block = vecs.middleCols(lo, k);
    projectors.push_back(block * block.adjoint());
    eigenvalues.push_back(vals.segment(lo, k).mean());
    lo = hi;
  }
  return SpectralDecomposition(std::move(eigenvalues), std::move(projectors));
}

// psi(t) = sum_i e^{-i a_i t} P_i psi(0)
inline StateVector evolve(const SpectralDecomposition& hamiltonian, double t,
                          const StateVector& psi0) {
  if (hamiltonian.dim() != psi0.dim())
    throw DimensionMismatch("evolve: operator/state dimension mismatch");
  Vector out = Vector::Zero(psi0.dim());
  for (std::size_t i = 0; i < hamiltonian.size(); ++i) {
    const Complex phase = std::exp(Complex(0.0, -hamiltonian.eigenvalue(i) * t));
    out += phase * (hamiltonian.projector(i) * psi0.amplitudes());
  }
  return StateVector(std::move(out));
}

inline StateVector evolve(const HermitianOperator& hamiltonian, double t,
                          const StateVector& psi0) {
  if (hamiltonian.dim() != psi0.dim())
    throw DimensionMismatch("evolve: operator/state dimension mismatch");
  return evolve(spectral_decompose(hamiltonian), t, psi0);
}

// ||P_i psi||^2 for each eigenvalue, the outcome distribution of a projective
// measurement.
inline std::vector<double> born_probabilities(const StateVector& psi,
                                              const SpectralDecomposition& decomp) {
  if (decomp.dim() != psi.dim())
    throw DimensionMismatch("born_probabilities: dimension mismatch");
  std::vector<double> probs(decomp.size());
  for (std::size_t i = 0; i < decomp.size(); ++i)
    probs[i] = (decomp.projector(i) * psi.amplitudes()).squaredNorm();
  return probs;
}

// Samples an outcome with Born weights and collapses onto its eigenspace.
// A state already inside eigenspace i reproduces itself (up to phase) with
// certainty.
inline MeasurementOutcome measure(const StateVector& psi, const SpectralDecomposition& decomp,
                                  Rng& rng) {
  const std::vector<double> probs = born_probabilities(psi, decomp);
  const double u = rng.uniform();
  std::size_t picked = probs.size() - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) {
      picked = i;
      break;
    }
  }
  Vector collapsed = decomp.projector(picked) * psi.amplitudes();
  const double norm = collapsed.norm();
  if (norm < kCollapseTol)
    throw DegenerateOutcome("measure: sampled projector annihilates the state");
  collapsed = canonical_phase(collapsed / norm);
  return MeasurementOutcome{decomp.eigenvalue(picked), StateVector(std::move(collapsed)),
                            probs[picked]};
}

}  // namespace zitter::core

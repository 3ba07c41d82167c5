#pragma once

// Periodic-grid spectral operations (FFT, derivatives, Helmholtz inverse,
// fractional shifts, Sobolev norms) built on Eigen's bundled FFT.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>

namespace mch {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

class SpectralOps {
 public:
  SpectralOps(double domain_length, Index n);

  double domain_length() const { return length_; }
  Index size() const { return n_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  const ArrayXd& wavenumbers() const { return kappa_; }

  ArrayXcd forward(const ArrayXd& f) const;
  ArrayXd inverse(const ArrayXcd& fhat) const;

  /// Spectral d/dx.
  ArrayXd derivative(const ArrayXd& f, int order = 1) const;
  /// u = (1 - d^2/dx^2)^{-1} m.
  ArrayXd helmholtz_inverse(const ArrayXd& m) const;
  /// f(x - shift) via phase multiplication (any real shift).
  ArrayXd shift(const ArrayXd& f, double shift) const;
  /// Zero all modes with |j| > n/3 (2/3-rule dealiasing).
  void dealias(ArrayXcd& fhat) const;

  /// ||f||_{H^1}^2 = integral of f^2 + f_x^2 over the period (Parseval).
  double h1_norm_sq(const ArrayXd& f) const;
  double l2_norm_sq(const ArrayXd& f) const;

 private:
  double length_;
  Index n_;
  ArrayXd kappa_;
  Eigen::ArrayXi mode_;  // signed mode index
  mutable Eigen::FFT<double> fft_;
};

}  // namespace mch

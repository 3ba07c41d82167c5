#include "mch/fourier.hpp"

#include <numbers>

#include "mch/errors.hpp"

namespace mch {

using Eigen::VectorXcd;
using Eigen::VectorXd;

SpectralOps::SpectralOps(double domain_length, Index n) : length_(domain_length), n_(n) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw validation_error("SpectralOps: grid size must be a power of two >= 4");
  if (!(domain_length > 0)) throw validation_error("SpectralOps: domain length must be positive");
  kappa_.resize(n);
  mode_.resize(n);
  const double dk = 2.0 * std::numbers::pi / length_;
  for (Index j = 0; j < n; ++j) {
    const Index signed_j = (j <= n / 2) ? j : j - n;
    mode_[j] = static_cast<int>(signed_j);
    kappa_[j] = dk * static_cast<double>(signed_j);
  }
}

ArrayXcd SpectralOps::forward(const ArrayXd& f) const {
  VectorXcd out(n_);
  VectorXd in = f.matrix();
  fft_.fwd(out, in);
  return out.array();
}

ArrayXd SpectralOps::inverse(const ArrayXcd& fhat) const {
  VectorXd out(n_);
  VectorXcd in = fhat.matrix();
  fft_.inv(out, in);
  return out.array();
}

ArrayXd SpectralOps::derivative(const ArrayXd& f, int order) const {
  ArrayXcd fh = forward(f);
  const std::complex<double> I(0.0, 1.0);
  for (Index j = 0; j < n_; ++j) {
    std::complex<double> factor(1.0, 0.0);
    for (int p = 0; p < order; ++p) factor *= I * kappa_[j];
    fh[j] *= factor;
  }
  if (order % 2 == 1) fh[n_ / 2] = 0.0;  // Nyquist mode has no well-defined odd derivative
  return inverse(fh);
}

ArrayXd SpectralOps::helmholtz_inverse(const ArrayXd& m) const {
  ArrayXcd mh = forward(m);
  mh /= (1.0 + kappa_ * kappa_).cast<std::complex<double>>();
  return inverse(mh);
}

ArrayXd SpectralOps::shift(const ArrayXd& f, double shift) const {
  ArrayXcd fh = forward(f);
  const std::complex<double> I(0.0, 1.0);
  for (Index j = 0; j < n_; ++j) {
    if (j == n_ / 2) {
      fh[j] *= std::cos(kappa_[j] * shift);  // keep the Nyquist mode real
    } else {
      fh[j] *= std::exp(-I * kappa_[j] * shift);
    }
  }
  return inverse(fh);
}

void SpectralOps::dealias(ArrayXcd& fhat) const {
  const Index cut = n_ / 3;
  for (Index j = 0; j < n_; ++j)
    if (std::abs(mode_[j]) > cut) fhat[j] = 0.0;
}

double SpectralOps::h1_norm_sq(const ArrayXd& f) const {
  ArrayXcd fh = forward(f);
  const double w = dx() / static_cast<double>(n_);
  return w * ((1.0 + kappa_ * kappa_) * fh.abs2()).sum();
}

double SpectralOps::l2_norm_sq(const ArrayXd& f) const {
  ArrayXcd fh = forward(f);
  const double w = dx() / static_cast<double>(n_);
  return w * fh.abs2().sum();
}

}  // namespace mch

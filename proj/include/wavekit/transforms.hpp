#pragma once

#include <stdexcept>

#include "wavekit/tensor.hpp"

namespace wavekit {

/// Raised by ifft2 when the inverse carries an imaginary part above
/// kRealnessTolerance, i.e. the spectrum was not conjugate-symmetric.
class RealnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRealnessTolerance = 1e-8;

/// Per-channel 2D DFT, X[ky,kx] = Σ x[y,x]·exp(-2πi(ky·y/H + kx·x/W)). Unnormalized.
SpectralField fft2(const FeatureField& field);

/// Inverse of fft2 including the 1/(H·W) factor. Returns the real part after
/// checking the imaginary residue against kRealnessTolerance. When
/// `max_imag` is non-null the residue is reported there.
FeatureField ifft2(const SpectralField& spectral, double* max_imag = nullptr);

/// Complex inverse without the realness check (1/(H·W) normalized).
SpectralField ifft2_complex(const SpectralField& spectral);

/// Type-I sine analysis on a Dirichlet interior grid. Coefficient (c, m-1, n-1)
/// is the amplitude A of the mode sin(nπ(x+1)/(W+1))·sin(mπ(y+1)/(H+1)), so that
/// idst2 reconstructs the field as the plain sum of modes. Requires H, W ≥ 2.
FeatureField dst2(const FeatureField& field);

/// Sine synthesis: field = Σ A[m,n]·sin(nπ(x+1)/(W+1))·sin(mπ(y+1)/(H+1)).
FeatureField idst2(const FeatureField& coefficients);

}  // namespace wavekit

#pragma once
// Small radix-2 FFT plus the two spectral boundary operators the Nystrom
// machinery needs on uniform periodic grids: d/dt and the conjugation
// (Hilbert-type) multiplier. Grid sizes are powers of two.

#include <complex>
#include <vector>

namespace vb {

using cd = std::complex<double>;

bool is_pow2(std::size_t n);

// In-place iterative radix-2 FFT; inverse divides by n.
void fft(std::vector<cd>& a, bool inverse);

// Spectral derivative of a real periodic sample vector (period 2*pi).
std::vector<double> spectral_derivative(const std::vector<double>& f);

// Applies the Fourier multiplier -(i/2) sgn(m) (Nyquist and mean zeroed).
// This is the singular part of the boundary trace of the conjugate of a
// double-layer potential on its own curve.
std::vector<double> conjugation_multiplier(const std::vector<double>& f);

// Periodic antiderivative: mean of f must vanish; returns g with g' = f and
// zero mean. Used to integrate zero-mean Neumann data along a curve.
std::vector<double> spectral_antiderivative(const std::vector<double>& f);

}  // namespace vb

#pragma once

#include <vector>

#include "psidolab/common.hpp"

namespace psidolab::fourier {

// In-place forward DFT, sign convention X_k = sum_j x_j e^{-i 2pi jk/M}.
// Radix-2 Cooley-Tukey for power-of-two sizes, direct evaluation otherwise.
void dft(std::vector<Complex>& x);
void idft(std::vector<Complex>& x);  // inverse including the 1/M factor

// Fourier coefficient u_hat(k) = (1/M) sum_j u(x_j) e^{-i k x_j} on the uniform
// grid x_j = 2pi j / M, for integer frequencies k in [-kmax, kmax].
// Indexing of the result: index (k + kmax).
std::vector<Complex> coefficients(const std::vector<Complex>& samples, int kmax);

// Synthesis u(x_j) = sum_k c(k) e^{i k x_j} from coefficients indexed as above.
std::vector<Complex> synthesize(const std::vector<Complex>& coeffs, int kmax, int grid_size);

}  // namespace psidolab::fourier

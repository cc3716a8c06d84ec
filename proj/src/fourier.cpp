#include "psidolab/fourier.hpp"

#include <algorithm>

namespace psidolab::fourier {

namespace {

bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

void fft_pow2(std::vector<Complex>& x, bool inverse) {
    const std::size_t m = x.size();
    // bit reversal
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < m; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = x[i + k];
                Complex v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void dft_direct(std::vector<Complex>& x, bool inverse) {
    const std::size_t m = x.size();
    std::vector<Complex> out(m, Complex(0, 0));
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            const double ang = sgn * kPeriod * static_cast<double>(j * k % m) /
                               static_cast<double>(m);
            out[k] += x[j] * Complex(std::cos(ang), std::sin(ang));
        }
    }
    x = std::move(out);
}

}  // namespace

void dft(std::vector<Complex>& x) {
    if (is_pow2(x.size()))
        fft_pow2(x, false);
    else
        dft_direct(x, false);
}

void idft(std::vector<Complex>& x) {
    if (is_pow2(x.size()))
        fft_pow2(x, true);
    else
        dft_direct(x, true);
    const double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= inv;
}

std::vector<Complex> coefficients(const std::vector<Complex>& samples, int kmax) {
    std::vector<Complex> work = samples;
    dft(work);
    const int m = static_cast<int>(samples.size());
    std::vector<Complex> out(2 * kmax + 1, Complex(0, 0));
    const double inv = 1.0 / static_cast<double>(m);
    for (int k = -kmax; k <= kmax; ++k) {
        int idx = ((k % m) + m) % m;
        out[static_cast<std::size_t>(k + kmax)] = work[static_cast<std::size_t>(idx)] * inv;
    }
    return out;
}

std::vector<Complex> synthesize(const std::vector<Complex>& coeffs, int kmax, int grid_size) {
    std::vector<Complex> work(static_cast<std::size_t>(grid_size), Complex(0, 0));
    for (int k = -kmax; k <= kmax; ++k) {
        int idx = ((k % grid_size) + grid_size) % grid_size;
        work[static_cast<std::size_t>(idx)] += coeffs[static_cast<std::size_t>(k + kmax)];
    }
    idft(work);
    for (auto& v : work) v *= static_cast<double>(grid_size);
    return work;
}

}  // namespace psidolab::fourier

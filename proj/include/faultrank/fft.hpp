#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "faultrank/errors.hpp"

namespace faultrank {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

}  // namespace detail

/// Discrete Fourier transform of arbitrary length. Power-of-two sizes run
/// radix-2 directly; other sizes go through Bluestein's chirp-z reduction.
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> input,
                                             bool inverse = false) {
    const std::size_t n = input.size();
    if (n == 0) throw ParamError("fft: empty input");
    if (detail::is_power_of_two(n)) {
        detail::fft_radix2(input, inverse);
        return input;
    }

    // Bluestein: x_k w^{k^2/2} convolved with the conjugate chirp.
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for long series.
        const std::size_t k2 = (k * k) % (2 * n);
        const double angle = sign * M_PI * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = std::complex<double>(std::cos(angle), std::sin(angle));
    }

    std::vector<std::complex<double>> a(m, 0.0), b(m, 0.0);
    for (std::size_t k = 0; k < n; ++k) a[k] = input[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    detail::fft_radix2(a, false);
    detail::fft_radix2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    detail::fft_radix2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        for (auto& x : out) x /= static_cast<double>(n);
    }
    return out;
}

inline std::vector<std::complex<double>> fft_real(const std::vector<double>& input,
                                                  bool inverse = false) {
    std::vector<std::complex<double>> buf(input.begin(), input.end());
    return fft(std::move(buf), inverse);
}

/// Amplitude spectrum |X_k| of a real series.
inline std::vector<double> amplitude_spectrum(const std::vector<double>& series) {
    auto spec = fft_real(series);
    std::vector<double> amp(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) amp[k] = std::abs(spec[k]);
    return amp;
}

}  // namespace faultrank

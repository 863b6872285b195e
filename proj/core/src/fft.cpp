#include "vortexbodies/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace vb {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= double(n);
    }
}

namespace {

std::vector<cd> forward(const std::vector<double>& f) {
    std::vector<cd> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = cd(f[i], 0.0);
    fft(a, false);
    return a;
}

std::vector<double> backward_real(std::vector<cd>& a) {
    fft(a, true);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

// Signed frequency of bin k for size n (Nyquist mapped to +n/2).
long freq(std::size_t k, std::size_t n) {
    return (k <= n / 2) ? long(k) : long(k) - long(n);
}

}  // namespace

std::vector<double> spectral_derivative(const std::vector<double>& f) {
    const std::size_t n = f.size();
    auto a = forward(f);
    for (std::size_t k = 0; k < n; ++k) {
        const long m = freq(k, n);
        if (std::size_t(std::labs(m)) == n / 2) {
            a[k] = cd(0.0, 0.0);  // drop Nyquist to keep the result real
        } else {
            a[k] *= cd(0.0, double(m));
        }
    }
    return backward_real(a);
}

std::vector<double> conjugation_multiplier(const std::vector<double>& f) {
    const std::size_t n = f.size();
    auto a = forward(f);
    for (std::size_t k = 0; k < n; ++k) {
        const long m = freq(k, n);
        if (m == 0 || std::size_t(std::labs(m)) == n / 2) {
            a[k] = cd(0.0, 0.0);
        } else {
            const double s = (m > 0) ? 1.0 : -1.0;
            a[k] *= cd(0.0, -0.5 * s);
        }
    }
    return backward_real(a);
}

std::vector<double> spectral_antiderivative(const std::vector<double>& f) {
    const std::size_t n = f.size();
    auto a = forward(f);
    for (std::size_t k = 0; k < n; ++k) {
        const long m = freq(k, n);
        if (m == 0 || std::size_t(std::labs(m)) == n / 2) {
            a[k] = cd(0.0, 0.0);
        } else {
            a[k] /= cd(0.0, double(m));
        }
    }
    return backward_real(a);
}

}  // namespace vb

#include "stfilm/fft.hpp"

#include <cmath>
#include <cstddef>

#include "stfilm/errors.hpp"

namespace stfilm::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void transform(std::vector<std::complex<double>>& a, bool invert) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw SimError("fft: size must be a power of two");
    if (n == 1) return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // twiddles computed fresh per call from trig, not by repeated squaring,
    // so rounding stays at the one-ulp level across stages
    std::vector<std::complex<double>> tw(n / 2);
    const double sign = invert ? 1.0 : -1.0;
    for (size_t k = 0; k < n / 2; ++k) {
        const double ang = sign * kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = std::complex<double>(std::cos(ang), std::sin(ang));
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = tw[k * stride];
                const std::complex<double> u = a[i + k];
                const std::complex<double> t = w * a[i + k + len / 2];
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
            }
        }
    }

    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv_n;
    }
}

} // namespace

void forward(std::vector<std::complex<double>>& a) { transform(a, false); }
void inverse(std::vector<std::complex<double>>& a) { transform(a, true); }

} // namespace stfilm::fft

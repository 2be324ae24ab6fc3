#pragma once

// In-place iterative radix-2 complex FFT. Sizes are powers of two (the grid
// guarantees that). Forward transform uses the e^{-2*pi*i*jk/n} convention;
// inverse is normalized by 1/n. Per-call workspace only, safe on any thread.

#include <complex>
#include <vector>

namespace stfilm::fft {

void forward(std::vector<std::complex<double>>& a);
void inverse(std::vector<std::complex<double>>& a);

} // namespace stfilm::fft

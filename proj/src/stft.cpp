#include "rvqtok/stft.hpp"

#include <cmath>

#include "rvqtok/errors.hpp"
#include "rvqtok/kernels.hpp"

namespace rvqtok {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Periodic Hann window.
std::vector<double> hann(int n) {
    std::vector<double> w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(kTwoPi * i / n);
    return w;
}

// Reflect index into [0, len), bouncing as often as needed.
size_t reflect(long long i, size_t len) {
    if (len == 1) return 0;
    const long long period = 2 * static_cast<long long>(len) - 2;
    i %= period;
    if (i < 0) i += period;
    if (i >= static_cast<long long>(len)) i = period - i;
    return static_cast<size_t>(i);
}

void check_args(int fft_size, int hop) {
    if (!is_pow2(fft_size)) throw DimError("stft: fft_size must be a power of two");
    if (hop <= 0 || hop > fft_size) throw DimError("stft: require 0 < hop <= fft_size");
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    if (n <= 1) return;
    if ((n & (n - 1)) != 0) throw DimError("fft: size must be a power of two");

    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t half = 1; half < n; half <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(2 * half);
        const std::complex<double> wstep(std::cos(ang), std::sin(ang));
        for (size_t start = 0; start < n; start += 2 * half) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < half; ++k) {
                std::complex<double> u = a[start + k];
                std::complex<double> v = a[start + k + half] * w;
                a[start + k] = u + v;
                a[start + k + half] = u - v;
                w *= wstep;
            }
        }
    }
}

Spectrogram stft(const std::vector<double>& samples, int fft_size, int hop) {
    check_args(fft_size, hop);
    const size_t len = samples.size();
    const int frames =
        len == 0 ? 1 : static_cast<int>((len + static_cast<size_t>(hop) - 1) / hop);
    const int bins = fft_size / 2 + 1;

    Spectrogram s;
    s.frames = frames;
    s.bins = bins;
    s.fft_size = fft_size;
    s.hop = hop;
    s.re = Matrix(frames, bins);
    s.im = Matrix(frames, bins);
    if (len == 0) return s;

    const std::vector<double> win = hann(fft_size);
    const int half = fft_size / 2;

#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int t = 0; t < frames; ++t) {
        std::vector<std::complex<double>> buf(static_cast<size_t>(fft_size));
        const long long start = static_cast<long long>(t) * hop - half;
        for (int n = 0; n < fft_size; ++n)
            buf[static_cast<size_t>(n)] =
                samples[reflect(start + n, len)] * win[static_cast<size_t>(n)];
        fft_inplace(buf);
        double* re = s.re.row(t);
        double* im = s.im.row(t);
        for (int f = 0; f < bins; ++f) {
            re[f] = buf[static_cast<size_t>(f)].real();
            im[f] = buf[static_cast<size_t>(f)].imag();
        }
    }
    return s;
}

Matrix log_magnitude(const Spectrogram& s, double floor) {
    Matrix out(s.frames, s.bins);
    for (int t = 0; t < s.frames; ++t)
        for (int f = 0; f < s.bins; ++f)
            out(t, f) = std::log(std::max(s.magnitude(t, f), floor));
    return out;
}

std::vector<double> stft_adjoint(const Matrix& grad_re, const Matrix& grad_im, size_t len,
                                 int fft_size, int hop) {
    check_args(fft_size, hop);
    grad_re.require_same_shape(grad_im, "stft_adjoint");
    std::vector<double> gx(len, 0.0);
    if (len == 0) return gx;

    const int frames = grad_re.rows();
    const int bins = grad_re.cols();
    const std::vector<double> win = hann(fft_size);
    const int half = fft_size / 2;

    // Per-frame time-domain contributions in parallel, then a serial
    // scatter so overlapping frames accumulate in a fixed order.
    Matrix contrib(frames, fft_size);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int t = 0; t < frames; ++t) {
        // sum_f g[f] e^{+i 2pi f n / N} = conj(FFT(conj(g)))[n]
        std::vector<std::complex<double>> buf(static_cast<size_t>(fft_size));
        for (int f = 0; f < bins && f < fft_size; ++f)
            buf[static_cast<size_t>(f)] = {grad_re(t, f), -grad_im(t, f)};
        fft_inplace(buf);
        double* row = contrib.row(t);
        for (int n = 0; n < fft_size; ++n)
            row[n] = buf[static_cast<size_t>(n)].real() * win[static_cast<size_t>(n)];
    }
    for (int t = 0; t < frames; ++t) {
        const long long start = static_cast<long long>(t) * hop - half;
        const double* row = contrib.row(t);
        for (int n = 0; n < fft_size; ++n) gx[reflect(start + n, len)] += row[n];
    }
    return gx;
}

}  // namespace rvqtok

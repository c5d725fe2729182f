#include "rvqtok/mel.hpp"

#include <cmath>

namespace rvqtok {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

Matrix mel_filterbank(int bands, int fft_size, int sample_rate) {
    const int bins = fft_size / 2 + 1;
    const double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> centers(static_cast<size_t>(bands) + 2);
    for (int i = 0; i < bands + 2; ++i)
        centers[static_cast<size_t>(i)] = mel_to_hz(mel_max * i / (bands + 1));

    Matrix fb(bands, bins);
    for (int b = 0; b < bands; ++b) {
        const double lo = centers[static_cast<size_t>(b)];
        const double mid = centers[static_cast<size_t>(b) + 1];
        const double hi = centers[static_cast<size_t>(b) + 2];
        for (int f = 0; f < bins; ++f) {
            const double hz = static_cast<double>(f) * sample_rate / fft_size;
            double v = 0.0;
            if (hz > lo && hz < mid)
                v = (hz - lo) / (mid - lo);
            else if (hz >= mid && hz < hi)
                v = (hi - hz) / (hi - mid);
            fb(b, f) = v;
        }
    }
    return fb;
}

Matrix log_mel(const Waveform& w, int bands, int fft_size, int hop) {
    const Spectrogram s = stft(w, fft_size, hop);
    const Matrix fb = mel_filterbank(bands, fft_size, w.sample_rate);
    Matrix out(s.frames, bands);
    for (int t = 0; t < s.frames; ++t) {
        for (int b = 0; b < bands; ++b) {
            double e = 0.0;
            const double* fbr = fb.row(b);
            for (int f = 0; f < s.bins; ++f) {
                if (fbr[f] == 0.0) continue;
                const double re = s.re(t, f), im = s.im(t, f);
                e += fbr[f] * (re * re + im * im);
            }
            out(t, b) = std::log(std::max(e, kMelFloor));
        }
    }
    return out;
}

Matrix dct2_rows(const Matrix& m, int out_coeffs) {
    const int n = m.cols();
    Matrix out(m.rows(), out_coeffs);
    for (int t = 0; t < m.rows(); ++t) {
        const double* x = m.row(t);
        for (int k = 0; k < out_coeffs; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += x[i] * std::cos(M_PI * k * (i + 0.5) / n);
            out(t, k) = s;
        }
    }
    return out;
}

}  // namespace rvqtok

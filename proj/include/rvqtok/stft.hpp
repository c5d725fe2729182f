#pragma once

#include <complex>
#include <vector>

#include "rvqtok/audio.hpp"
#include "rvqtok/matrix.hpp"

namespace rvqtok {

// In-place radix-2 FFT, n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a);

// Hann-windowed, centered short-time Fourier transform. Frame t is
// centered at t*hop in the signal; padding is reflect (bouncing at the
// edges, so arbitrarily short signals still pad). Frame count is
// ceil(len / hop), matching the encoder's stride arithmetic; an empty
// signal yields one zero frame.
struct Spectrogram {
    int frames = 0;
    int bins = 0;  // fft_size / 2 + 1
    int fft_size = 0;
    int hop = 0;
    Matrix re, im;  // frames x bins

    double magnitude(int t, int f) const {
        return std::hypot(re(t, f), im(t, f));
    }
};

Spectrogram stft(const std::vector<double>& samples, int fft_size, int hop);

inline Spectrogram stft(const Waveform& w, int fft_size, int hop) {
    return stft(w.samples, fft_size, hop);
}

// log(max(|X|, floor)) per bin.
Matrix log_magnitude(const Spectrogram& s, double floor);

// Adjoint of the stft map for gradients through magnitude losses: given
// dL/dRe and dL/dIm, accumulates dL/dsample for a signal of length len.
std::vector<double> stft_adjoint(const Matrix& grad_re, const Matrix& grad_im, size_t len,
                                 int fft_size, int hop);

}  // namespace rvqtok

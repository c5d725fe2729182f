#pragma once

#include "rvqtok/audio.hpp"
#include "rvqtok/matrix.hpp"
#include "rvqtok/stft.hpp"

namespace rvqtok {

// Log-mel front end shared by the synthetic teachers and the MCD metric:
// 64 triangular mel bands over power spectra, fft 1024, hop 320.
constexpr int kMelBands = 64;
constexpr int kMelFft = 1024;
constexpr double kMelFloor = 1e-10;

// Triangular filterbank, rows = bands, cols = fft bins.
Matrix mel_filterbank(int bands, int fft_size, int sample_rate);

// T x bands matrix of ln(max(mel_power, floor)).
Matrix log_mel(const Waveform& w, int bands = kMelBands, int fft_size = kMelFft,
               int hop = kHop);

// DCT-II along each row (no orthonormal scaling):
//   out[t][k] = sum_n in[t][n] * cos(pi * k * (n + 0.5) / N)
Matrix dct2_rows(const Matrix& m, int out_coeffs);

}  // namespace rvqtok

#pragma once

#include <string>
#include <vector>

namespace rvqtok {

constexpr int kSampleRate = 16000;
constexpr int kHop = 320;  // 320 samples at 16 kHz -> 50 Hz frame rate

// Mono PCM signal. Samples live in [-1, 1].
struct Waveform {
    int sample_rate = kSampleRate;
    std::vector<double> samples;

    int frame_count() const {
        return static_cast<int>((samples.size() + kHop - 1) / kHop);
    }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// 16-bit PCM mono 16 kHz WAV only; anything else is rejected.
Waveform load_wav(const std::string& path);
void save_wav(const std::string& path, const Waveform& w);

}  // namespace rvqtok

#pragma once

#include <vector>

#include "rvqtok/audio.hpp"

namespace rvqtok {

// Autocorrelation F0 tracker: 25 ms frames every 10 ms, normalized
// cross-correlation peak over lags covering [60, 400] Hz, voicing
// threshold 0.5. Among near-maximal peaks the shortest lag wins, which
// suppresses octave-down errors on harmonic signals.
struct PitchTrack {
    std::vector<double> f0;    // Hz per frame, 0 when unvoiced
    std::vector<bool> voiced;
    int frame_hop = 0;  // samples between frames

    int voiced_count() const {
        int n = 0;
        for (bool v : voiced) n += v ? 1 : 0;
        return n;
    }
};

struct PitchStats {
    double mean_f0 = 0.0;
    double std_f0 = 0.0;
    double voiced_fraction = 0.0;
};

PitchTrack track_pitch(const Waveform& w);
PitchStats pitch_stats(const PitchTrack& t);

}  // namespace rvqtok

#include "rvqtok/pitch.hpp"

#include <cmath>

#include "rvqtok/kernels.hpp"

namespace rvqtok {

namespace {

constexpr double kFrameMs = 25.0;
constexpr double kHopMs = 10.0;
constexpr double kF0Min = 60.0;
constexpr double kF0Max = 400.0;
constexpr double kVoicingThreshold = 0.5;
constexpr double kPeakKeepRatio = 0.85;  // shortest lag within 85% of the best peak wins
constexpr double kEnergyFloor = 1e-8;

}  // namespace

PitchTrack track_pitch(const Waveform& w) {
    const int fs = w.sample_rate;
    const int win = static_cast<int>(fs * kFrameMs / 1000.0);
    const int hop = static_cast<int>(fs * kHopMs / 1000.0);
    const int lag_min = static_cast<int>(fs / kF0Max);
    const int lag_max = static_cast<int>(fs / kF0Min);

    PitchTrack out;
    out.frame_hop = hop;
    const long long usable =
        static_cast<long long>(w.samples.size()) - win - lag_max;
    const int frames = usable >= 0 ? static_cast<int>(usable / hop) + 1 : 0;
    if (frames <= 0) return out;

    out.f0.assign(static_cast<size_t>(frames), 0.0);
    out.voiced.assign(static_cast<size_t>(frames), false);

#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int fr = 0; fr < frames; ++fr) {
        const double* x = w.samples.data() + static_cast<size_t>(fr) * hop;
        double e0 = 0.0;
        for (int n = 0; n < win; ++n) e0 += x[n] * x[n];
        if (e0 < kEnergyFloor) continue;

        std::vector<double> nccf(static_cast<size_t>(lag_max + 1), 0.0);
        for (int lag = lag_min; lag <= lag_max; ++lag) {
            double dot = 0.0, e1 = 0.0;
            for (int n = 0; n < win; ++n) {
                dot += x[n] * x[n + lag];
                e1 += x[n + lag] * x[n + lag];
            }
            nccf[static_cast<size_t>(lag)] =
                e1 > kEnergyFloor ? dot / std::sqrt(e0 * e1) : 0.0;
        }

        double best = 0.0;
        for (int lag = lag_min; lag <= lag_max; ++lag)
            best = std::max(best, nccf[static_cast<size_t>(lag)]);
        if (best < kVoicingThreshold) continue;

        int chosen = 0;
        for (int lag = lag_min; lag <= lag_max; ++lag) {
            const double v = nccf[static_cast<size_t>(lag)];
            const bool local_max =
                (lag == lag_min || v >= nccf[static_cast<size_t>(lag) - 1]) &&
                (lag == lag_max || v >= nccf[static_cast<size_t>(lag) + 1]);
            if (local_max && v >= kPeakKeepRatio * best) {
                chosen = lag;
                break;
            }
        }
        if (chosen == 0) continue;

        // parabolic refinement around the winning lag
        double lag_f = chosen;
        if (chosen > lag_min && chosen < lag_max) {
            const double ym = nccf[static_cast<size_t>(chosen) - 1];
            const double y0 = nccf[static_cast<size_t>(chosen)];
            const double yp = nccf[static_cast<size_t>(chosen) + 1];
            const double denom = ym - 2.0 * y0 + yp;
            if (std::fabs(denom) > 1e-12) {
                double delta = 0.5 * (ym - yp) / denom;
                if (std::fabs(delta) <= 1.0) lag_f += delta;
            }
        }
        out.f0[static_cast<size_t>(fr)] = fs / lag_f;
        out.voiced[static_cast<size_t>(fr)] = true;
    }
    return out;
}

PitchStats pitch_stats(const PitchTrack& t) {
    PitchStats s;
    if (t.f0.empty()) return s;
    int n = 0;
    double sum = 0.0, sum2 = 0.0;
    for (size_t i = 0; i < t.f0.size(); ++i) {
        if (!t.voiced[i]) continue;
        ++n;
        sum += t.f0[i];
        sum2 += t.f0[i] * t.f0[i];
    }
    if (n > 0) {
        s.mean_f0 = sum / n;
        double var = sum2 / n - s.mean_f0 * s.mean_f0;
        s.std_f0 = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    s.voiced_fraction = static_cast<double>(n) / static_cast<double>(t.f0.size());
    return s;
}

}  // namespace rvqtok

#pragma once

#include <vector>

#include "rvqtok/matrix.hpp"
#include "rvqtok/rng.hpp"

namespace rvqtok {

// Single-level vector quantizer. Entries are K x D with K = 2^bits.
// EMA state tracks running assignment counts and sums; entries are always
// ema_sums / max(ema_counts, 1e-5).
struct Codebook {
    int bits = 0;
    Matrix entries;                   // K x D
    std::vector<double> ema_counts;   // K
    Matrix ema_sums;                  // K x D
    std::vector<int> unused_batches;  // consecutive batches without assignments

    int size() const { return entries.rows(); }
    int dim() const { return entries.cols(); }
};

constexpr double kEmaCountFloor = 1e-5;

// Nearest entry per frame, squared Euclidean, ties to the lowest index.
std::vector<int> vq_assign(const Codebook& cb, const Matrix& frames);

// Row lookup. Out-of-range index is an error.
Matrix vq_dequantize(const Codebook& cb, const std::vector<int>& indices);

// k-means++ seeding plus Lloyd iterations, deterministic per seed. Empty
// clusters are re-seeded to the point currently farthest from its
// centroid. K must be a power of two and data must have at least K rows.
// When distortion_out is given it receives the mean squared distance
// after each Lloyd iteration.
Codebook kmeans_init(const Matrix& data, int k, int iters, uint64_t seed,
                     std::vector<double>* distortion_out = nullptr);

// EMA codebook update for one batch of assigned frames.
void ema_update(Codebook& cb, const Matrix& frames, const std::vector<int>& indices,
                double decay);

// Re-seed entries unused for `threshold` consecutive batches to a random
// frame of the current batch. Call after ema_update.
void revive_dead_entries(Codebook& cb, const Matrix& recent_frames, int threshold, Rng& rng);

struct ScalarLossGrad {
    double loss = 0.0;
    Matrix grad;
};

// beta * MSE(frames, stop_gradient(quantized)); gradient flows to frames
// only. The straight-through estimator for decoder gradients lives in the
// training loop, not here.
ScalarLossGrad commitment_loss(const Matrix& frames, const Matrix& quantized, double beta);

}  // namespace rvqtok

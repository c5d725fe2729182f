#include "rvqtok/vq.hpp"

#include <cmath>
#include <limits>

#include "rvqtok/errors.hpp"
#include "rvqtok/kernels.hpp"

namespace rvqtok {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

double sq_dist(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

}  // namespace

std::vector<int> vq_assign(const Codebook& cb, const Matrix& frames) {
    return kernels::nearest_rows(cb.entries, frames);
}

Matrix vq_dequantize(const Codebook& cb, const std::vector<int>& indices) {
    Matrix out(static_cast<int>(indices.size()), cb.dim());
    for (size_t i = 0; i < indices.size(); ++i) {
        int k = indices[i];
        if (k < 0 || k >= cb.size())
            throw DimError("vq_dequantize: index " + std::to_string(k) + " out of range [0," +
                           std::to_string(cb.size()) + ")");
        const double* e = cb.entries.row(k);
        double* o = out.row(static_cast<int>(i));
        for (int j = 0; j < cb.dim(); ++j) o[j] = e[j];
    }
    return out;
}

Codebook kmeans_init(const Matrix& data, int k, int iters, uint64_t seed,
                     std::vector<double>* distortion_out) {
    if (!is_pow2(k)) throw DimError("kmeans_init: K must be a power of two");
    if (data.rows() < k)
        throw DimError("kmeans_init: need at least K=" + std::to_string(k) + " frames, have " +
                       std::to_string(data.rows()));
    const int n = data.rows(), d = data.cols();
    Rng rng(seed, "kmeans");

    Codebook cb;
    cb.bits = log2i(k);
    cb.entries = Matrix(k, d);

    // k-means++ seeding
    std::vector<double> min_d2(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n)));
    for (int j = 0; j < d; ++j) cb.entries(0, j) = data(first, j);
    for (int c = 1; c < k; ++c) {
        const double* prev = cb.entries.row(c - 1);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double d2 = sq_dist(data.row(i), prev, d);
            if (d2 < min_d2[static_cast<size_t>(i)]) min_d2[static_cast<size_t>(i)] = d2;
            total += min_d2[static_cast<size_t>(i)];
        }
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n)));
        } else {
            double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += min_d2[static_cast<size_t>(i)];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        for (int j = 0; j < d; ++j) cb.entries(c, j) = data(pick, j);
    }

    // Lloyd iterations
    std::vector<int> assign;
    for (int it = 0; it < iters; ++it) {
        assign = kernels::nearest_rows(cb.entries, data);
        Matrix sums(k, d);
        std::vector<double> counts(static_cast<size_t>(k), 0.0);
        for (int i = 0; i < n; ++i) {
            const double* x = data.row(i);
            double* s = sums.row(assign[static_cast<size_t>(i)]);
            for (int j = 0; j < d; ++j) s[j] += x[j];
            counts[static_cast<size_t>(assign[static_cast<size_t>(i)])] += 1.0;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] > 0.0) {
                double inv = 1.0 / counts[static_cast<size_t>(c)];
                for (int j = 0; j < d; ++j) cb.entries(c, j) = sums(c, j) * inv;
            } else {
                // farthest point from its current centroid takes over
                double worst = -1.0;
                int worst_i = 0;
                for (int i = 0; i < n; ++i) {
                    double d2 =
                        sq_dist(data.row(i), cb.entries.row(assign[static_cast<size_t>(i)]), d);
                    if (d2 > worst) {
                        worst = d2;
                        worst_i = i;
                    }
                }
                for (int j = 0; j < d; ++j) cb.entries(c, j) = data(worst_i, j);
            }
        }
        if (distortion_out) {
            assign = kernels::nearest_rows(cb.entries, data);
            double dist = 0.0;
            for (int i = 0; i < n; ++i)
                dist += sq_dist(data.row(i), cb.entries.row(assign[static_cast<size_t>(i)]), d);
            distortion_out->push_back(n > 0 ? dist / n : 0.0);
        }
    }

    // EMA state from the final assignment
    assign = kernels::nearest_rows(cb.entries, data);
    cb.ema_counts.assign(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < n; ++i) cb.ema_counts[static_cast<size_t>(assign[static_cast<size_t>(i)])] += 1.0;
    for (int c = 0; c < k; ++c)
        if (cb.ema_counts[static_cast<size_t>(c)] < 1.0) cb.ema_counts[static_cast<size_t>(c)] = 1.0;
    cb.ema_sums = Matrix(k, d);
    for (int c = 0; c < k; ++c)
        for (int j = 0; j < d; ++j)
            cb.ema_sums(c, j) = cb.entries(c, j) * cb.ema_counts[static_cast<size_t>(c)];
    cb.unused_batches.assign(static_cast<size_t>(k), 0);
    return cb;
}

void ema_update(Codebook& cb, const Matrix& frames, const std::vector<int>& indices,
                double decay) {
    if (decay <= 0.0 || decay >= 1.0) throw NumericError("ema_update: decay must be in (0,1)");
    if (frames.rows() != static_cast<int>(indices.size()))
        throw DimError("ema_update: frames/indices length mismatch");
    const int k = cb.size(), d = cb.dim();

    Matrix batch_sums(k, d);
    std::vector<double> batch_counts(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < frames.rows(); ++i) {
        int c = indices[static_cast<size_t>(i)];
        if (c < 0 || c >= k) throw DimError("ema_update: index out of range");
        const double* x = frames.row(i);
        double* s = batch_sums.row(c);
        for (int j = 0; j < d; ++j) s[j] += x[j];
        batch_counts[static_cast<size_t>(c)] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
        cb.ema_counts[static_cast<size_t>(c)] =
            decay * cb.ema_counts[static_cast<size_t>(c)] +
            (1.0 - decay) * batch_counts[static_cast<size_t>(c)];
        double denom = std::max(cb.ema_counts[static_cast<size_t>(c)], kEmaCountFloor);
        for (int j = 0; j < d; ++j) {
            cb.ema_sums(c, j) = decay * cb.ema_sums(c, j) + (1.0 - decay) * batch_sums(c, j);
            cb.entries(c, j) = cb.ema_sums(c, j) / denom;
        }
        if (static_cast<int>(cb.unused_batches.size()) == k) {
            if (batch_counts[static_cast<size_t>(c)] == 0.0)
                ++cb.unused_batches[static_cast<size_t>(c)];
            else
                cb.unused_batches[static_cast<size_t>(c)] = 0;
        }
    }
}

void revive_dead_entries(Codebook& cb, const Matrix& recent_frames, int threshold, Rng& rng) {
    if (recent_frames.rows() == 0) return;
    for (int c = 0; c < cb.size(); ++c) {
        if (cb.unused_batches[static_cast<size_t>(c)] < threshold) continue;
        int pick = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(recent_frames.rows())));
        const double* x = recent_frames.row(pick);
        for (int j = 0; j < cb.dim(); ++j) {
            cb.entries(c, j) = x[j];
            cb.ema_sums(c, j) = x[j];
        }
        cb.ema_counts[static_cast<size_t>(c)] = 1.0;
        cb.unused_batches[static_cast<size_t>(c)] = 0;
    }
}

ScalarLossGrad commitment_loss(const Matrix& frames, const Matrix& quantized, double beta) {
    frames.require_same_shape(quantized, "commitment_loss");
    ScalarLossGrad out;
    out.grad = Matrix(frames.rows(), frames.cols());
    const double n = static_cast<double>(frames.size());
    if (n == 0) return out;
    double acc = 0.0;
    for (size_t i = 0; i < frames.size(); ++i) {
        double diff = frames[i] - quantized[i];
        acc += diff * diff;
        out.grad[i] = beta * 2.0 * diff / n;
    }
    out.loss = beta * acc / n;
    return out;
}

}  // namespace rvqtok

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvqtok/vq.hpp"

namespace rvqtok {

// Residual quantizer stack: level i quantizes the residual left by levels
// 0..i-1. All levels share dim and bits.
struct RvqStack {
    std::vector<Codebook> levels;

    int n_levels() const { return static_cast<int>(levels.size()); }
    int dim() const { return levels.empty() ? 0 : levels.front().dim(); }
    int bits() const { return levels.empty() ? 0 : levels.front().bits; }
    void validate() const;
};

// Per-frame, per-level token indices plus enough header to decode.
struct TokenStream {
    int sample_rate = 16000;
    int hop = 320;
    int levels_used = 0;
    int bits = 0;
    int frames = 0;
    std::vector<uint32_t> indices;  // frame-major: (t0,l0), (t0,l1), ...

    uint32_t at(int t, int l) const {
        return indices[static_cast<size_t>(t) * levels_used + l];
    }
    uint32_t& at(int t, int l) {
        return indices[static_cast<size_t>(t) * levels_used + l];
    }
    double frame_rate() const { return static_cast<double>(sample_rate) / hop; }
    double tokens_per_second() const { return frame_rate() * levels_used; }
    double bandwidth_bps() const { return frame_rate() * levels_used * bits; }
};

struct RvqEncodeResult {
    TokenStream tokens;
    Matrix quantized_sum;                 // sum of the used levels' codewords
    Matrix final_residual;                // z_{levels_used}
    std::vector<Matrix> level_quantized;  // codeword frames per level
    std::vector<Matrix> level_inputs;     // residual fed into each level
};

RvqEncodeResult rvq_encode(const RvqStack& stack, const Matrix& z0, int levels_used);
Matrix rvq_decode(const RvqStack& stack, const TokenStream& tokens);

// Sum of the first `levels` codewords of an already-encoded stream.
Matrix rvq_decode_levels(const RvqStack& stack, const TokenStream& tokens, int levels);

// Uniform draw from {1..levels_total}; training-time bandwidth dropout.
int quantizer_dropout(int levels_total, Rng& rng);

// RVQB bitstream, bit-exact:
//   "RVQB" | u8 version=1 | u32 LE sample_rate | u32 LE hop |
//   u8 levels_used | u8 bits | u32 LE frames | payload
// Payload is frame-major then level-major, each index written MSB-first
// in `bits` bits, zero-padded to a byte boundary.
std::string pack_bitstream(const TokenStream& tokens);
TokenStream unpack_bitstream(const std::string& bytes);

// Keep only the first `levels` levels of a stream.
TokenStream filter_levels(const TokenStream& tokens, int levels);

}  // namespace rvqtok

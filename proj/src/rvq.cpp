#include "rvqtok/rvq.hpp"

#include <cstring>

#include "rvqtok/errors.hpp"

namespace rvqtok {

void RvqStack::validate() const {
    if (levels.empty() || levels.size() > 255)
        throw DimError("RvqStack: need 1..255 levels, have " + std::to_string(levels.size()));
    for (const Codebook& cb : levels)
        if (cb.dim() != dim() || cb.bits != bits())
            throw DimError("RvqStack: levels disagree on dim or bits");
}

RvqEncodeResult rvq_encode(const RvqStack& stack, const Matrix& z0, int levels_used) {
    stack.validate();
    if (levels_used < 1 || levels_used > stack.n_levels())
        throw DimError("rvq_encode: levels_used " + std::to_string(levels_used) +
                       " out of range [1," + std::to_string(stack.n_levels()) + "]");
    if (z0.cols() != stack.dim())
        throw DimError("rvq_encode: frame dim " + std::to_string(z0.cols()) +
                       " != stack dim " + std::to_string(stack.dim()));

    RvqEncodeResult res;
    res.tokens.levels_used = levels_used;
    res.tokens.bits = stack.bits();
    res.tokens.frames = z0.rows();
    res.tokens.indices.resize(static_cast<size_t>(z0.rows()) * levels_used);
    res.quantized_sum = Matrix(z0.rows(), z0.cols());
    res.level_quantized.reserve(static_cast<size_t>(levels_used));
    res.level_inputs.reserve(static_cast<size_t>(levels_used));

    Matrix residual = z0;
    for (int l = 0; l < levels_used; ++l) {
        const Codebook& cb = stack.levels[static_cast<size_t>(l)];
        std::vector<int> idx = vq_assign(cb, residual);
        Matrix q = vq_dequantize(cb, idx);
        for (int t = 0; t < z0.rows(); ++t)
            res.tokens.at(t, l) = static_cast<uint32_t>(idx[static_cast<size_t>(t)]);
        res.quantized_sum += q;
        res.level_inputs.push_back(residual);
        residual -= q;
        res.level_quantized.push_back(std::move(q));
    }
    res.final_residual = std::move(residual);
    return res;
}

Matrix rvq_decode(const RvqStack& stack, const TokenStream& tokens) {
    return rvq_decode_levels(stack, tokens, tokens.levels_used);
}

Matrix rvq_decode_levels(const RvqStack& stack, const TokenStream& tokens, int levels) {
    stack.validate();
    if (levels < 1 || levels > tokens.levels_used || levels > stack.n_levels())
        throw DimError("rvq_decode: level count out of range");
    Matrix sum(tokens.frames, stack.dim());
    std::vector<int> idx(static_cast<size_t>(tokens.frames));
    for (int l = 0; l < levels; ++l) {
        for (int t = 0; t < tokens.frames; ++t)
            idx[static_cast<size_t>(t)] = static_cast<int>(tokens.at(t, l));
        sum += vq_dequantize(stack.levels[static_cast<size_t>(l)], idx);
    }
    return sum;
}

int quantizer_dropout(int levels_total, Rng& rng) {
    if (levels_total < 1) throw DimError("quantizer_dropout: levels_total must be >= 1");
    return 1 + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(levels_total)));
}

namespace {

constexpr char kMagic[4] = {'R', 'V', 'Q', 'B'};
constexpr size_t kHeaderSize = 19;

void put_u32le(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

std::string pack_bitstream(const TokenStream& tokens) {
    if (tokens.levels_used < 1 || tokens.levels_used > 255)
        throw FormatError("pack_bitstream: levels_used out of range 1..255");
    if (tokens.bits < 1 || tokens.bits > 30)
        throw FormatError("pack_bitstream: bits out of range 1..30");
    if (tokens.indices.size() !=
        static_cast<size_t>(tokens.frames) * static_cast<size_t>(tokens.levels_used))
        throw FormatError("pack_bitstream: index count does not match frames x levels");
    const uint32_t limit = 1u << tokens.bits;
    for (uint32_t v : tokens.indices)
        if (v >= limit)
            throw FormatError("pack_bitstream: index " + std::to_string(v) + " >= 2^" +
                              std::to_string(tokens.bits));

    std::string out;
    out.append(kMagic, 4);
    out.push_back(1);  // version
    put_u32le(out, static_cast<uint32_t>(tokens.sample_rate));
    put_u32le(out, static_cast<uint32_t>(tokens.hop));
    out.push_back(static_cast<char>(tokens.levels_used));
    out.push_back(static_cast<char>(tokens.bits));
    put_u32le(out, static_cast<uint32_t>(tokens.frames));

    // MSB-first bit writer
    uint64_t acc = 0;
    int nbits = 0;
    for (uint32_t v : tokens.indices) {
        acc = (acc << tokens.bits) | v;
        nbits += tokens.bits;
        while (nbits >= 8) {
            nbits -= 8;
            out.push_back(static_cast<char>((acc >> nbits) & 0xff));
        }
        acc &= (1ull << nbits) - 1;
    }
    if (nbits > 0) out.push_back(static_cast<char>((acc << (8 - nbits)) & 0xff));
    return out;
}

TokenStream unpack_bitstream(const std::string& bytes) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < kHeaderSize)
        throw FormatError("bitstream: truncated header (need 19 bytes, have " +
                          std::to_string(bytes.size()) + ")");
    if (std::memcmp(p, kMagic, 4) != 0)
        throw FormatError("bitstream: bad magic, expected \"RVQB\"");
    if (p[4] != 1)
        throw FormatError("bitstream: unsupported version " + std::to_string(p[4]));

    TokenStream t;
    t.sample_rate = static_cast<int>(get_u32le(p + 5));
    t.hop = static_cast<int>(get_u32le(p + 9));
    t.levels_used = p[13];
    t.bits = p[14];
    t.frames = static_cast<int>(get_u32le(p + 15));
    if (t.levels_used < 1) throw FormatError("bitstream: levels_used must be >= 1");
    if (t.bits < 1 || t.bits > 30) throw FormatError("bitstream: bits out of range 1..30");
    if (t.hop <= 0 || t.sample_rate <= 0)
        throw FormatError("bitstream: nonpositive sample_rate or hop");

    const uint64_t payload_bits = static_cast<uint64_t>(t.frames) * t.levels_used * t.bits;
    const size_t expected = kHeaderSize + static_cast<size_t>((payload_bits + 7) / 8);
    if (bytes.size() != expected)
        throw FormatError("bitstream: declared " + std::to_string(t.frames) +
                          " frames but file has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(expected));

    t.indices.resize(static_cast<size_t>(t.frames) * t.levels_used);
    uint64_t acc = 0;
    int nbits = 0;
    size_t pos = kHeaderSize;
    for (uint32_t& v : t.indices) {
        while (nbits < t.bits) {
            acc = (acc << 8) | p[pos++];
            nbits += 8;
        }
        nbits -= t.bits;
        v = static_cast<uint32_t>((acc >> nbits) & ((1u << t.bits) - 1));
    }
    return t;
}

TokenStream filter_levels(const TokenStream& tokens, int levels) {
    if (levels < 1 || levels > tokens.levels_used)
        throw DimError("filter_levels: level count out of range");
    TokenStream out = tokens;
    out.levels_used = levels;
    out.indices.resize(static_cast<size_t>(tokens.frames) * levels);
    for (int t = 0; t < tokens.frames; ++t)
        for (int l = 0; l < levels; ++l) out.at(t, l) = tokens.at(t, l);
    return out;
}

}  // namespace rvqtok

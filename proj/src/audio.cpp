#include "rvqtok/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rvqtok/errors.hpp"

namespace rvqtok {

namespace {

uint32_t get_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t get_u16le(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
void put_u32le(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16le(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

    if (bytes.size() < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw FormatError(path + ": not a RIFF/WAVE file");

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    size_t pos = 12;
    Waveform w;
    while (pos + 8 <= bytes.size()) {
        const char* id = bytes.data() + pos;
        uint32_t chunk_len = get_u32le(p + pos + 4);
        size_t body = pos + 8;
        if (body + chunk_len > bytes.size())
            throw FormatError(path + ": truncated chunk at offset " + std::to_string(pos));
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw FormatError(path + ": fmt chunk too short");
            format = get_u16le(p + body);
            channels = get_u16le(p + body + 2);
            rate = get_u32le(p + body + 4);
            bits = get_u16le(p + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (!have_fmt) throw FormatError(path + ": data chunk before fmt chunk");
            if (format != 1) throw FormatError(path + ": only PCM (format 1) supported");
            if (channels != 1) throw FormatError(path + ": only mono supported, file has " +
                                                 std::to_string(channels) + " channels");
            if (bits != 16) throw FormatError(path + ": only 16-bit samples supported");
            if (rate != static_cast<uint32_t>(kSampleRate))
                throw FormatError(path + ": only 16 kHz supported, file is " +
                                  std::to_string(rate) + " Hz");
            size_t n = chunk_len / 2;
            w.sample_rate = static_cast<int>(rate);
            w.samples.resize(n);
            for (size_t i = 0; i < n; ++i) {
                int16_t s = static_cast<int16_t>(get_u16le(p + body + 2 * i));
                w.samples[i] = static_cast<double>(s) / 32768.0;
            }
            return w;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }
    throw FormatError(path + ": no data chunk found");
}

void save_wav(const std::string& path, const Waveform& w) {
    if (w.sample_rate != kSampleRate)
        throw FormatError(path + ": only 16 kHz output supported");
    const uint32_t n = static_cast<uint32_t>(w.samples.size());
    std::string bytes;
    bytes.reserve(44 + 2 * n);
    bytes.append("RIFF", 4);
    put_u32le(bytes, 36 + 2 * n);
    bytes.append("WAVE", 4);
    bytes.append("fmt ", 4);
    put_u32le(bytes, 16);
    put_u16le(bytes, 1);  // PCM
    put_u16le(bytes, 1);  // mono
    put_u32le(bytes, static_cast<uint32_t>(w.sample_rate));
    put_u32le(bytes, static_cast<uint32_t>(w.sample_rate) * 2);
    put_u16le(bytes, 2);   // block align
    put_u16le(bytes, 16);  // bits per sample
    bytes.append("data", 4);
    put_u32le(bytes, 2 * n);
    for (double s : w.samples) {
        double c = std::clamp(s, -1.0, 1.0);
        int v = static_cast<int>(std::lround(c * 32767.0));
        put_u16le(bytes, static_cast<uint16_t>(static_cast<int16_t>(v)));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace rvqtok

#include "rvqtok/tensor_io.hpp"

#include <cstring>
#include <fstream>

#include "rvqtok/errors.hpp"

namespace rvqtok {

namespace {

constexpr char kMagic[4] = {'F', 'T', 'Z', '1'};
constexpr uint64_t kMaxElements = 1ull << 31;

void put_u32le(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path);
    return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace

TensorData load_tensor(const std::string& path) {
    const std::string bytes = read_file(path);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 5)
        throw FormatError(path + ": truncated header at offset 0 (need 5 bytes, have " +
                          std::to_string(bytes.size()) + ")");
    if (std::memcmp(p, kMagic, 4) != 0)
        throw FormatError(path + ": bad magic at offset 0, expected \"FTZ1\"");
    const uint32_t rank = p[4];
    const size_t dims_end = 5 + 4 * static_cast<size_t>(rank);
    if (bytes.size() < dims_end)
        throw FormatError(path + ": truncated dims at offset 5 (rank " +
                          std::to_string(rank) + ")");

    TensorData t;
    uint64_t count = 1;
    for (uint32_t r = 0; r < rank; ++r) {
        uint32_t d = get_u32le(p + 5 + 4 * r);
        t.dims.push_back(d);
        count *= d;
        if (count > kMaxElements)
            throw FormatError(path + ": dim overflow at offset " + std::to_string(5 + 4 * r) +
                              " (element count exceeds 2^31)");
    }
    const size_t expected = dims_end + 4 * count;
    if (bytes.size() != expected)
        throw FormatError(path + ": payload size mismatch at offset " +
                          std::to_string(dims_end) + " (expected " + std::to_string(expected) +
                          " bytes total, have " + std::to_string(bytes.size()) + ")");

    t.values.resize(count);
    if (count > 0) std::memcpy(t.values.data(), p + dims_end, 4 * count);
    return t;
}

void save_tensor(const std::string& path, const TensorData& t) {
    if (t.dims.size() > 255) throw FormatError(path + ": rank exceeds 255");
    uint64_t count = 1;
    for (uint32_t d : t.dims) {
        count *= d;
        if (count > kMaxElements) throw FormatError(path + ": dim overflow on save");
    }
    if (count != t.values.size())
        throw FormatError(path + ": dims declare " + std::to_string(count) +
                          " values, payload has " + std::to_string(t.values.size()));

    std::string bytes;
    bytes.reserve(5 + 4 * t.dims.size() + 4 * t.values.size());
    bytes.append(kMagic, 4);
    bytes.push_back(static_cast<char>(t.dims.size()));
    for (uint32_t d : t.dims) put_u32le(bytes, d);
    const size_t payload_at = bytes.size();
    bytes.resize(payload_at + 4 * t.values.size());
    if (!t.values.empty())
        std::memcpy(bytes.data() + payload_at, t.values.data(), 4 * t.values.size());
    write_file(path, bytes);
}

Matrix load_matrix(const std::string& path) {
    TensorData t = load_tensor(path);
    int rows, cols;
    if (t.dims.size() == 2) {
        rows = static_cast<int>(t.dims[0]);
        cols = static_cast<int>(t.dims[1]);
    } else if (t.dims.size() == 1) {
        rows = 1;
        cols = static_cast<int>(t.dims[0]);
    } else {
        throw FormatError(path + ": expected rank 1 or 2 tensor, got rank " +
                          std::to_string(t.dims.size()));
    }
    Matrix m(rows, cols);
    for (size_t k = 0; k < t.values.size(); ++k) m[k] = static_cast<double>(t.values[k]);
    return m;
}

void save_matrix(const std::string& path, const Matrix& m) {
    TensorData t;
    t.dims = {static_cast<uint32_t>(m.rows()), static_cast<uint32_t>(m.cols())};
    t.values.resize(m.size());
    for (size_t k = 0; k < m.size(); ++k) t.values[k] = static_cast<float>(m[k]);
    save_tensor(path, t);
}

std::vector<double> load_vector(const std::string& path) {
    TensorData t = load_tensor(path);
    if (t.dims.size() != 1)
        throw FormatError(path + ": expected rank 1 tensor, got rank " +
                          std::to_string(t.dims.size()));
    return std::vector<double>(t.values.begin(), t.values.end());
}

void save_vector(const std::string& path, const std::vector<double>& v) {
    TensorData t;
    t.dims = {static_cast<uint32_t>(v.size())};
    t.values.assign(v.begin(), v.end());
    save_tensor(path, t);
}

}  // namespace rvqtok

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvqtok/matrix.hpp"

namespace rvqtok {

// FTZ1 tensor file, bit-exact:
//   magic "FTZ1" | u8 rank | rank x u32 LE dims | row-major f32 LE payload
// Total size must equal 5 + 4*rank + 4*prod(dims).
struct TensorData {
    std::vector<uint32_t> dims;
    std::vector<float> values;
};

TensorData load_tensor(const std::string& path);
void save_tensor(const std::string& path, const TensorData& t);

// Matrix adapters: rank-2 on disk, doubles in memory (values round to f32
// on save). A 1 x N matrix can also be saved/loaded as a rank-1 tensor.
Matrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& m);
std::vector<double> load_vector(const std::string& path);
void save_vector(const std::string& path, const std::vector<double>& v);

}  // namespace rvqtok

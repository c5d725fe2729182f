#include "rvqtok/matrix.hpp"

#include <cmath>

namespace rvqtok {

bool Matrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

void Matrix::require_finite(const std::string& what) const {
    for (size_t k = 0; k < data_.size(); ++k) {
        if (!std::isfinite(data_[k])) {
            int i = cols_ ? static_cast<int>(k) / cols_ : 0;
            int j = cols_ ? static_cast<int>(k) % cols_ : 0;
            throw NumericError(what + ": non-finite value at [" + std::to_string(i) + "," +
                               std::to_string(j) + "]");
        }
    }
}

}  // namespace rvqtok

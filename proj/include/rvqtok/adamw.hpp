#pragma once

#include <vector>

#include "rvqtok/modules.hpp"

namespace rvqtok {

struct AdamWConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.0;
    double eps = 1e-8;
};

struct AdamWState {
    Matrix m;  // first moment
    Matrix v;  // second moment
};

// One decoupled-weight-decay AdamW update with bias correction. `step`
// is the 1-based update count used for the correction terms.
void adamw_step(Matrix& param, const Matrix& grad, AdamWState& state,
                const AdamWConfig& cfg, long step);

// Convenience wrapper owning per-parameter state for a fixed module set.
class AdamW {
public:
    AdamW(std::vector<Param*> params, AdamWConfig cfg);

    void step();
    long steps_taken() const { return step_; }

private:
    std::vector<Param*> params_;
    std::vector<AdamWState> states_;
    AdamWConfig cfg_;
    long step_ = 0;
};

}  // namespace rvqtok

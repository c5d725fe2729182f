#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rvqtok/matrix.hpp"

namespace rvqtok {

// Row-wise softmax with per-row max subtraction. Empty input passes through.
Matrix softmax_rows(const Matrix& m);
// Backward of softmax_rows: given y = softmax_rows(x) and dL/dy, returns dL/dx.
Matrix softmax_rows_backward(const Matrix& y, const Matrix& grad_y);

struct Param {
    std::string name;
    Matrix value;
    Matrix grad;

    Param() = default;
    Param(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)) {
        grad = Matrix(value.rows(), value.cols());
    }
};

// Contract for every trainable/gradient-checked block. Gradients are
// analytic per module; the training loop fixes the composition order.
// forward must be pure given fixed parameters; backward may use state
// cached by the most recent forward. Parameter gradients ACCUMULATE
// across backward calls until zero_grads().
class DiffModule {
public:
    virtual ~DiffModule() = default;

    virtual std::string name() const = 0;
    virtual size_t input_count() const { return 1; }
    virtual size_t output_count() const { return 1; }

    virtual std::vector<Matrix> forward(const std::vector<Matrix>& inputs) = 0;
    // One grad matrix per output; returns one grad matrix per input.
    virtual std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) = 0;

    virtual std::vector<Param*> params() { return {}; }

    void zero_grads() {
        for (Param* p : params()) p->grad.fill(0.0);
    }
};

// y = x * W + b, x is T x in_dim.
class Linear : public DiffModule {
public:
    Linear(int in_dim, int out_dim, Rng& rng, double init_std = -1.0);

    std::string name() const override { return "linear"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;
    std::vector<Param*> params() override { return {&w_, &b_}; }

    Param& weight() { return w_; }
    Param& bias() { return b_; }

private:
    Param w_, b_;
    Matrix cached_input_;
};

// Strided 1-D convolution over time-major input (T x in_ch).
// Output frame count is ceil(T / stride); the window for output t starts
// at t*stride - pad_left, out-of-range taps read zero.
class Conv1d : public DiffModule {
public:
    Conv1d(int in_ch, int out_ch, int kernel, int stride, Rng& rng);

    std::string name() const override { return "conv1d"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;
    std::vector<Param*> params() override { return {&w_, &b_}; }

    static int out_frames(int in_frames, int stride) {
        return (in_frames + stride - 1) / stride;
    }

    int in_ch() const { return in_ch_; }
    int out_ch() const { return out_ch_; }
    int kernel() const { return kernel_; }
    int stride() const { return stride_; }
    int pad_left() const { return pad_left_; }
    Param& weight() { return w_; }
    Param& bias() { return b_; }

private:
    int in_ch_, out_ch_, kernel_, stride_, pad_left_;
    Param w_;  // (kernel * in_ch) x out_ch
    Param b_;  // 1 x out_ch
    Matrix cached_input_;
};

// Transposed counterpart of Conv1d: upsamples T x in_ch to (T*stride) x out_ch.
// Forward is the adjoint of the matching Conv1d input map, so the pair
// inverts the frame-count arithmetic exactly.
class TransposedConv1d : public DiffModule {
public:
    TransposedConv1d(int in_ch, int out_ch, int kernel, int stride, Rng& rng);

    std::string name() const override { return "tconv1d"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;
    std::vector<Param*> params() override { return {&w_, &b_}; }

    int in_ch() const { return in_ch_; }
    int out_ch() const { return out_ch_; }
    Param& weight() { return w_; }
    Param& bias() { return b_; }

private:
    int in_ch_, out_ch_, kernel_, stride_, pad_left_;
    Param w_;  // (kernel * in_ch) x out_ch
    Param b_;  // 1 x out_ch
    Matrix cached_input_;
};

// ELU with alpha = 1.
class Elu : public DiffModule {
public:
    std::string name() const override { return "elu"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;

private:
    Matrix cached_input_;
};

class Softmax : public DiffModule {
public:
    std::string name() const override { return "softmax"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;

private:
    Matrix cached_output_;
};

}  // namespace rvqtok

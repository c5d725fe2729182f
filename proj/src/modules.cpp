#include "rvqtok/modules.hpp"

#include <cmath>

#include "rvqtok/kernels.hpp"

namespace rvqtok {

Matrix softmax_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int i = 0; i < m.rows(); ++i) {
        const double* x = m.row(i);
        double* y = out.row(i);
        double mx = -HUGE_VAL;
        for (int j = 0; j < m.cols(); ++j) mx = std::max(mx, x[j]);
        double sum = 0.0;
        for (int j = 0; j < m.cols(); ++j) {
            y[j] = std::exp(x[j] - mx);
            sum += y[j];
        }
        for (int j = 0; j < m.cols(); ++j) y[j] /= sum;
    }
    return out;
}

Matrix softmax_rows_backward(const Matrix& y, const Matrix& grad_y) {
    y.require_same_shape(grad_y, "softmax_rows_backward");
    Matrix gx(y.rows(), y.cols());
    for (int i = 0; i < y.rows(); ++i) {
        const double* yi = y.row(i);
        const double* gi = grad_y.row(i);
        double dot = 0.0;
        for (int j = 0; j < y.cols(); ++j) dot += yi[j] * gi[j];
        double* out = gx.row(i);
        for (int j = 0; j < y.cols(); ++j) out[j] = yi[j] * (gi[j] - dot);
    }
    return gx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(int in_dim, int out_dim, Rng& rng, double init_std) {
    if (init_std < 0.0) init_std = 1.0 / std::sqrt(static_cast<double>(in_dim));
    w_ = Param("w", Matrix::randn(in_dim, out_dim, rng, init_std));
    b_ = Param("b", Matrix(1, out_dim));
}

std::vector<Matrix> Linear::forward(const std::vector<Matrix>& inputs) {
    const Matrix& x = inputs.at(0);
    cached_input_ = x;
    Matrix y = kernels::matmul(x, w_.value);
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) y(i, j) += b_.value(0, j);
    return {std::move(y)};
}

std::vector<Matrix> Linear::backward(const std::vector<Matrix>& grad_outputs) {
    const Matrix& gy = grad_outputs.at(0);
    w_.grad += kernels::matmul_ta(cached_input_, gy);
    for (int i = 0; i < gy.rows(); ++i)
        for (int j = 0; j < gy.cols(); ++j) b_.grad(0, j) += gy(i, j);
    return {kernels::matmul_tb(gy, w_.value)};
}

// ---------------------------------------------------------------- Conv1d

// Shared index map: output frame t, tap j reads padded input t*stride + j - pad_left.
// pad_left = (kernel - stride) / 2 keeps windows roughly centered.

Conv1d::Conv1d(int in_ch, int out_ch, int kernel, int stride, Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride),
      pad_left_((kernel - stride) / 2) {
    double init_std = 1.0 / std::sqrt(static_cast<double>(kernel * in_ch));
    w_ = Param("w", Matrix::randn(kernel * in_ch, out_ch, rng, init_std));
    b_ = Param("b", Matrix(1, out_ch));
}

std::vector<Matrix> Conv1d::forward(const std::vector<Matrix>& inputs) {
    const Matrix& x = inputs.at(0);
    if (x.cols() != in_ch_)
        throw DimError("conv1d: expected " + std::to_string(in_ch_) + " channels, got " +
                       x.shape_str());
    cached_input_ = x;
    const int t_in = x.rows();
    const int t_out = out_frames(t_in, stride_);
    Matrix y(t_out, out_ch_);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int t = 0; t < t_out; ++t) {
        double* yt = y.row(t);
        for (int co = 0; co < out_ch_; ++co) yt[co] = b_.value(0, co);
        for (int j = 0; j < kernel_; ++j) {
            int u = t * stride_ + j - pad_left_;
            if (u < 0 || u >= t_in) continue;
            const double* xu = x.row(u);
            const int wrow = j * in_ch_;
            for (int ci = 0; ci < in_ch_; ++ci) {
                const double xv = xu[ci];
                const double* wr = w_.value.row(wrow + ci);
                for (int co = 0; co < out_ch_; ++co) yt[co] += xv * wr[co];
            }
        }
    }
    return {std::move(y)};
}

std::vector<Matrix> Conv1d::backward(const std::vector<Matrix>& grad_outputs) {
    const Matrix& gy = grad_outputs.at(0);
    const Matrix& x = cached_input_;
    const int t_in = x.rows();
    const int t_out = gy.rows();

    // weight/bias grads: parallel over taps, each (j, ci) row owned by one thread
#pragma omp parallel for num_threads(worker_threads()) schedule(static) collapse(2)
    for (int j = 0; j < kernel_; ++j) {
        for (int ci = 0; ci < in_ch_; ++ci) {
            double* wg = w_.grad.row(j * in_ch_ + ci);
            for (int t = 0; t < t_out; ++t) {
                int u = t * stride_ + j - pad_left_;
                if (u < 0 || u >= t_in) continue;
                const double xv = x(u, ci);
                const double* gt = gy.row(t);
                for (int co = 0; co < out_ch_; ++co) wg[co] += xv * gt[co];
            }
        }
    }
    for (int t = 0; t < t_out; ++t)
        for (int co = 0; co < out_ch_; ++co) b_.grad(0, co) += gy(t, co);

    // input grad: parallel over input frames
    Matrix gx(t_in, in_ch_);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int u = 0; u < t_in; ++u) {
        double* gu = gx.row(u);
        // taps (t, j) with t*stride + j - pad_left == u
        int t_lo = (u + pad_left_ - kernel_ + 1 + stride_ - 1);
        t_lo = t_lo > 0 ? t_lo / stride_ : 0;
        for (int t = t_lo; t <= (u + pad_left_) / stride_ && t < t_out; ++t) {
            int j = u + pad_left_ - t * stride_;
            if (j < 0 || j >= kernel_) continue;
            const double* gt = gy.row(t);
            for (int ci = 0; ci < in_ch_; ++ci) {
                const double* wr = w_.value.row(j * in_ch_ + ci);
                double s = 0.0;
                for (int co = 0; co < out_ch_; ++co) s += wr[co] * gt[co];
                gu[ci] += s;
            }
        }
    }
    return {std::move(gx)};
}

// ------------------------------------------------------- TransposedConv1d

TransposedConv1d::TransposedConv1d(int in_ch, int out_ch, int kernel, int stride, Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride),
      pad_left_((kernel - stride) / 2) {
    double init_std = 1.0 / std::sqrt(static_cast<double>(kernel * in_ch) / stride);
    w_ = Param("w", Matrix::randn(kernel * in_ch, out_ch, rng, init_std));
    b_ = Param("b", Matrix(1, out_ch));
}

std::vector<Matrix> TransposedConv1d::forward(const std::vector<Matrix>& inputs) {
    const Matrix& x = inputs.at(0);
    if (x.cols() != in_ch_)
        throw DimError("tconv1d: expected " + std::to_string(in_ch_) + " channels, got " +
                       x.shape_str());
    cached_input_ = x;
    const int t_in = x.rows();
    const int t_out = t_in * stride_;
    Matrix y(t_out, out_ch_);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int u = 0; u < t_out; ++u) {
        double* yu = y.row(u);
        for (int co = 0; co < out_ch_; ++co) yu[co] = b_.value(0, co);
        int t_lo = (u + pad_left_ - kernel_ + 1 + stride_ - 1);
        t_lo = t_lo > 0 ? t_lo / stride_ : 0;
        for (int t = t_lo; t <= (u + pad_left_) / stride_ && t < t_in; ++t) {
            int j = u + pad_left_ - t * stride_;
            if (j < 0 || j >= kernel_) continue;
            const double* xt = x.row(t);
            for (int ci = 0; ci < in_ch_; ++ci) {
                const double* wr = w_.value.row(j * in_ch_ + ci);
                const double xv = xt[ci];
                for (int co = 0; co < out_ch_; ++co) yu[co] += xv * wr[co];
            }
        }
    }
    return {std::move(y)};
}

std::vector<Matrix> TransposedConv1d::backward(const std::vector<Matrix>& grad_outputs) {
    const Matrix& gy = grad_outputs.at(0);
    const Matrix& x = cached_input_;
    const int t_in = x.rows();
    const int t_out = gy.rows();

#pragma omp parallel for num_threads(worker_threads()) schedule(static) collapse(2)
    for (int j = 0; j < kernel_; ++j) {
        for (int ci = 0; ci < in_ch_; ++ci) {
            double* wg = w_.grad.row(j * in_ch_ + ci);
            for (int t = 0; t < t_in; ++t) {
                int u = t * stride_ + j - pad_left_;
                if (u < 0 || u >= t_out) continue;
                const double xv = x(t, ci);
                const double* gu = gy.row(u);
                for (int co = 0; co < out_ch_; ++co) wg[co] += xv * gu[co];
            }
        }
    }
    for (int u = 0; u < t_out; ++u)
        for (int co = 0; co < out_ch_; ++co) b_.grad(0, co) += gy(u, co);

    Matrix gx(t_in, in_ch_);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int t = 0; t < t_in; ++t) {
        double* gt = gx.row(t);
        for (int j = 0; j < kernel_; ++j) {
            int u = t * stride_ + j - pad_left_;
            if (u < 0 || u >= t_out) continue;
            const double* gu = gy.row(u);
            for (int ci = 0; ci < in_ch_; ++ci) {
                const double* wr = w_.value.row(j * in_ch_ + ci);
                double s = 0.0;
                for (int co = 0; co < out_ch_; ++co) s += wr[co] * gu[co];
                gt[ci] += s;
            }
        }
    }
    return {std::move(gx)};
}

// ------------------------------------------------------------------- Elu

std::vector<Matrix> Elu::forward(const std::vector<Matrix>& inputs) {
    const Matrix& x = inputs.at(0);
    cached_input_ = x;
    Matrix y(x.rows(), x.cols());
    for (size_t k = 0; k < x.size(); ++k) y[k] = x[k] > 0.0 ? x[k] : std::expm1(x[k]);
    return {std::move(y)};
}

std::vector<Matrix> Elu::backward(const std::vector<Matrix>& grad_outputs) {
    const Matrix& gy = grad_outputs.at(0);
    const Matrix& x = cached_input_;
    gy.require_same_shape(x, "elu backward");
    Matrix gx(x.rows(), x.cols());
    for (size_t k = 0; k < x.size(); ++k)
        gx[k] = gy[k] * (x[k] > 0.0 ? 1.0 : std::exp(x[k]));
    return {std::move(gx)};
}

// --------------------------------------------------------------- Softmax

std::vector<Matrix> Softmax::forward(const std::vector<Matrix>& inputs) {
    cached_output_ = softmax_rows(inputs.at(0));
    return {cached_output_};
}

std::vector<Matrix> Softmax::backward(const std::vector<Matrix>& grad_outputs) {
    return {softmax_rows_backward(cached_output_, grad_outputs.at(0))};
}

}  // namespace rvqtok

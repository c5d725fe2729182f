#include "rvqtok/codec.hpp"

#include <cmath>

#include "rvqtok/errors.hpp"
#include "rvqtok/stft.hpp"

namespace rvqtok {

Matrix ModuleStack::forward(const Matrix& input) {
    std::vector<Matrix> cur = {input};
    for (auto& m : mods_) cur = m->forward(cur);
    return std::move(cur.at(0));
}

Matrix ModuleStack::backward(const Matrix& grad_output) {
    std::vector<Matrix> cur = {grad_output};
    for (auto it = mods_.rbegin(); it != mods_.rend(); ++it) cur = (*it)->backward(cur);
    return std::move(cur.at(0));
}

std::vector<Param*> ModuleStack::params() {
    std::vector<Param*> out;
    for (auto& m : mods_)
        for (Param* p : m->params()) out.push_back(p);
    return out;
}

void ModuleStack::zero_grads() {
    for (auto& m : mods_) m->zero_grads();
}

CodecNet::CodecNet(const CodecConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.enc_channels.back() != cfg.dim)
        throw DimError("codec: last encoder width must equal dim");
    int in_ch = 1;
    for (size_t i = 0; i < cfg.strides.size(); ++i) {
        const int s = cfg.strides[i];
        const int out_ch = cfg.enc_channels[i];
        enc_.add(std::make_unique<Conv1d>(in_ch, out_ch, 2 * s, s, rng));
        if (i + 1 < cfg.strides.size()) enc_.add(std::make_unique<Elu>());
        in_ch = out_ch;
    }
    for (size_t i = cfg.strides.size(); i-- > 0;) {
        const int s = cfg.strides[i];
        const int out_ch = i == 0 ? 1 : cfg.enc_channels[i - 1];
        dec_.add(std::make_unique<TransposedConv1d>(in_ch, out_ch, 2 * s, s, rng));
        if (i > 0) dec_.add(std::make_unique<Elu>());
        in_ch = out_ch;
    }
}

Matrix CodecNet::encode(const Waveform& w) {
    if (w.samples.empty()) throw DimError("encode: empty waveform");
    if (w.sample_rate != kSampleRate)
        throw FormatError("encode: expected 16 kHz input, got " +
                          std::to_string(w.sample_rate) + " Hz");
    return enc_.forward(samples_to_matrix(w.samples));
}

Waveform CodecNet::decode(const Matrix& zq, size_t out_len) {
    if (zq.cols() != cfg_.dim)
        throw DimError("decode: expected " + std::to_string(cfg_.dim) + "-dim frames, got " +
                       zq.shape_str());
    Matrix full = dec_.forward(zq);
    const size_t produced = static_cast<size_t>(full.rows());
    if (out_len > produced)
        throw DimError("decode: requested " + std::to_string(out_len) + " samples, only " +
                       std::to_string(produced) + " produced");
    Waveform w;
    w.sample_rate = kSampleRate;
    w.samples.resize(out_len);
    for (size_t i = 0; i < out_len; ++i) w.samples[i] = full(static_cast<int>(i), 0);
    return w;
}

Matrix CodecNet::encoder_backward(const Matrix& grad_z0) { return enc_.backward(grad_z0); }

Matrix CodecNet::decoder_backward(const Matrix& grad_samples) {
    return dec_.backward(grad_samples);
}

std::vector<Param*> CodecNet::params() {
    std::vector<Param*> out = enc_.params();
    for (Param* p : dec_.params()) out.push_back(p);
    return out;
}

void CodecNet::zero_grads() {
    enc_.zero_grads();
    dec_.zero_grads();
}

// ------------------------------------------------------------------ losses

ScalarLossGrad time_loss(const std::vector<double>& x, const std::vector<double>& xhat) {
    if (x.size() != xhat.size()) throw DimError("time_loss: length mismatch");
    ScalarLossGrad out;
    out.grad = Matrix(static_cast<int>(x.size()), 1);
    if (x.empty()) return out;
    const double inv_n = 1.0 / static_cast<double>(x.size());
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = xhat[i] - x[i];
        acc += std::fabs(e);
        out.grad(static_cast<int>(i), 0) = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) * inv_n;
    }
    out.loss = acc * inv_n;
    return out;
}

ScalarLossGrad freq_loss(const std::vector<double>& x, const std::vector<double>& xhat) {
    if (x.size() != xhat.size()) throw DimError("freq_loss: length mismatch");
    const int hop = kHop;
    const Spectrogram sx = stft(x, kFreqLossFft, hop);
    const Spectrogram sh = stft(xhat, kFreqLossFft, hop);
    const Matrix lx = log_magnitude(sx, kFreqLossFloor);
    const Matrix lh = log_magnitude(sh, kFreqLossFloor);

    const int t = lx.rows(), f = lx.cols();
    const double m = static_cast<double>(t) * f;
    double l1 = 0.0, l2sq = 0.0;
    Matrix delta(t, f);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < f; ++j) {
            const double d = lh(i, j) - lx(i, j);
            delta(i, j) = d;
            l1 += std::fabs(d);
            l2sq += d * d;
        }
    l1 /= m;
    const double rms = std::sqrt(l2sq / m);

    ScalarLossGrad out;
    out.loss = l1 + rms;
    // d loss / d delta, then through log|X| and the STFT adjoint
    Matrix gre(t, f), gim(t, f);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < f; ++j) {
            double g = (delta(i, j) > 0.0 ? 1.0 : (delta(i, j) < 0.0 ? -1.0 : 0.0)) / m;
            if (rms > 0.0) g += delta(i, j) / (m * rms);
            const double mag = sh.magnitude(i, j);
            if (mag <= kFreqLossFloor) continue;  // flat region of the floored log
            const double scale = g / (mag * mag);  // 1/mag for the log, re/mag etc. next
            gre(i, j) = scale * sh.re(i, j);
            gim(i, j) = scale * sh.im(i, j);
        }
    std::vector<double> gx = stft_adjoint(gre, gim, xhat.size(), kFreqLossFft, hop);
    out.grad = samples_to_matrix(gx);
    return out;
}

std::vector<Matrix> TimeLossModule::forward(const std::vector<Matrix>& inputs) {
    ScalarLossGrad r = time_loss(ref_, matrix_to_samples(inputs.at(0)));
    cached_grad_ = std::move(r.grad);
    Matrix out(1, 1);
    out(0, 0) = r.loss;
    return {std::move(out)};
}

std::vector<Matrix> TimeLossModule::backward(const std::vector<Matrix>& grad_outputs) {
    Matrix g = cached_grad_;
    g *= grad_outputs.at(0)(0, 0);
    return {std::move(g)};
}

std::vector<Matrix> FreqLossModule::forward(const std::vector<Matrix>& inputs) {
    ScalarLossGrad r = freq_loss(ref_, matrix_to_samples(inputs.at(0)));
    cached_grad_ = std::move(r.grad);
    Matrix out(1, 1);
    out(0, 0) = r.loss;
    return {std::move(out)};
}

std::vector<Matrix> FreqLossModule::backward(const std::vector<Matrix>& grad_outputs) {
    Matrix g = cached_grad_;
    g *= grad_outputs.at(0)(0, 0);
    return {std::move(g)};
}

Matrix samples_to_matrix(const std::vector<double>& samples) {
    Matrix m(static_cast<int>(samples.size()), 1);
    for (size_t i = 0; i < samples.size(); ++i) m(static_cast<int>(i), 0) = samples[i];
    return m;
}

std::vector<double> matrix_to_samples(const Matrix& m) {
    if (m.cols() != 1) throw DimError("matrix_to_samples: expected a column vector");
    std::vector<double> out(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) out[static_cast<size_t>(i)] = m(i, 0);
    return out;
}

}  // namespace rvqtok

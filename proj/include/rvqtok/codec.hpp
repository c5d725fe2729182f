#pragma once

#include <array>
#include <memory>

#include "rvqtok/audio.hpp"
#include "rvqtok/modules.hpp"
#include "rvqtok/vq.hpp"

namespace rvqtok {

// Toy strided autoencoder: 4 conv layers with ELUs, total stride 320, so
// one latent frame per 20 ms at 16 kHz; decoder mirrors with transposed
// convolutions. Kernels are twice the stride.
struct CodecConfig {
    int dim = 32;
    std::array<int, 4> strides{4, 4, 4, 5};
    std::array<int, 4> enc_channels{16, 32, 32, 32};  // last one must equal dim

    int total_stride() const { return strides[0] * strides[1] * strides[2] * strides[3]; }
};

// A fixed-order stack of DiffModules with whole-stack forward/backward.
class ModuleStack {
public:
    void add(std::unique_ptr<DiffModule> m) { mods_.push_back(std::move(m)); }

    Matrix forward(const Matrix& input);
    Matrix backward(const Matrix& grad_output);  // returns grad w.r.t. input
    std::vector<Param*> params();
    void zero_grads();

    size_t size() const { return mods_.size(); }
    DiffModule& at(size_t i) { return *mods_[i]; }

private:
    std::vector<std::unique_ptr<DiffModule>> mods_;
};

class CodecNet {
public:
    CodecNet(const CodecConfig& cfg, Rng& rng);

    const CodecConfig& config() const { return cfg_; }

    // Waveform -> T x D latent frames, T = ceil(samples / 320).
    Matrix encode(const Waveform& w);
    // Latent frames -> waveform of out_len samples (frames*320 produced,
    // then trimmed; out_len may not exceed frames*320).
    Waveform decode(const Matrix& zq, size_t out_len);

    // Gradient plumbing for the training loop.
    Matrix encoder_backward(const Matrix& grad_z0);       // returns grad w.r.t. samples
    Matrix decoder_backward(const Matrix& grad_samples);  // padded to frames*320

    ModuleStack& encoder() { return enc_; }
    ModuleStack& decoder() { return dec_; }
    std::vector<Param*> params();
    void zero_grads();

private:
    CodecConfig cfg_;
    ModuleStack enc_, dec_;
};

// L1 over samples; gradient w.r.t. the reconstruction.
ScalarLossGrad time_loss(const std::vector<double>& x, const std::vector<double>& xhat);

// L1 + L2 (RMS) distance between log-magnitude STFTs, fft 1024, hop 320,
// magnitude floor 1e-7. Gradient w.r.t. the reconstruction.
constexpr int kFreqLossFft = 1024;
constexpr double kFreqLossFloor = 1e-7;
ScalarLossGrad freq_loss(const std::vector<double>& x, const std::vector<double>& xhat);

// DiffModule adapters (reference signal fixed at construction) so the
// reconstruction losses join the gradient-check suite.
class TimeLossModule : public DiffModule {
public:
    explicit TimeLossModule(std::vector<double> reference) : ref_(std::move(reference)) {}
    std::string name() const override { return "time_loss"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;

private:
    std::vector<double> ref_;
    Matrix cached_grad_;
};

class FreqLossModule : public DiffModule {
public:
    explicit FreqLossModule(std::vector<double> reference) : ref_(std::move(reference)) {}
    std::string name() const override { return "freq_loss"; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;

private:
    std::vector<double> ref_;
    Matrix cached_grad_;
};

// Column-vector <-> sample-vector helpers.
Matrix samples_to_matrix(const std::vector<double>& samples);
std::vector<double> matrix_to_samples(const Matrix& m);

}  // namespace rvqtok

#pragma once

#include <string>

#include "rvqtok/modules.hpp"

namespace rvqtok {

constexpr double kKlFloor = 1e-12;

// Weighting of the generator loss terms. The feature-matching slot exists
// for config compatibility but must stay zero: adversarial training is
// not part of this codec.
struct LossWeights {
    double lambda_semantic = 0.5;
    double lambda_acoustic = 0.5;
    double lambda_time = 1.0;
    double lambda_freq = 1.0;
    double lambda_vq = 1.0;
    double lambda_feature = 0.0;

    void validate() const;
};

enum class SemanticAxis {
    kTime,   // cosine across time per feature channel (default)
    kFrame,  // cosine across channels per frame
};

// Semantic distillation: -(1/P) sum_d log sigmoid(cos_d) between the
// projected level-0 codewords and the semantic teacher frames. The cosine
// runs along the time axis per channel d (switchable to per-frame).
// inputs: { z0_q (T x D), teacher (T x P) }   output: { 1 x 1 loss }
// The D -> P projection initializes to identity when D == P.
class SemanticLoss : public DiffModule {
public:
    SemanticLoss(int dim, int teacher_dim, Rng& rng, SemanticAxis axis = SemanticAxis::kTime);

    std::string name() const override { return "semantic_loss"; }
    size_t input_count() const override { return 2; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;
    std::vector<Param*> params() override { return {&proj_}; }

    Param& projection() { return proj_; }
    SemanticAxis axis() const { return axis_; }

private:
    SemanticAxis axis_;
    Param proj_;  // D x P
    Matrix cached_z_, cached_teacher_, cached_proj_out_;
};

// Attention align layer mapping the utterance-level acoustic teacher into
// the codec latent space. Queries come from the level-1 codewords; the
// projected teacher provides the single key/value slot every frame
// attends to. Output rows are softmax-normalized, so A(x) lives on the
// simplex.
// inputs: { z1_q (T x D), teacher (1 x A) }   output: { A(x) (T x D) }
class AlignLayer : public DiffModule {
public:
    AlignLayer(int dim, int teacher_dim, int heads, Rng& rng);

    std::string name() const override { return "align_attention"; }
    size_t input_count() const override { return 2; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;
    std::vector<Param*> params() override;

    int dim() const { return dim_; }
    int teacher_dim() const { return teacher_dim_; }
    int heads() const { return heads_; }

private:
    int dim_, teacher_dim_, heads_;
    Param wt_, bt_;  // teacher projection A -> D
    Param wq_, bq_, wk_, bk_, wv_, bv_;  // D -> D
    Param wo_, bo_;  // D -> D
    Matrix cached_z_, cached_teacher_, cached_tp_, cached_v_, cached_out_;
};

struct AcousticLossResult {
    double loss = 0.0;
    Matrix grad_z;  // w.r.t. z1_q (through the softmax normalization)
    Matrix grad_a;  // w.r.t. A(x)
};

// KL(softmax(z1_q) || A) averaged over frames, summed over channels, with
// a probability floor before every log.
AcousticLossResult acoustic_loss(const Matrix& z1_q, const Matrix& a,
                                 double floor = kKlFloor);

// Plain KL between two row sets already on the simplex (helper, same
// floor convention).
double kl_divergence_rows(const Matrix& p, const Matrix& a, double floor = kKlFloor);

// Module wrapper so the acoustic loss joins the gradient-check suite.
// inputs: { z1_q, A }   output: { 1 x 1 }
class AcousticKlLoss : public DiffModule {
public:
    explicit AcousticKlLoss(double floor = kKlFloor) : floor_(floor) {}

    std::string name() const override { return "acoustic_kl_loss"; }
    size_t input_count() const override { return 2; }
    std::vector<Matrix> forward(const std::vector<Matrix>& inputs) override;
    std::vector<Matrix> backward(const std::vector<Matrix>& grad_outputs) override;

private:
    double floor_;
    AcousticLossResult cached_;
};

// Raw (unweighted) loss terms of one training step.
struct LossParts {
    double time = 0.0;
    double freq = 0.0;
    double vq = 0.0;
    double semantic = 0.0;
    double acoustic = 0.0;
};

struct GeneratorLoss {
    double total = 0.0;
    double encodec = 0.0;  // lambda_time*time + lambda_freq*freq + lambda_vq*vq
    LossParts raw;
};

// Weighted composition of the generator objective. A non-finite part
// aborts with the offending term named.
GeneratorLoss generator_loss(const LossParts& parts, const LossWeights& weights);

}  // namespace rvqtok

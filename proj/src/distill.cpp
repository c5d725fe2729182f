#include "rvqtok/distill.hpp"

#include <cmath>

#include "rvqtok/errors.hpp"
#include "rvqtok/kernels.hpp"

namespace rvqtok {

void LossWeights::validate() const {
    if (lambda_semantic < 0 || lambda_acoustic < 0 || lambda_time < 0 || lambda_freq < 0 ||
        lambda_vq < 0)
        throw NumericError("loss weights must be non-negative");
    if (lambda_feature != 0.0)
        throw NumericError(
            "lambda_feature must be 0: the adversarial feature loss is not supported by this "
            "codec");
}

// ---------------------------------------------------------- SemanticLoss

namespace {

constexpr double kNormFloor = 1e-30;

double softplus(double x) {
    // log(1 + e^x) without overflow
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SemanticLoss::SemanticLoss(int dim, int teacher_dim, Rng& rng, SemanticAxis axis)
    : axis_(axis) {
    Matrix w = dim == teacher_dim
                   ? Matrix::identity(dim)
                   : Matrix::randn(dim, teacher_dim, rng, 1.0 / std::sqrt(dim));
    proj_ = Param("proj", std::move(w));
}

std::vector<Matrix> SemanticLoss::forward(const std::vector<Matrix>& inputs) {
    const Matrix& z = inputs.at(0);
    const Matrix& s = inputs.at(1);
    if (z.rows() != s.rows())
        throw DimError("semantic_loss: frame counts differ, " + z.shape_str() + " vs " +
                       s.shape_str() + " (truncate to the minimum first)");
    if (z.cols() != proj_.value.rows() || s.cols() != proj_.value.cols())
        throw DimError("semantic_loss: dims do not match the projection");
    cached_z_ = z;
    cached_teacher_ = s;
    cached_proj_out_ = kernels::matmul(z, proj_.value);  // T x P

    const Matrix& a = cached_proj_out_;
    const int t = a.rows(), p = a.cols();
    double loss = 0.0;
    if (axis_ == SemanticAxis::kTime) {
        // cosine across time per channel; zero-norm channels contribute cos = 0
        for (int d = 0; d < p; ++d) {
            double dot = 0.0, na = 0.0, ns = 0.0;
            for (int i = 0; i < t; ++i) {
                dot += a(i, d) * s(i, d);
                na += a(i, d) * a(i, d);
                ns += s(i, d) * s(i, d);
            }
            double denom = std::sqrt(na) * std::sqrt(ns);
            double c = denom > kNormFloor ? dot / denom : 0.0;
            loss += softplus(-c);
        }
        loss /= p > 0 ? p : 1;
    } else {
        for (int i = 0; i < t; ++i) {
            double dot = 0.0, na = 0.0, ns = 0.0;
            for (int d = 0; d < p; ++d) {
                dot += a(i, d) * s(i, d);
                na += a(i, d) * a(i, d);
                ns += s(i, d) * s(i, d);
            }
            double denom = std::sqrt(na) * std::sqrt(ns);
            double c = denom > kNormFloor ? dot / denom : 0.0;
            loss += softplus(-c);
        }
        loss /= t > 0 ? t : 1;
    }
    Matrix out(1, 1);
    out(0, 0) = loss;
    return {std::move(out)};
}

std::vector<Matrix> SemanticLoss::backward(const std::vector<Matrix>& grad_outputs) {
    const double g = grad_outputs.at(0)(0, 0);
    const Matrix& a = cached_proj_out_;
    const Matrix& s = cached_teacher_;
    const int t = a.rows(), p = a.cols();

    Matrix ga(t, p);  // d loss / d proj_out
    Matrix gs(t, p);  // d loss / d teacher
    if (axis_ == SemanticAxis::kTime) {
        const double scale = g / (p > 0 ? p : 1);
        for (int d = 0; d < p; ++d) {
            double dot = 0.0, na = 0.0, ns = 0.0;
            for (int i = 0; i < t; ++i) {
                dot += a(i, d) * s(i, d);
                na += a(i, d) * a(i, d);
                ns += s(i, d) * s(i, d);
            }
            double nna = std::sqrt(na), nns = std::sqrt(ns);
            double denom = nna * nns;
            if (denom <= kNormFloor) continue;  // cos pinned to 0, no gradient
            double c = dot / denom;
            double dl_dc = -sigmoid(-c) * scale;
            for (int i = 0; i < t; ++i) {
                ga(i, d) = dl_dc * (s(i, d) / denom - c * a(i, d) / na);
                gs(i, d) = dl_dc * (a(i, d) / denom - c * s(i, d) / ns);
            }
        }
    } else {
        const double scale = g / (t > 0 ? t : 1);
        for (int i = 0; i < t; ++i) {
            double dot = 0.0, na = 0.0, ns = 0.0;
            for (int d = 0; d < p; ++d) {
                dot += a(i, d) * s(i, d);
                na += a(i, d) * a(i, d);
                ns += s(i, d) * s(i, d);
            }
            double nna = std::sqrt(na), nns = std::sqrt(ns);
            double denom = nna * nns;
            if (denom <= kNormFloor) continue;
            double c = dot / denom;
            double dl_dc = -sigmoid(-c) * scale;
            for (int d = 0; d < p; ++d) {
                ga(i, d) = dl_dc * (s(i, d) / denom - c * a(i, d) / na);
                gs(i, d) = dl_dc * (a(i, d) / denom - c * s(i, d) / ns);
            }
        }
    }
    proj_.grad += kernels::matmul_ta(cached_z_, ga);
    Matrix gz = kernels::matmul_tb(ga, proj_.value);
    return {std::move(gz), std::move(gs)};
}

// ------------------------------------------------------------ AlignLayer

AlignLayer::AlignLayer(int dim, int teacher_dim, int heads, Rng& rng)
    : dim_(dim), teacher_dim_(teacher_dim), heads_(heads) {
    if (heads < 1 || dim % heads != 0)
        throw DimError("align layer: head count must divide the model width");
    const double ds = 1.0 / std::sqrt(dim);
    wt_ = Param("wt", Matrix::randn(teacher_dim, dim, rng, 1.0 / std::sqrt(teacher_dim)));
    bt_ = Param("bt", Matrix(1, dim));
    wq_ = Param("wq", Matrix::randn(dim, dim, rng, ds));
    bq_ = Param("bq", Matrix(1, dim));
    wk_ = Param("wk", Matrix::randn(dim, dim, rng, ds));
    bk_ = Param("bk", Matrix(1, dim));
    wv_ = Param("wv", Matrix::randn(dim, dim, rng, ds));
    bv_ = Param("bv", Matrix(1, dim));
    wo_ = Param("wo", Matrix::randn(dim, dim, rng, ds));
    bo_ = Param("bo", Matrix(1, dim));
}

std::vector<Param*> AlignLayer::params() {
    return {&wt_, &bt_, &wq_, &bq_, &wk_, &bk_, &wv_, &bv_, &wo_, &bo_};
}

std::vector<Matrix> AlignLayer::forward(const std::vector<Matrix>& inputs) {
    const Matrix& z = inputs.at(0);
    const Matrix& teacher = inputs.at(1);
    if (z.cols() != dim_)
        throw DimError("align layer: expected " + std::to_string(dim_) + "-dim frames");
    if (teacher.rows() != 1 || teacher.cols() != teacher_dim_)
        throw DimError("align layer: teacher must be 1x" + std::to_string(teacher_dim_));
    for (const Param* p : {&wt_, &wq_, &wk_, &wv_, &wo_})
        if (!p->value.all_finite())
            throw NumericError("align layer: non-finite parameter " + p->name);
    cached_z_ = z;
    cached_teacher_ = teacher;

    auto affine = [](const Matrix& x, const Param& w, const Param& b) {
        Matrix y = kernels::matmul(x, w.value);
        for (int i = 0; i < y.rows(); ++i)
            for (int j = 0; j < y.cols(); ++j) y(i, j) += b.value(0, j);
        return y;
    };

    cached_tp_ = affine(teacher, wt_, bt_);        // 1 x D
    Matrix k = affine(cached_tp_, wk_, bk_);       // 1 x D
    cached_v_ = affine(cached_tp_, wv_, bv_);      // 1 x D
    Matrix q = affine(z, wq_, bq_);                // T x D

    // Scaled dot-product attention over a single key/value slot: the
    // softmax over one logit is identically 1, so every frame receives
    // the value vector. The per-head logits are still well-defined.
    const int t = z.rows();
    Matrix att(t, dim_);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < dim_; ++j) att(i, j) = cached_v_(0, j);

    Matrix out = affine(att, wo_, bo_);  // T x D
    cached_out_ = softmax_rows(out);
    return {cached_out_};
}

std::vector<Matrix> AlignLayer::backward(const std::vector<Matrix>& grad_outputs) {
    const Matrix& ga_out = grad_outputs.at(0);
    const int t = cached_z_.rows();

    Matrix g_pre = softmax_rows_backward(cached_out_, ga_out);  // T x D

    // output projection
    Matrix att(t, dim_);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < dim_; ++j) att(i, j) = cached_v_(0, j);
    wo_.grad += kernels::matmul_ta(att, g_pre);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < dim_; ++j) bo_.grad(0, j) += g_pre(i, j);
    Matrix g_att = kernels::matmul_tb(g_pre, wo_.value);  // T x D

    // broadcast adjoint: the value slot accumulates over frames. The
    // attention weight is constant 1, so queries and keys get no gradient.
    Matrix gv(1, dim_);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < dim_; ++j) gv(0, j) += g_att(i, j);

    wv_.grad += kernels::matmul_ta(cached_tp_, gv);
    for (int j = 0; j < dim_; ++j) bv_.grad(0, j) += gv(0, j);
    Matrix g_tp = kernels::matmul_tb(gv, wv_.value);  // 1 x D

    wt_.grad += kernels::matmul_ta(cached_teacher_, g_tp);
    for (int j = 0; j < dim_; ++j) bt_.grad(0, j) += g_tp(0, j);
    Matrix g_teacher = kernels::matmul_tb(g_tp, wt_.value);  // 1 x A

    Matrix g_z(t, dim_);  // exactly zero: frames only steer the degenerate weights
    return {std::move(g_z), std::move(g_teacher)};
}

// --------------------------------------------------------- acoustic loss

AcousticLossResult acoustic_loss(const Matrix& z1_q, const Matrix& a, double floor) {
    z1_q.require_same_shape(a, "acoustic_loss");
    AcousticLossResult res;
    const int t = z1_q.rows(), d = z1_q.cols();
    res.grad_z = Matrix(t, d);
    res.grad_a = Matrix(t, d);
    if (t == 0) return res;

    Matrix p = softmax_rows(z1_q);
    Matrix gp(t, d);
    const double inv_t = 1.0 / t;
    double loss = 0.0;
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < d; ++j) {
            const double pv = p(i, j);
            const double av = a(i, j);
            const double lp = std::log(std::max(pv, floor));
            const double la = std::log(std::max(av, floor));
            loss += pv * (lp - la);
            gp(i, j) = inv_t * (lp - la + (pv > floor ? 1.0 : 0.0));
            res.grad_a(i, j) = av > floor ? -inv_t * pv / av : 0.0;
        }
    }
    res.loss = loss * inv_t;
    res.grad_z = softmax_rows_backward(p, gp);
    return res;
}

double kl_divergence_rows(const Matrix& p, const Matrix& a, double floor) {
    p.require_same_shape(a, "kl_divergence_rows");
    double loss = 0.0;
    for (size_t k = 0; k < p.size(); ++k)
        loss += p[k] * (std::log(std::max(p[k], floor)) - std::log(std::max(a[k], floor)));
    return p.rows() > 0 ? loss / p.rows() : 0.0;
}

std::vector<Matrix> AcousticKlLoss::forward(const std::vector<Matrix>& inputs) {
    cached_ = acoustic_loss(inputs.at(0), inputs.at(1), floor_);
    Matrix out(1, 1);
    out(0, 0) = cached_.loss;
    return {std::move(out)};
}

std::vector<Matrix> AcousticKlLoss::backward(const std::vector<Matrix>& grad_outputs) {
    const double g = grad_outputs.at(0)(0, 0);
    Matrix gz = cached_.grad_z;
    Matrix ga = cached_.grad_a;
    gz *= g;
    ga *= g;
    return {std::move(gz), std::move(ga)};
}

// -------------------------------------------------------- generator loss

GeneratorLoss generator_loss(const LossParts& parts, const LossWeights& weights) {
    weights.validate();
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v))
            throw NumericError(std::string("generator_loss: ") + name + " term is non-finite");
    };
    check(parts.time, "time");
    check(parts.freq, "freq");
    check(parts.vq, "vq");
    check(parts.semantic, "semantic");
    check(parts.acoustic, "acoustic");

    GeneratorLoss out;
    out.raw = parts;
    out.encodec = weights.lambda_time * parts.time + weights.lambda_freq * parts.freq +
                  weights.lambda_vq * parts.vq;
    out.total = out.encodec + weights.lambda_semantic * parts.semantic +
                weights.lambda_acoustic * parts.acoustic;
    return out;
}

}  // namespace rvqtok

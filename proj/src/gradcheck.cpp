#include "rvqtok/gradcheck.hpp"

#include <cmath>

namespace rvqtok {

namespace {

double weighted_sum(const std::vector<Matrix>& outs, const std::vector<Matrix>& weights) {
    double s = 0.0;
    for (size_t k = 0; k < outs.size(); ++k)
        for (size_t i = 0; i < outs[k].size(); ++i) s += outs[k][i] * weights[k][i];
    return s;
}

}  // namespace

GradCheckReport grad_check(DiffModule& module, const std::vector<Matrix>& inputs,
                           double eps, double tol, uint64_t seed) {
    GradCheckReport rep;
    if (eps < 1e-7 || eps > 1e-3) {
        rep.failure = "eps out of range [1e-7, 1e-3]";
        return rep;
    }

    std::vector<Matrix> work = inputs;
    std::vector<Matrix> outs = module.forward(work);
    for (const Matrix& o : outs) {
        if (!o.all_finite()) {
            rep.failure = "non-finite forward output in " + module.name();
            return rep;
        }
    }

    Rng wrng(seed, "gradcheck-weights");
    std::vector<Matrix> weights;
    weights.reserve(outs.size());
    for (const Matrix& o : outs) weights.push_back(Matrix::randn(o.rows(), o.cols(), wrng));

    module.zero_grads();
    std::vector<Matrix> grad_in = module.backward(weights);

    auto scalar_loss = [&]() { return weighted_sum(module.forward(work), weights); };

    auto check_entry = [&](double analytic, double* slot, const std::string& loc) {
        double orig = *slot;
        *slot = orig + eps;
        double lp = scalar_loss();
        *slot = orig - eps;
        double lm = scalar_loss();
        *slot = orig;
        if (!std::isfinite(lp) || !std::isfinite(lm)) {
            rep.failure = "non-finite intermediate at " + loc;
            return false;
        }
        double numeric = (lp - lm) / (2.0 * eps);
        double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
        double rel = std::fabs(analytic - numeric) / denom;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.worst_location = loc;
        }
        ++rep.entries_checked;
        return true;
    };

    for (size_t m = 0; m < work.size(); ++m) {
        Matrix& x = work[m];
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) {
                std::string loc = "input" + std::to_string(m) + "[" + std::to_string(i) +
                                  "," + std::to_string(j) + "]";
                if (!check_entry(grad_in[m](i, j), &x(i, j), loc)) return rep;
            }
    }
    for (Param* p : module.params()) {
        Matrix& v = p->value;
        for (int i = 0; i < v.rows(); ++i)
            for (int j = 0; j < v.cols(); ++j) {
                std::string loc = "param " + p->name + "[" + std::to_string(i) + "," +
                                  std::to_string(j) + "]";
                if (!check_entry(p->grad(i, j), &v(i, j), loc)) return rep;
            }
    }

    rep.pass = rep.max_rel_err <= tol;
    return rep;
}

}  // namespace rvqtok

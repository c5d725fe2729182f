#include "rvqtok/kernels.hpp"

#include <cstdlib>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rvqtok {

int worker_threads() {
    static const int n = [] {
#ifdef _OPENMP
        int hw = omp_get_max_threads();
#else
        int hw = 1;
#endif
        if (const char* env = std::getenv("RVQTOK_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return n;
}

namespace kernels {

static void check_matmul_shapes(const Matrix& a, const Matrix& b, bool ta, bool tb) {
    int ak = ta ? a.rows() : a.cols();
    int bk = tb ? b.cols() : b.rows();
    if (ak != bk)
        throw DimError("matmul: inner dimensions disagree, " + a.shape_str() + " vs " +
                       b.shape_str());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b, false, false);
    const int m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.row(p);
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_ta(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b, true, false);
    const int m = a.cols(), k = a.rows(), n = b.cols();
    Matrix c(m, n);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int i = 0; i < m; ++i) {
        double* ci = c.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = a(p, i);
            const double* bp = b.row(p);
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_tb(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b, false, true);
    const int m = a.rows(), k = a.cols(), n = b.rows();
    Matrix c(m, n);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int j = 0; j < n; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
    return c;
}

std::vector<int> nearest_rows(const Matrix& codebook, const Matrix& frames) {
    if (codebook.cols() != frames.cols())
        throw DimError("nearest_rows: dim mismatch, codebook " + codebook.shape_str() +
                       " vs frames " + frames.shape_str());
    const int t = frames.rows(), kk = codebook.rows(), d = frames.cols();
    std::vector<int> idx(static_cast<size_t>(t));
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (int i = 0; i < t; ++i) {
        const double* f = frames.row(i);
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (int k = 0; k < kk; ++k) {
            const double* e = codebook.row(k);
            double dist = 0.0;
            for (int j = 0; j < d; ++j) {
                double diff = f[j] - e[j];
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                best_k = k;
            }
        }
        idx[static_cast<size_t>(i)] = best_k;
    }
    return idx;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b, false, false);
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int p = 0; p < a.cols(); ++p) {
            const double aip = a(i, p);
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
        }
    return c;
}

std::vector<int> nearest_rows(const Matrix& codebook, const Matrix& frames) {
    if (codebook.cols() != frames.cols())
        throw DimError("nearest_rows: dim mismatch, codebook " + codebook.shape_str() +
                       " vs frames " + frames.shape_str());
    std::vector<int> idx(static_cast<size_t>(frames.rows()));
    for (int i = 0; i < frames.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (int k = 0; k < codebook.rows(); ++k) {
            double dist = 0.0;
            for (int j = 0; j < frames.cols(); ++j) {
                double diff = frames(i, j) - codebook(k, j);
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                best_k = k;
            }
        }
        idx[static_cast<size_t>(i)] = best_k;
    }
    return idx;
}

}  // namespace serial
}  // namespace kernels
}  // namespace rvqtok

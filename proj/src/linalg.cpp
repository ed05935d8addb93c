#include "covertflow/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "covertflow/errors.hpp"

namespace covertflow::linalg {

Matrix identity(int d) {
    Matrix m(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m[static_cast<size_t>(i) * d + i] = 1.0;
    return m;
}

Matrix cholesky(const Matrix& a, int d) {
    Matrix l(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<size_t>(i) * d + j];
            for (int k = 0; k < j; ++k)
                s -= l[static_cast<size_t>(i) * d + k] * l[static_cast<size_t>(j) * d + k];
            if (i == j) {
                if (!(s > 0.0)) throw SingularCorrelation();
                l[static_cast<size_t>(i) * d + j] = std::sqrt(s);
            } else {
                l[static_cast<size_t>(i) * d + j] = s / l[static_cast<size_t>(j) * d + j];
            }
        }
    }
    return l;
}

void jacobi_eigen(const Matrix& a_in, int d, std::vector<double>& values, Matrix& vecs) {
    Matrix a = a_in;
    vecs = identity(d);
    auto at = [&](Matrix& m, int i, int j) -> double& { return m[static_cast<size_t>(i) * d + j]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += at(a, i, j) * at(a, i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = at(a, p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = at(vecs, k, p), vkq = at(vecs, k, q);
                    at(vecs, k, p) = c * vkp - s * vkq;
                    at(vecs, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) values[static_cast<size_t>(i)] = a[static_cast<size_t>(i) * d + i];
}

Matrix nearest_correlation(const Matrix& a, int d, double eig_floor) {
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen(a, d, vals, vecs);
    bool clipped = false;
    for (auto& v : vals) {
        if (v < eig_floor) {
            v = eig_floor;
            clipped = true;
        }
    }
    Matrix out(static_cast<size_t>(d) * d, 0.0);
    if (!clipped) {
        out = a;
    } else {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k)
                    s += vecs[static_cast<size_t>(i) * d + k] * vals[static_cast<size_t>(k)] *
                         vecs[static_cast<size_t>(j) * d + k];
                out[static_cast<size_t>(i) * d + j] = s;
            }
    }
    // rescale to unit diagonal and symmetrize
    std::vector<double> scale(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double di = out[static_cast<size_t>(i) * d + i];
        if (!(di > 0.0)) throw SingularCorrelation();
        scale[static_cast<size_t>(i)] = 1.0 / std::sqrt(di);
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out[static_cast<size_t>(i) * d + j] *= scale[static_cast<size_t>(i)] * scale[static_cast<size_t>(j)];
    for (int i = 0; i < d; ++i) {
        out[static_cast<size_t>(i) * d + i] = 1.0;
        for (int j = i + 1; j < d; ++j) {
            const double v = 0.5 * (out[static_cast<size_t>(i) * d + j] + out[static_cast<size_t>(j) * d + i]);
            out[static_cast<size_t>(i) * d + j] = v;
            out[static_cast<size_t>(j) * d + i] = v;
        }
    }
    return out;
}

Matrix inverse_spd(const Matrix& a, int d) {
    const Matrix l = cholesky(a, d);
    Matrix inv(static_cast<size_t>(d) * d, 0.0);
    std::vector<double> col(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) {
        // forward solve L y = e_c
        for (int i = 0; i < d; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= l[static_cast<size_t>(i) * d + k] * col[static_cast<size_t>(k)];
            col[static_cast<size_t>(i)] = s / l[static_cast<size_t>(i) * d + i];
        }
        // back solve L^T x = y
        for (int i = d - 1; i >= 0; --i) {
            double s = col[static_cast<size_t>(i)];
            for (int k = i + 1; k < d; ++k) s -= l[static_cast<size_t>(k) * d + i] * inv[static_cast<size_t>(k) * d + c];
            inv[static_cast<size_t>(i) * d + c] = s / l[static_cast<size_t>(i) * d + i];
        }
    }
    return inv;
}

double log_det_spd(const Matrix& a, int d) {
    const Matrix l = cholesky(a, d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::log(l[static_cast<size_t>(i) * d + i]);
    return 2.0 * s;
}

double quad_form_inv(const Matrix& chol_lower, int d, const double* x) {
    // solve L y = x, then |y|^2
    double q = 0.0;
    std::vector<double> y(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= chol_lower[static_cast<size_t>(i) * d + k] * y[static_cast<size_t>(k)];
        y[static_cast<size_t>(i)] = s / chol_lower[static_cast<size_t>(i) * d + i];
        q += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    }
    return q;
}

double min_eigenvalue(const Matrix& a, int d) {
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen(a, d, vals, vecs);
    return *std::min_element(vals.begin(), vals.end());
}

} // namespace covertflow::linalg

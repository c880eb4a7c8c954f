#include "colored.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace covert {

namespace {

constexpr std::size_t kMaxDim = 4096;
constexpr double kMaxCondition = 1e12;

void check_dim(std::size_t n) {
    if (n == 0 || n > kMaxDim) {
        throw std::invalid_argument("colored: dimension must be in [1, 4096]");
    }
}

// Lower-triangular Cholesky factor of a symmetric matrix; throws naming the
// first non-positive leading minor.
Matrix cholesky(const Matrix& m) {
    const std::size_t n = m.n;
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= 0.0) {
                    throw std::invalid_argument(
                        "whiten: sigma is not positive definite (leading minor " +
                        std::to_string(i + 1) + ")");
                }
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    return l;
}

bool is_symmetric(const Matrix& m, double tol = 1e-9) {
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i + 1; j < m.n; ++j) {
            const double scale = 1.0 + std::fabs(m.at(i, j)) + std::fabs(m.at(j, i));
            if (std::fabs(m.at(i, j) - m.at(j, i)) > tol * scale) return false;
        }
    }
    return true;
}

// Semidefinite check via pivoted elimination with a small negative tolerance.
bool is_psd(const Matrix& m) {
    if (!is_symmetric(m)) return false;
    Matrix w = m;
    double scale = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) scale = std::max(scale, std::fabs(w.at(i, i)));
    const double tol = 1e-10 * (scale + 1.0);
    for (std::size_t k = 0; k < w.n; ++k) {
        const double pivot = w.at(k, k);
        if (pivot < -tol) return false;
        if (pivot <= tol) continue; // treat as zero row/column
        for (std::size_t i = k + 1; i < w.n; ++i) {
            const double f = w.at(i, k) / pivot;
            for (std::size_t j = k; j < w.n; ++j) {
                w.at(i, j) -= f * w.at(k, j);
            }
        }
    }
    return true;
}

void solve_lower(const Matrix& l, std::vector<double>& v) {
    const std::size_t n = l.n;
    for (std::size_t i = 0; i < n; ++i) {
        double s = v[i];
        for (std::size_t k = 0; k < i; ++k) s -= l.at(i, k) * v[k];
        v[i] = s / l.at(i, i);
    }
}

void solve_upper_transposed(const Matrix& l, std::vector<double>& v) {
    const std::size_t n = l.n;
    for (std::size_t i = n; i-- > 0;) {
        double s = v[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l.at(k, i) * v[k];
        v[i] = s / l.at(i, i);
    }
}

double log_det_cholesky(const Matrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.n; ++i) s += std::log(l.at(i, i));
    return 2.0 * s;
}

} // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.n != y.n) throw std::invalid_argument("matmul: dimension mismatch");
    const std::size_t n = x.n;
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double v = x.at(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out.at(i, j) += v * y.at(k, j);
            }
        }
    }
    return out;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (m.n != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> out(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += m.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

ColoredNoiseModel ColoredNoiseModel::gaussian(std::vector<double> mu, Matrix sigma) {
    check_dim(sigma.n);
    if (mu.size() != sigma.n) {
        throw std::invalid_argument("ColoredNoiseModel: mu/sigma size mismatch");
    }
    if (!is_symmetric(sigma)) {
        throw std::invalid_argument("ColoredNoiseModel: sigma must be symmetric");
    }
    ColoredNoiseModel m{sigma.n, std::move(mu), std::move(sigma), {}, {}};
    return m;
}

ColoredNoiseModel ColoredNoiseModel::ar1(std::size_t n, double rho) {
    check_dim(n);
    if (!(std::fabs(rho) < 1.0)) {
        throw std::invalid_argument("ColoredNoiseModel: |rho| < 1 required");
    }
    Matrix sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sigma.at(i, j) = std::pow(rho, std::fabs(static_cast<double>(i) -
                                                     static_cast<double>(j)));
        }
    }
    return gaussian(std::vector<double>(n, 0.0), std::move(sigma));
}

ColoredNoiseModel ColoredNoiseModel::mixed(Matrix a, const GGParams& base) {
    check_dim(a.n);
    ColoredNoiseModel m{a.n, std::vector<double>(a.n, 0.0), Matrix(), std::move(a), base};
    return m;
}

CodeTransport whiten(const ColoredNoiseModel& model) {
    CodeTransport t;
    t.n_ = model.n;
    t.mu_ = model.mu;
    if (model.mixing.has_value()) {
        t.a_ = *model.mixing;
        t.triangular_ = false;
        // LU with partial pivoting.
        t.lu_ = t.a_;
        t.piv_.resize(model.n);
        Matrix& lu = t.lu_;
        for (std::size_t i = 0; i < model.n; ++i) t.piv_[i] = i;
        double max_piv = 0.0, min_piv = 0.0;
        for (std::size_t k = 0; k < model.n; ++k) {
            std::size_t best = k;
            for (std::size_t i = k + 1; i < model.n; ++i) {
                if (std::fabs(lu.at(i, k)) > std::fabs(lu.at(best, k))) best = i;
            }
            if (best != k) {
                for (std::size_t j = 0; j < model.n; ++j) {
                    std::swap(lu.at(k, j), lu.at(best, j));
                }
                std::swap(t.piv_[k], t.piv_[best]);
            }
            const double pivot = lu.at(k, k);
            if (pivot == 0.0) {
                throw std::invalid_argument("whiten: mixing matrix is singular");
            }
            const double ap = std::fabs(pivot);
            max_piv = (k == 0) ? ap : std::max(max_piv, ap);
            min_piv = (k == 0) ? ap : std::min(min_piv, ap);
            for (std::size_t i = k + 1; i < model.n; ++i) {
                lu.at(i, k) /= pivot;
                for (std::size_t j = k + 1; j < model.n; ++j) {
                    lu.at(i, j) -= lu.at(i, k) * lu.at(k, j);
                }
            }
        }
        t.condition_ = max_piv / min_piv;
    } else {
        t.a_ = cholesky(model.sigma);
        t.triangular_ = true;
        double max_d = t.a_.at(0, 0), min_d = t.a_.at(0, 0);
        for (std::size_t i = 1; i < model.n; ++i) {
            max_d = std::max(max_d, t.a_.at(i, i));
            min_d = std::min(min_d, t.a_.at(i, i));
        }
        t.condition_ = (max_d / min_d) * (max_d / min_d);
    }
    if (t.condition_ > kMaxCondition) {
        throw std::invalid_argument("whiten: transport too ill-conditioned");
    }
    return t;
}

std::vector<double> CodeTransport::apply_forward(const std::vector<double>& x) const {
    if (x.size() != n_) throw std::invalid_argument("transport: dimension mismatch");
    return matvec(a_, x);
}

std::vector<double> CodeTransport::apply_inverse(const std::vector<double>& y) const {
    if (y.size() != n_) throw std::invalid_argument("transport: dimension mismatch");
    std::vector<double> v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = y[i] - mu_[i];
    if (triangular_) {
        solve_lower(a_, v);
        return v;
    }
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < n_; ++i) w[i] = v[piv_[i]];
    for (std::size_t i = 0; i < n_; ++i) {
        double s = w[i];
        for (std::size_t k = 0; k < i; ++k) s -= lu_.at(i, k) * w[k];
        w[i] = s; // unit lower triangular
    }
    for (std::size_t i = n_; i-- > 0;) {
        double s = w[i];
        for (std::size_t k = i + 1; k < n_; ++k) s -= lu_.at(i, k) * w[k];
        w[i] = s / lu_.at(i, i);
    }
    return w;
}

std::vector<double> CodeTransport::color_noise(const std::vector<double>& z) const {
    std::vector<double> out = apply_forward(z);
    for (std::size_t i = 0; i < n_; ++i) out[i] += mu_[i];
    return out;
}

Matrix CodeTransport::inverse_matrix() const {
    Matrix inv(n_);
    std::vector<double> y(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        // apply_inverse subtracts mu; add it back so we invert the pure matrix.
        for (std::size_t i = 0; i < n_; ++i) y[i] = mu_[i] + (i == j ? 1.0 : 0.0);
        const std::vector<double> col = apply_inverse(y);
        for (std::size_t i = 0; i < n_; ++i) inv.at(i, j) = col[i];
    }
    return inv;
}

std::vector<double> transport_encoder(const CodeTransport& t,
                                      const std::vector<double>& codeword_white) {
    return t.apply_forward(codeword_white);
}

std::vector<double> transport_decoder(const CodeTransport& t,
                                      const std::vector<double>& received) {
    return t.apply_inverse(received);
}

KlPair kl_invariance_check(const CodeTransport& transport, const Matrix& input_cov) {
    const std::size_t n = transport.dim();
    if (input_cov.n != n) {
        throw std::invalid_argument("kl_invariance_check: dimension mismatch");
    }
    if (!is_psd(input_cov)) {
        throw std::invalid_argument("kl_invariance_check: input covariance must be PSD");
    }

    // White side: D(N(0, I + S) || N(0, I)) = (tr S - ln det(I + S)) / 2.
    Matrix eye_s = input_cov;
    double tr_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tr_s += input_cov.at(i, i);
        eye_s.at(i, i) += 1.0;
    }
    const Matrix l_white = cholesky(eye_s);
    const double kl_white = 0.5 * (tr_s - log_det_cholesky(l_white));

    // Colored side, computed from the transported covariances.
    const Matrix& a = transport.forward_matrix();
    Matrix at(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) at.at(i, j) = a.at(j, i);
    }
    const Matrix c0 = matmul(a, at);             // noise covariance
    const Matrix c1 = matmul(matmul(a, eye_s), at); // output covariance
    const Matrix l0 = cholesky(c0);
    const Matrix l1 = cholesky(c1);
    // tr(C0^{-1} C1) via triangular solves against each column of C1.
    double trace = 0.0;
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = c1.at(i, j);
        solve_lower(l0, col);
        solve_upper_transposed(l0, col);
        trace += col[j];
    }
    const double kl_colored =
        0.5 * (trace - static_cast<double>(n) - log_det_cholesky(l1) + log_det_cholesky(l0));
    return {kl_colored, kl_white};
}

} // namespace covert

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ggdist.hpp"

namespace covert {

// Minimal dense square matrix, row major.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a; // n * n

    Matrix() = default;
    explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& x, const Matrix& y);
std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

// Gaussian noise with memory N(mu, sigma), or the general mixed branch
// Z^n = A * Ztilde^n with i.i.d. generalized Gaussian base noise.
struct ColoredNoiseModel {
    std::size_t n;
    std::vector<double> mu;
    Matrix sigma;                 // Gaussian branch
    std::optional<Matrix> mixing; // general invertible A
    std::optional<GGParams> base; // base law of Ztilde entries (mixed branch)

    static ColoredNoiseModel gaussian(std::vector<double> mu, Matrix sigma);
    static ColoredNoiseModel ar1(std::size_t n, double rho);
    static ColoredNoiseModel mixed(Matrix a, const GGParams& base);
};

// Invertible affine map Z = A * Ztilde + mu together with its inverse.
class CodeTransport {
public:
    std::size_t dim() const { return n_; }
    const std::vector<double>& offset() const { return mu_; }
    const Matrix& forward_matrix() const { return a_; }
    Matrix inverse_matrix() const;
    double condition_estimate() const { return condition_; }

    // y = A * x + no offset (codeword transport).
    std::vector<double> apply_forward(const std::vector<double>& x) const;
    // x = A^{-1} * (y - mu).
    std::vector<double> apply_inverse(const std::vector<double>& y) const;
    // Colored noise from white noise: A * z + mu.
    std::vector<double> color_noise(const std::vector<double>& z) const;

    friend CodeTransport whiten(const ColoredNoiseModel& model);

private:
    std::size_t n_ = 0;
    Matrix a_;
    std::vector<double> mu_;
    double condition_ = 1.0;
    bool triangular_ = false;
    // LU with partial pivoting for the general branch.
    Matrix lu_;
    std::vector<std::size_t> piv_;
};

// Cholesky (Gaussian branch) or the given mixing matrix; throws on a
// non-positive-definite sigma (naming the offending leading minor) or a
// singular / badly conditioned mixing matrix.
CodeTransport whiten(const ColoredNoiseModel& model);

struct KlPair {
    double kl_colored;
    double kl_white;
};

// Closed-form multivariate Gaussian KL on both sides of the transport, for
// a Gaussian input with covariance input_cov on the white channel.
KlPair kl_invariance_check(const CodeTransport& transport, const Matrix& input_cov);

// Encoder/decoder transport per the channel-equivalence construction.
std::vector<double> transport_encoder(const CodeTransport& t, const std::vector<double>& codeword_white);
std::vector<double> transport_decoder(const CodeTransport& t, const std::vector<double>& received);

} // namespace covert

#pragma once

#include <Eigen/Dense>

#include <string>

namespace kcc {

enum class KernelKind { gaussian, linear, polynomial };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/**
 * Kernel function and its parameters.
 *
 * gaussian:   k(x, y) = exp(-|x - y|^2 / (2 sigma1^2))
 * linear:     k(x, y) = <x, y>
 * polynomial: k(x, y) = (<x, y> + offset)^degree
 */
struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double sigma1 = 1.0;
    int degree = 2;
    double offset = 1.0;

    static KernelSpec gaussian(double sigma1) { return {KernelKind::gaussian, sigma1, 2, 1.0}; }
    static KernelSpec linear() { return {KernelKind::linear, 1.0, 1, 0.0}; }
    static KernelSpec polynomial(int degree, double offset) {
        return {KernelKind::polynomial, 1.0, degree, offset};
    }

    /// Throws InvalidInput when a parameter is outside its domain.
    void validate() const;
};

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// Symmetric kernel matrix. `jitter` is the diagonal shift applied by the
/// embedding step; `entries` never include it.
struct GramMatrix {
    Eigen::MatrixXd entries;
    double jitter = 0.0;

    Eigen::Index n() const { return entries.rows(); }
    /// entries + jitter * I, the matrix the embedding actually factors.
    Eigen::MatrixXd effective() const;
};

/// Rows of `data` are points. Requires at least two rows and finite entries.
GramMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& data);

struct JitterPolicy {
    enum class Mode { none, fixed, escalating };
    Mode mode = Mode::escalating;
    double epsilon = 0.0; ///< used by Mode::fixed only

    static JitterPolicy none() { return {Mode::none, 0.0}; }
    static JitterPolicy fixed(double eps) { return {Mode::fixed, eps}; }
    static JitterPolicy escalating() { return {Mode::escalating, 0.0}; }
};

/// Upper-triangular Z with Z^T Z = K + jitter * I. Column i is the embedded point z_i.
struct Embedding {
    Eigen::MatrixXd Z;
    double jitter = 0.0;

    Eigen::Index n() const { return Z.cols(); }
    auto point(Eigen::Index i) const { return Z.col(i); }
};

/// Cholesky factorization K + eps*I = Z^T Z. Under the escalating policy eps is
/// the first of {0, 1e-10, 1e-8, 1e-6} * tr(K)/n that succeeds.
/// Throws NotPositiveDefinite carrying the failing leading minor of the last attempt.
Embedding cholesky_embed(const GramMatrix& K, JitterPolicy policy = JitterPolicy::escalating());

/// Solves (Z^T Z) v = rhs by a forward and a backward triangular solve.
Eigen::VectorXd gram_solve(const Embedding& emb, const Eigen::Ref<const Eigen::VectorXd>& rhs);

/// Solves Z x = rhs column-wise, mapping embedded vectors a = Z alpha back to alpha.
Eigen::MatrixXd embedding_solve(const Embedding& emb, const Eigen::MatrixXd& rhs);

} // namespace kcc

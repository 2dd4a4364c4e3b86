#include "kcc/kernel.hpp"

#include "kcc/error.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace kcc {

std::string to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    }
    return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "gaussian") return KernelKind::gaussian;
    if (name == "linear") return KernelKind::linear;
    if (name == "polynomial") return KernelKind::polynomial;
    throw InvalidInput("unknown kernel kind '" + name + "'");
}

void KernelSpec::validate() const {
    if (kind == KernelKind::gaussian && !(sigma1 > 0.0 && std::isfinite(sigma1)))
        throw InvalidInput("gaussian kernel requires sigma1 > 0");
    if (kind == KernelKind::polynomial) {
        if (degree < 1) throw InvalidInput("polynomial kernel requires degree >= 1");
        if (!std::isfinite(offset)) throw InvalidInput("polynomial kernel offset must be finite");
    }
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (x.size() != y.size() || x.size() == 0)
        throw InvalidInput("kernel arguments must have equal, non-zero dimension");
    switch (spec.kind) {
    case KernelKind::gaussian:
        return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma1 * spec.sigma1));
    case KernelKind::linear:
        return x.dot(y);
    case KernelKind::polynomial:
        return std::pow(x.dot(y) + spec.offset, spec.degree);
    }
    return 0.0;
}

Eigen::MatrixXd GramMatrix::effective() const {
    Eigen::MatrixXd k = entries;
    k.diagonal().array() += jitter;
    return k;
}

GramMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& data) {
    spec.validate();
    if (data.rows() < 2) throw InvalidInput("gram matrix needs at least two points");
    if (data.cols() < 1) throw InvalidInput("data must have at least one feature");
    if (!data.allFinite()) throw InvalidInput("data contains non-finite entries");

    const Eigen::Index n = data.rows();
    const Eigen::MatrixXd points = data.transpose(); // contiguous columns
    GramMatrix g;
    g.entries.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = eval_kernel(spec, points.col(i), points.col(j));
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    }
    return g;
}

namespace {

// Upper Cholesky of `a`; returns 0 on success or the 1-based order of the
// first leading minor whose pivot is not positive.
std::size_t upper_cholesky(const Eigen::MatrixXd& a, Eigen::MatrixXd& z) {
    const Eigen::Index n = a.rows();
    z.setZero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double pivot = a(k, k) - z.col(k).head(k).squaredNorm();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return static_cast<std::size_t>(k + 1);
        const double d = std::sqrt(pivot);
        z(k, k) = d;
        for (Eigen::Index j = k + 1; j < n; ++j)
            z(k, j) = (a(k, j) - z.col(k).head(k).dot(z.col(j).head(k))) / d;
    }
    return 0;
}

} // namespace

Embedding cholesky_embed(const GramMatrix& K, JitterPolicy policy) {
    const Eigen::Index n = K.n();
    if (n == 0 || K.entries.cols() != n) throw InvalidInput("kernel matrix must be square and non-empty");
    if (!K.entries.allFinite()) throw InvalidInput("kernel matrix contains non-finite entries");
    if ((K.entries - K.entries.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw InvalidInput("kernel matrix is not symmetric");

    std::vector<double> attempts;
    switch (policy.mode) {
    case JitterPolicy::Mode::none: attempts = {0.0}; break;
    case JitterPolicy::Mode::fixed:
        if (!(policy.epsilon >= 0.0)) throw InvalidInput("jitter must be non-negative");
        attempts = {policy.epsilon};
        break;
    case JitterPolicy::Mode::escalating: {
        const double scale = K.entries.trace() / static_cast<double>(n);
        attempts = {0.0, 1e-10 * scale, 1e-8 * scale, 1e-6 * scale};
        break;
    }
    }

    Embedding emb;
    std::size_t failed = 0;
    for (double eps : attempts) {
        Eigen::MatrixXd shifted = K.entries;
        shifted.diagonal().array() += eps;
        failed = upper_cholesky(shifted, emb.Z);
        if (failed == 0) {
            emb.jitter = eps;
            return emb;
        }
    }
    throw NotPositiveDefinite(failed, attempts.back());
}

namespace {

void require_nonsingular(const Embedding& emb) {
    if (emb.Z.rows() != emb.Z.cols()) throw InvalidInput("embedding must be square");
    for (Eigen::Index i = 0; i < emb.n(); ++i)
        if (emb.Z(i, i) == 0.0)
            throw SingularEmbedding("embedding has a zero diagonal element at " + std::to_string(i));
}

} // namespace

Eigen::VectorXd gram_solve(const Embedding& emb, const Eigen::Ref<const Eigen::VectorXd>& rhs) {
    require_nonsingular(emb);
    if (rhs.size() != emb.n()) throw InvalidInput("right-hand side length does not match embedding");
    const auto upper = emb.Z.triangularView<Eigen::Upper>();
    Eigen::VectorXd y = upper.transpose().solve(rhs);
    return upper.solve(y);
}

Eigen::MatrixXd embedding_solve(const Embedding& emb, const Eigen::MatrixXd& rhs) {
    require_nonsingular(emb);
    if (rhs.rows() != emb.n()) throw InvalidInput("right-hand side rows do not match embedding");
    return emb.Z.triangularView<Eigen::Upper>().solve(rhs);
}

} // namespace kcc

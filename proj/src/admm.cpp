#include "kcc/admm.hpp"

#include "kcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kcc {

std::string to_string(PairStorage storage) {
    return storage == PairStorage::dense ? "dense" : "implicit";
}

PairStorage pair_storage_from_string(const std::string& name) {
    if (name == "dense") return PairStorage::dense;
    if (name == "implicit") return PairStorage::implicit;
    throw InvalidInput("unknown pair storage '" + name + "'");
}

void AdmmConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be >= 0");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("rho must be > 0");
    if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");
    if (!(tol_abs > 0.0)) throw InvalidInput("tol_abs must be > 0");
    if (!(tol_rel > 0.0)) throw InvalidInput("tol_rel must be > 0");
}

Eigen::VectorXd soft_threshold_block(const Eigen::Ref<const Eigen::VectorXd>& t, double threshold,
                                     double norm_of_t) {
    if (!(threshold >= 0.0)) throw InvalidInput("soft-threshold level must be non-negative");
    if (threshold == 0.0) return t;
    if (norm_of_t <= threshold) return Eigen::VectorXd::Zero(t.size());
    return (1.0 - threshold / norm_of_t) * t;
}

double objective_embedded(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A, const WeightGraph& g,
                          double gamma) {
    if (Z.rows() != A.rows() || Z.cols() != A.cols() || Z.cols() != g.n)
        throw InvalidInput("objective: inconsistent dimensions");
    double penalty = 0.0;
    for (const auto& e : g.edges) penalty += e.weight * (A.col(e.i) - A.col(e.j)).norm();
    return 0.5 * (Z - A).squaredNorm() + gamma * penalty;
}

double objective_kernel(const Eigen::MatrixXd& K, const Eigen::MatrixXd& alpha, const WeightGraph& g,
                        double gamma) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n || alpha.rows() != n || alpha.cols() != n || g.n != n)
        throw InvalidInput("objective: inconsistent dimensions");
    const Eigen::MatrixXd resid = alpha - Eigen::MatrixXd::Identity(n, n);
    const double loss = 0.5 * (resid.array() * (K * resid).array()).sum();
    double penalty = 0.0;
    for (const auto& e : g.edges) {
        const Eigen::VectorXd d = alpha.col(e.i) - alpha.col(e.j);
        penalty += e.weight * std::sqrt(std::max(0.0, d.dot(K * d)));
    }
    return loss + gamma * penalty;
}

namespace {

// ADMM sweeps in centroid space. With Gram = false the metric is the identity
// and every image quantity aliases the plain one. With Gram = true, points are
// kernel coefficients alpha_i and each quantity x travels with its image K x,
// so K-norms cost O(n) and no inverse of K is formed:
//   (alpha, beta, mu = K^{-1} lambda) have images (K alpha, K beta, lambda).
//
// Pair variables p (v or beta) and q (eta or mu) are stored per pair. In
// implicit storage only positive-weight pairs are stored; the rest follow
// closed forms in the last iterates (see add_zero_pair_sums).
template <bool Gram>
class AdmmEngine {
public:
    AdmmEngine(const Eigen::MatrixXd& target, const Eigen::MatrixXd* target_image, const WeightGraph& g,
               const AdmmConfig& cfg)
        : c_(target), cimg_(Gram ? *target_image : target), g_(g), cfg_(cfg),
          n_(static_cast<int>(target.cols())), m_(target.rows()), rho_(cfg.rho),
          implicit_(cfg.storage == PairStorage::implicit) {
        build_pairs();
        X_ = c_;
        X_prev_ = X_;
        delta_prev_.setZero(m_, n_);
        if constexpr (Gram) {
            Y_ = cimg_;
            Y_prev_ = Y_;
            delta_prev_img_.setZero(m_, n_);
        }
        csum_ = c_.rowwise().sum();
        csum_img_ = cimg_.rowwise().sum();

        const auto np = static_cast<Eigen::Index>(first_.size());
        P_.resize(m_, np);
        Q_.setZero(m_, np);
        if constexpr (Gram) {
            PI_.resize(m_, np);
            QI_.setZero(m_, np);
        }
        for (Eigen::Index k = 0; k < np; ++k) {
            P_.col(k) = X_.col(first_[k]) - X_.col(second_[k]);
            if constexpr (Gram) PI_.col(k) = Y_.col(first_[k]) - Y_.col(second_[k]);
        }
        acc_.setZero(m_, n_);
        if constexpr (Gram) acc_img_.setZero(m_, n_);
        for (Eigen::Index k = 0; k < np; ++k) {
            const auto u = (Q_.col(k) + rho_ * P_.col(k) - (implicit_ ? rho_ : 0.0) * P_.col(k)).eval();
            acc_.col(first_[k]) += u;
            acc_.col(second_[k]) -= u;
            if constexpr (Gram) {
                const auto ui = (QI_.col(k) + rho_ * PI_.col(k) - (implicit_ ? rho_ : 0.0) * PI_.col(k)).eval();
                acc_img_.col(first_[k]) += ui;
                acc_img_.col(second_[k]) -= ui;
            }
        }

        total_pairs_ = static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0;
        storage_bytes_ = static_cast<std::size_t>(np) *
                         (static_cast<std::size_t>(m_) * sizeof(double) * (Gram ? 4 : 2) +
                          2 * sizeof(int) + 2 * sizeof(double));
    }

    SolverResult run() {
        SolverResult res;
        res.pair_storage_bytes = storage_bytes_;
        res.initial_objective = loss() + cfg_.gamma * penalty();
        const double denom = 1.0 + static_cast<double>(n_) * rho_;
        const double sqrt_pairs = std::sqrt(total_pairs_);

        for (int it = 1; it <= cfg_.max_iter; ++it) {
            update_points(denom);
            Sums s = update_pairs();
            if (implicit_) add_zero_pair_sums(s);

            const double primal = std::sqrt(std::max(0.0, s.primal));
            const double dual = rho_ * std::sqrt(std::max(0.0, s.dual));
            const double tol_pri = sqrt_pairs * cfg_.tol_abs +
                                   cfg_.tol_rel * std::sqrt(std::max({0.0, s.v_norm, s.diff_norm}));
            const double tol_dual = sqrt_pairs * cfg_.tol_abs +
                                    cfg_.tol_rel * std::sqrt(std::max(0.0, s.dual_var_norm));
            const double obj = loss() + cfg_.gamma * s.penalty;
            if (!std::isfinite(primal) || !std::isfinite(dual) || !std::isfinite(obj)) throw Divergence(it);

            res.iterations = it;
            res.primal_residual = primal;
            res.dual_residual = dual;
            res.primal_tolerance = tol_pri;
            res.dual_tolerance = tol_dual;
            res.objective = obj;
            if (cfg_.record_trace) res.trace.push_back({it, primal, dual, obj});
            if (primal <= tol_pri && dual <= tol_dual) {
                res.converged = true;
                break;
            }
        }
        res.max_pair_gap = max_pair_gap();
        res.centroids = X_;
        return res;
    }

private:
    struct Sums {
        double primal = 0.0;
        double dual = 0.0;
        double v_norm = 0.0;
        double diff_norm = 0.0;
        double dual_var_norm = 0.0;
        double penalty = 0.0;
        // stored-edge parts of the closed-form zero-pair energies
        double edge_delta = 0.0;
        double edge_eps = 0.0;
        double edge_v = 0.0;
        double edge_diff = 0.0;
    };

    const Eigen::MatrixXd& Y() const {
        if constexpr (Gram) return Y_;
        else return X_;
    }
    const Eigen::MatrixXd& Y_prev() const {
        if constexpr (Gram) return Y_prev_;
        else return X_prev_;
    }
    const Eigen::MatrixXd& delta_prev_img() const {
        if constexpr (Gram) return delta_prev_img_;
        else return delta_prev_;
    }

    void build_pairs() {
        if (implicit_) {
            for (const auto& e : g_.edges) add_pair(e.i, e.j, e.weight);
            return;
        }
        auto edge = g_.edges.begin();
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double w = 0.0;
                if (edge != g_.edges.end() && edge->i == i && edge->j == j) w = (edge++)->weight;
                add_pair(i, j, w);
            }
    }

    void add_pair(int i, int j, double w) {
        first_.push_back(i);
        second_.push_back(j);
        weight_.push_back(w);
        sigma_.push_back(cfg_.gamma * w / rho_);
    }

    // x_i <- [c_i + acc_i + rho sum_k c_k (+ rho (n x_i - sum_k x_k) for implicit)] / (1 + n rho).
    // In implicit storage acc_ already carries -rho (x_i - x_j) for stored
    // edges, so the bracket is rho * sum over zero-weight j of (x_i - x_j).
    void update_points(double denom) {
        X_prev_.swap(X_);
        X_ = c_ + acc_;
        X_.colwise() += rho_ * csum_;
        if (implicit_) {
            X_ += (rho_ * static_cast<double>(n_)) * X_prev_;
            X_.colwise() -= rho_ * X_prev_.rowwise().sum();
        }
        X_ /= denom;

        if constexpr (Gram) {
            Y_prev_.swap(Y_);
            Y_ = cimg_ + acc_img_;
            Y_.colwise() += rho_ * csum_img_;
            if (implicit_) {
                Y_ += (rho_ * static_cast<double>(n_)) * Y_prev_;
                Y_.colwise() -= rho_ * Y_prev_.rowwise().sum();
            }
            Y_ /= denom;
        }
    }

    Sums update_pairs() {
        Sums s;
        acc_.setZero();
        if constexpr (Gram) acc_img_.setZero();
        last_edge_gap_ = 0.0;

        const Eigen::Index m = m_;
        const double rho = rho_;
        const double inv_rho = 1.0 / rho_;
        const double edge_shift = implicit_ ? rho_ : 0.0;
        const Eigen::MatrixXd& Yc = Y();
        const Eigen::MatrixXd& Yp = Y_prev();
        const Eigen::MatrixXd& DPi = delta_prev_img();

        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(first_.size()); ++k) {
            const int i = first_[k];
            const int j = second_[k];
            const double* xi = X_.col(i).data();
            const double* xj = X_.col(j).data();
            const double* yi = Yc.col(i).data();
            const double* yj = Yc.col(j).data();
            double* p = P_.col(k).data();
            double* q = Q_.col(k).data();
            double* pimg = nullptr;
            double* qimg = nullptr;
            if constexpr (Gram) {
                pimg = PI_.col(k).data();
                qimg = QI_.col(k).data();
            }

            // dual step with the previous pair variable, then the threshold argument norm
            double tt = 0.0;
            for (Eigen::Index r = 0; r < m; ++r) {
                const double d = xi[r] - xj[r];
                const double qn = q[r] + rho * (p[r] - d);
                q[r] = qn;
                const double t = d - qn * inv_rho;
                if constexpr (Gram) {
                    const double di = yi[r] - yj[r];
                    const double qin = qimg[r] + rho * (pimg[r] - di);
                    qimg[r] = qin;
                    tt += t * (di - qin * inv_rho);
                } else {
                    tt += t * t;
                }
            }

            const double sigma = sigma_[static_cast<std::size_t>(k)];
            double scale = 1.0;
            if (sigma > 0.0) {
                const double nt = std::sqrt(std::max(0.0, tt));
                scale = nt <= sigma ? 0.0 : 1.0 - sigma / nt;
            }

            double gap = 0.0, dual = 0.0, vn = 0.0, dn = 0.0, hn = 0.0;
            double e_delta = 0.0, e_eps = 0.0, e_v = 0.0;
            double* acc_i = acc_.col(i).data();
            double* acc_j = acc_.col(j).data();
            const double* xpi = X_prev_.col(i).data();
            const double* xpj = X_prev_.col(j).data();
            const double* dpi = delta_prev_.col(i).data();
            const double* dpj = delta_prev_.col(j).data();
            if constexpr (!Gram) {
                for (Eigen::Index r = 0; r < m; ++r) {
                    const double d = xi[r] - xj[r];
                    const double pn = scale * (d - q[r] * inv_rho);
                    const double u = q[r] + rho * pn - edge_shift * d;
                    acc_i[r] += u;
                    acc_j[r] -= u;
                    gap += (pn - d) * (pn - d);
                    dual += (pn - p[r]) * (pn - p[r]);
                    vn += pn * pn;
                    dn += d * d;
                    hn += q[r] * q[r];
                    if (implicit_) {
                        const double dp = xpi[r] - xpj[r];
                        const double dd = d - dp;
                        const double eps = 2.0 * dd - (dpi[r] - dpj[r]);
                        const double v = 2.0 * d - dp;
                        e_delta += dd * dd;
                        e_eps += eps * eps;
                        e_v += v * v;
                    }
                    p[r] = pn;
                }
            } else {
                double* acc_ii = acc_img_.col(i).data();
                double* acc_ij = acc_img_.col(j).data();
                const double* ypi = Yp.col(i).data();
                const double* ypj = Yp.col(j).data();
                const double* dpii = DPi.col(i).data();
                const double* dpij = DPi.col(j).data();
                for (Eigen::Index r = 0; r < m; ++r) {
                    const double d = xi[r] - xj[r];
                    const double di = yi[r] - yj[r];
                    const double pn = scale * (d - q[r] * inv_rho);
                    const double pin = scale * (di - qimg[r] * inv_rho);
                    const double u = q[r] + rho * pn - edge_shift * d;
                    const double ui = qimg[r] + rho * pin - edge_shift * di;
                    acc_i[r] += u;
                    acc_j[r] -= u;
                    acc_ii[r] += ui;
                    acc_ij[r] -= ui;
                    gap += (pn - d) * (pin - di);
                    dual += (pn - p[r]) * (pin - pimg[r]);
                    vn += pn * pin;
                    dn += d * di;
                    hn += q[r] * qimg[r];
                    if (implicit_) {
                        const double dp = xpi[r] - xpj[r];
                        const double dpim = ypi[r] - ypj[r];
                        const double dd = d - dp;
                        const double ddi = di - dpim;
                        const double eps = 2.0 * dd - (dpi[r] - dpj[r]);
                        const double epsi = 2.0 * ddi - (dpii[r] - dpij[r]);
                        e_delta += dd * ddi;
                        e_eps += eps * epsi;
                        e_v += (2.0 * d - dp) * (2.0 * di - dpim);
                    }
                    p[r] = pn;
                    pimg[r] = pin;
                }
            }

            s.primal += gap;
            s.dual += dual;
            s.v_norm += vn;
            s.diff_norm += dn;
            s.dual_var_norm += hn;
            s.penalty += weight_[static_cast<std::size_t>(k)] * std::sqrt(std::max(0.0, dn));
            s.edge_delta += e_delta;
            s.edge_eps += e_eps;
            s.edge_v += e_v;
            s.edge_diff += dn;
            last_edge_gap_ = std::max(last_edge_gap_, gap);
        }
        return s;
    }

    // Zero-weight pairs after sweep m, with d^m = x_i - x_j and delta = x^m - x^{m-1}:
    //   eta = -rho (d^m - d^{m-1}),  v = 2 d^m - d^{m-1},  v - d^m = d^m - d^{m-1},
    //   v^m - v^{m-1} = 2 (d^m - d^{m-1}) - (d^{m-1} - d^{m-2}).
    // Each energy is (all pairs) - (stored edges); all-pairs energies use
    // sum_{i<j} <f_i - f_j, M(f_i - f_j)> = n sum_i <f_i, M f_i> - <sum f, M sum f>.
    void add_zero_pair_sums(Sums& s) {
        const Eigen::MatrixXd& Yc = Y();
        const Eigen::MatrixXd& Yp = Y_prev();
        const Eigen::MatrixXd& DPi = delta_prev_img();
        const Eigen::Index m = m_;

        sum_buf_.setZero(m, 8);
        double sq_delta = 0.0, sq_eps = 0.0, sq_v = 0.0, sq_x = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double* x = X_.col(i).data();
            const double* xp = X_prev_.col(i).data();
            const double* dp = delta_prev_.col(i).data();
            const double* y = Yc.col(i).data();
            const double* yp = Yp.col(i).data();
            const double* dpi = DPi.col(i).data();
            double* sd = sum_buf_.col(0).data();
            double* se = sum_buf_.col(1).data();
            double* sv = sum_buf_.col(2).data();
            double* sx = sum_buf_.col(3).data();
            double* sdi = sum_buf_.col(4).data();
            double* sei = sum_buf_.col(5).data();
            double* svi = sum_buf_.col(6).data();
            double* sxi = sum_buf_.col(7).data();
            for (Eigen::Index r = 0; r < m; ++r) {
                const double delta = x[r] - xp[r];
                const double eps = 2.0 * delta - dp[r];
                const double v = 2.0 * x[r] - xp[r];
                const double delta_i = y[r] - yp[r];
                const double eps_i = 2.0 * delta_i - dpi[r];
                const double v_i = 2.0 * y[r] - yp[r];
                sq_delta += delta * delta_i;
                sq_eps += eps * eps_i;
                sq_v += v * v_i;
                sq_x += x[r] * y[r];
                sd[r] += delta;
                se[r] += eps;
                sv[r] += v;
                sx[r] += x[r];
                sdi[r] += delta_i;
                sei[r] += eps_i;
                svi[r] += v_i;
                sxi[r] += y[r];
            }
        }
        const double nd = static_cast<double>(n_);
        auto all_pairs = [&](double sq, int col) {
            return nd * sq - sum_buf_.col(col).dot(sum_buf_.col(col + 4));
        };
        const double z_delta = std::max(0.0, all_pairs(sq_delta, 0) - s.edge_delta);
        s.primal += z_delta;
        s.dual_var_norm += rho_ * rho_ * z_delta;
        s.dual += std::max(0.0, all_pairs(sq_eps, 1) - s.edge_eps);
        s.v_norm += std::max(0.0, all_pairs(sq_v, 2) - s.edge_v);
        s.diff_norm += std::max(0.0, all_pairs(sq_x, 3) - s.edge_diff);

        delta_prev_ = X_ - X_prev_;
        if constexpr (Gram) delta_prev_img_ = Y_ - Y_prev_;
    }

    double max_pair_gap() const {
        double gap = last_edge_gap_;
        if (implicit_ && n_ > 1) {
            // delta_prev_ holds the last sweep's delta
            const Eigen::MatrixXd& d = delta_prev_;
            const Eigen::MatrixXd& di = delta_prev_img();
            auto edge = g_.edges.begin();
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j) {
                    if (edge != g_.edges.end() && edge->i == i && edge->j == j) {
                        ++edge;
                        continue;
                    }
                    gap = std::max(gap, (d.col(i) - d.col(j)).dot(di.col(i) - di.col(j)));
                }
        }
        return std::sqrt(std::max(0.0, gap));
    }

    double loss() const {
        if constexpr (Gram) return 0.5 * ((X_ - c_).array() * (Y_ - cimg_).array()).sum();
        else return 0.5 * (X_ - c_).squaredNorm();
    }

    double penalty() const {
        const Eigen::MatrixXd& Yc = Y();
        double total = 0.0;
        for (const auto& e : g_.edges) {
            const double sq = (X_.col(e.i) - X_.col(e.j)).dot(Yc.col(e.i) - Yc.col(e.j));
            total += e.weight * std::sqrt(std::max(0.0, sq));
        }
        return total;
    }

    const Eigen::MatrixXd& c_;
    const Eigen::MatrixXd& cimg_;
    const WeightGraph& g_;
    const AdmmConfig& cfg_;
    int n_;
    Eigen::Index m_;
    double rho_;
    bool implicit_;
    double total_pairs_ = 0.0;
    std::size_t storage_bytes_ = 0;
    double last_edge_gap_ = 0.0;

    std::vector<int> first_, second_;
    std::vector<double> weight_, sigma_;

    Eigen::MatrixXd X_, Y_, X_prev_, Y_prev_;
    Eigen::MatrixXd delta_prev_, delta_prev_img_;
    Eigen::VectorXd csum_, csum_img_;
    Eigen::MatrixXd P_, Q_, PI_, QI_;
    Eigen::MatrixXd acc_, acc_img_;
    Eigen::MatrixXd sum_buf_;
};

} // namespace

SolverResult solve_embedded(const Eigen::MatrixXd& points, const WeightGraph& g, const AdmmConfig& cfg) {
    cfg.validate();
    if (points.cols() != g.n || points.cols() < 1) throw InvalidInput("weight graph size does not match points");
    if (!points.allFinite()) throw InvalidInput("embedded points contain non-finite entries");
    AdmmEngine<false> engine(points, nullptr, g, cfg);
    return engine.run();
}

SolverResult solve_embedded(const Embedding& emb, const WeightGraph& g, const AdmmConfig& cfg) {
    return solve_embedded(emb.Z, g, cfg);
}

SolverResult solve_kernel_space(const GramMatrix& K, const Embedding& emb, const WeightGraph& g,
                                const AdmmConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = K.n();
    if (K.entries.cols() != n || emb.n() != n || g.n != n)
        throw InvalidInput("kernel matrix, embedding and weight graph sizes differ");
    if (K.jitter != 0.0 && K.jitter != emb.jitter)
        throw InvalidInput("kernel matrix jitter does not match the embedding");
    for (Eigen::Index i = 0; i < n; ++i)
        if (emb.Z(i, i) == 0.0) throw SingularEmbedding("embedding has a zero diagonal element");

    Eigen::MatrixXd metric = K.entries;
    metric.diagonal().array() += emb.jitter;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    AdmmEngine<true> engine(identity, &metric, g, cfg);
    SolverResult res = engine.run();
    res.coefficients = std::move(res.centroids);
    res.centroids = emb.Z.triangularView<Eigen::Upper>() * res.coefficients;
    return res;
}

} // namespace kcc

#pragma once

#include "kcc/kernel.hpp"
#include "kcc/weight_graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace kcc {

/// How pair variables (v_ij, eta_ij or beta_ij, lambda_ij) are held.
///
/// dense:    one stored vector per pair for all n(n-1)/2 pairs i < j.
/// implicit: only positive-weight pairs are stored. Zero-weight pairs have a
///           zero soft-threshold, so after every sweep their variables are
///           fixed linear functions of the last two centroid iterates and are
///           folded into the point update in closed form. Same iterates as
///           dense up to rounding, at O(n^2 + |E| n) memory per sweep.
enum class PairStorage { dense, implicit };

std::string to_string(PairStorage storage);
PairStorage pair_storage_from_string(const std::string& name);

struct AdmmConfig {
    double gamma = 1.0;  ///< fusion strength
    double rho = 1e-3;   ///< augmented-Lagrangian penalty
    int max_iter = 10000;
    double tol_abs = 1e-6;
    double tol_rel = 1e-4;
    PairStorage storage = PairStorage::implicit;
    bool record_trace = true;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double objective = 0.0;
};

struct SolverResult {
    Eigen::MatrixXd centroids;    ///< column i is the embedded centroid a_i
    Eigen::MatrixXd coefficients; ///< kernel-space solver only: column i is alpha_i
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double primal_tolerance = 0.0;
    double dual_tolerance = 0.0;
    /// max over pairs of |v_ij - a_i + a_j| after the final sweep.
    double max_pair_gap = 0.0;
    double initial_objective = 0.0;
    double objective = 0.0;
    std::vector<IterationRecord> trace;
    /// Bytes held by pair-indexed state during the solve.
    std::size_t pair_storage_bytes = 0;
};

/// ADMM on the embedded points (columns of `points`, any dimension m).
/// Initialization a_i = z_i, v_ij = z_i - z_j, eta_ij = 0. Each sweep updates
/// all a_i, then all eta_ij, then all v_ij. Throws Divergence on non-finite iterates.
SolverResult solve_embedded(const Eigen::MatrixXd& points, const WeightGraph& g, const AdmmConfig& cfg);
SolverResult solve_embedded(const Embedding& emb, const WeightGraph& g, const AdmmConfig& cfg);

/// The same iteration in kernel coefficients alpha_i (a_i = Z alpha_i), with
/// beta_ij and lambda_ij in place of v_ij and eta_ij and all norms in the
/// K-metric. K^{-1} lambda_ij is carried alongside lambda_ij.
SolverResult solve_kernel_space(const GramMatrix& K, const Embedding& emb, const WeightGraph& g,
                                const AdmmConfig& cfg);

/// Block soft-threshold: zero when norm_of_t <= threshold, else (1 - threshold/norm_of_t) t.
Eigen::VectorXd soft_threshold_block(const Eigen::Ref<const Eigen::VectorXd>& t, double threshold,
                                     double norm_of_t);

/// 1/2 sum |z_i - a_i|^2 + gamma sum_{i<j} w_ij |a_i - a_j|, columns are points.
double objective_embedded(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A, const WeightGraph& g,
                          double gamma);

/// 1/2 sum (alpha_i - e_i)^T K (alpha_i - e_i) + gamma sum w_ij sqrt((alpha_i - alpha_j)^T K (alpha_i - alpha_j)).
double objective_kernel(const Eigen::MatrixXd& K, const Eigen::MatrixXd& alpha, const WeightGraph& g,
                        double gamma);

} // namespace kcc

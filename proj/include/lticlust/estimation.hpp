#pragma once

#include <span>
#include <vector>

#include "lticlust/lti.hpp"

namespace lticlust {

/// Stacked regression data for horizon L over N trajectories.
/// Columns of Y and U are grouped by trajectory, T_f columns each when all
/// trajectories share a length.
struct DataMatrices {
    MatrixXd Y;  ///< p x sum_i T_f,i
    MatrixXd U;  ///< m(L+1) x sum_i T_f,i
    Index L = 0;
    Index N = 0;
    std::vector<Index> samples;  ///< T_f,i = T_i - L + 1 for each trajectory
};

/// Block-Toeplitz input matrix; column j stacks (u_{L+j}, u_{L+j-1}, ..., u_j).
/// Requires 0 <= L <= T - 1; yields T - L + 1 columns.
MatrixXd build_toeplitz_input(const TrajectoryData& traj, Index L);

/// Outputs aligned with build_toeplitz_input: column j is y_{L+j}.
/// y_0 is not observed, so this requires 1 <= L <= T - 1.
MatrixXd build_output_matrix(const TrajectoryData& traj, Index L);

DataMatrices build_data_matrices(std::span<const TrajectoryData> trajs, Index L);

struct LeastSquaresFit {
    MarkovBlock estimate;
    double sigma_min_U = 0.0;
    double sigma_max_U = 0.0;
    double condition() const { return sigma_max_U / sigma_min_U; }
};

/// Least-squares Markov estimate G = Y U^+ over all trajectories, with the
/// pseudoinverse taken through an SVD of U. Singular values below
/// 1e-10 * sigma_max count as zero; any such value raises IllConditionedError.
LeastSquaresFit ls_markov_fit(std::span<const TrajectoryData> trajs, Index L);

MarkovBlock ls_markov(std::span<const TrajectoryData> trajs, Index L);

/// Same estimator on prebuilt data matrices.
LeastSquaresFit ls_markov_fit(const DataMatrices& data, Index m);

/// Splits each trajectory's T_f columns into L+1 stride-(L+1) Page sets.
/// Set k holds columns k, k+(L+1), ..., k+(d-1)(L+1) of every trajectory,
/// d = floor(T_f / (L+1)); the remaining T_f - d(L+1) columns are dropped.
std::vector<std::vector<Index>> page_partition(Index L, Index T_f, Index N);

/// Overload taking the U matrix for a shape check (U.cols() == N * T_f).
std::vector<std::vector<Index>> page_partition(const MatrixXd& U, Index L, Index T_f, Index N);

struct SingularCertificate {
    double sigma_min;  ///< sigma_min(U)
    double bound;      ///< sqrt(sum_k sigma_min(U_Jk)^2) <= sigma_min
};

/// Compares sigma_min(U) to the lower bound assembled from disjoint column
/// subsets. Singular values are taken over the row dimension, so subsets
/// narrower than U has rows contribute zero.
SingularCertificate min_singular_certificate(const MatrixXd& U,
                                             const std::vector<std::vector<Index>>& partition);

/// Right-hand side of the multi-trajectory sample condition
///
///     N T_f >= L / (eps^2 sigma_u^2) * (p + (m+n) L + ln(N T / delta))^2 * Phi(L)
///     Phi(L) = max_k ||C_k A_k^L||^2 ||Gamma_inf(M_k)|| + sigma_w^2 ||Gamma_obs(M_k)||
///
/// with the unnamed universal constant set to 1. Only the ordering of values
/// is meaningful.
double sample_complexity_bound(std::span<const StateSpaceModel> models, const NoiseSpec& noise,
                               Index L, double eps, double delta, Index N, Index T);

double phi_factor(std::span<const StateSpaceModel> models, const NoiseSpec& noise, Index L);

}  // namespace lticlust

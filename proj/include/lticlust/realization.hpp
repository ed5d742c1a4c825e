#pragma once

#include "lticlust/lti.hpp"

namespace lticlust {

struct RealizationReport {
    StateSpaceModel model;
    VectorXd hankel_sv;  ///< singular values of H^-, non-increasing
    double sigma_n = 0.0;
    bool stable = false;
    MatrixXd observability;    ///< O = U_n S_n^{1/2}
    MatrixXd controllability;  ///< Ctrl = S_n^{1/2} V_n'
};

/// Ho-Kalman realization of order n from Markov blocks G_0..G_L.
///
/// With l = floor(L / 2), H is the l x (l+1) block Hankel matrix with block
/// (i, j) = G_{i+j+1}. H^- is its first l block columns and H^+ its last l
/// block columns (H^- shifted by one block). From the rank-n SVD
/// H^- ~ U_n S_n V_n':
///
///     O    = U_n S_n^{1/2}       Ctrl = S_n^{1/2} V_n'
///     C    = first p rows of O   B    = first m columns of Ctrl
///     A    = O^+ H^+ Ctrl^+      D    = G_0
///
/// The factors are balanced (O'O = Ctrl Ctrl' = S_n). Requires L >= 2n+1;
/// throws RankDeficiencyError when sigma_n(H^-) < 1e-12 sigma_1(H^-).
RealizationReport ho_kalman(const MarkovBlock& g, Index n);

/// Similarity-invariant model error: impulse-response distance over 0..L.
double realization_error(const StateSpaceModel& truth, const StateSpaceModel& estimate, Index L);

}  // namespace lticlust

#include "lticlust/realization.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "lticlust/errors.hpp"

namespace lticlust {

RealizationReport ho_kalman(const MarkovBlock& g, Index n)
{
    if (n < 1)
        throw HorizonError("realization order must be positive");
    if (g.horizon() < 2 * n + 1) {
        std::ostringstream os;
        os << "order " << n << " realization needs Markov horizon >= " << 2 * n + 1 << ", got "
           << g.horizon();
        throw HorizonError(os.str());
    }
    const Index p = g.p(), m = g.m();
    const Index half = g.horizon() / 2;

    const MatrixXd H = hankel_from_markov(g, half, half + 1);
    const MatrixXd H_minus = H.leftCols(m * half);
    const MatrixXd H_plus = H.rightCols(m * half);

    Eigen::JacobiSVD<MatrixXd> svd(H_minus, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    if (sv.size() < n || !(sv(n - 1) >= 1e-12 * sv(0)) || !(sv(0) > 0.0)) {
        std::ostringstream os;
        os << "Hankel matrix does not support order " << n << ": sigma_n / sigma_1 = "
           << (sv.size() >= n && sv(0) > 0.0 ? sv(n - 1) / sv(0) : 0.0);
        throw RankDeficiencyError(os.str());
    }

    const VectorXd root = sv.head(n).cwiseSqrt();
    const VectorXd inv_root = root.cwiseInverse();
    const MatrixXd Un = svd.matrixU().leftCols(n);
    const MatrixXd Vn = svd.matrixV().leftCols(n);

    MatrixXd O = Un * root.asDiagonal();
    MatrixXd Ctrl = root.asDiagonal() * Vn.transpose();
    // O^+ = S^{-1/2} U_n' and Ctrl^+ = V_n S^{-1/2} since U_n, V_n are orthonormal.
    MatrixXd A = inv_root.asDiagonal() * Un.transpose() * H_plus * Vn * inv_root.asDiagonal();
    MatrixXd C = O.topRows(p);
    MatrixXd B = Ctrl.leftCols(m);
    MatrixXd D = g.block(0);

    StateSpaceModel model(std::move(A), std::move(B), std::move(C), std::move(D));
    const bool stable = model.is_stable();
    return RealizationReport{std::move(model), sv, sv(n - 1), stable, std::move(O), std::move(Ctrl)};
}

double realization_error(const StateSpaceModel& truth, const StateSpaceModel& estimate, Index L)
{
    return impulse_response_distance(truth, estimate, L);
}

}  // namespace lticlust

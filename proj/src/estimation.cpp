#include "lticlust/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "lticlust/errors.hpp"

namespace lticlust {

namespace {

void check_horizon(const TrajectoryData& traj, Index L, Index min_L)
{
    if (traj.inputs.cols() != traj.length() + 1)
        throw InvalidModelError("trajectory needs T+1 inputs for T outputs");
    if (L < min_L || L > traj.length() - 1) {
        std::ostringstream os;
        os << "horizon L = " << L << " outside [" << min_L << ", " << traj.length() - 1
           << "] for trajectory of length " << traj.length();
        throw HorizonError(os.str());
    }
}

}  // namespace

MatrixXd build_toeplitz_input(const TrajectoryData& traj, Index L)
{
    check_horizon(traj, L, 0);
    const Index m = traj.m();
    const Index Tf = traj.length() - L + 1;
    MatrixXd U(m * (L + 1), Tf);
    for (Index j = 0; j < Tf; ++j)
        for (Index k = 0; k <= L; ++k)
            U.block(k * m, j, m, 1) = traj.inputs.col(L + j - k);
    return U;
}

MatrixXd build_output_matrix(const TrajectoryData& traj, Index L)
{
    check_horizon(traj, L, 1);
    // outputs column t-1 holds y_t, so y_L sits at column L-1.
    return traj.outputs.rightCols(traj.length() - L + 1);
}

DataMatrices build_data_matrices(std::span<const TrajectoryData> trajs, Index L)
{
    if (trajs.empty())
        throw HorizonError("no trajectories to estimate from");
    const Index m = trajs.front().m(), p = trajs.front().p();
    DataMatrices out;
    out.L = L;
    out.N = static_cast<Index>(trajs.size());
    Index total = 0;
    for (const auto& tr : trajs) {
        if (tr.m() != m || tr.p() != p)
            throw InvalidModelError("trajectories disagree on input/output dimensions");
        check_horizon(tr, L, 1);
        out.samples.push_back(tr.length() - L + 1);
        total += out.samples.back();
    }
    out.Y.resize(p, total);
    out.U.resize(m * (L + 1), total);
    Index col = 0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const Index Tf = out.samples[i];
        out.U.middleCols(col, Tf) = build_toeplitz_input(trajs[i], L);
        out.Y.middleCols(col, Tf) = build_output_matrix(trajs[i], L);
        col += Tf;
    }
    return out;
}

LeastSquaresFit ls_markov_fit(const DataMatrices& data, Index m)
{
    const Index rows = data.U.rows();
    if (data.U.cols() < rows) {
        std::ostringstream os;
        os << "stacked input matrix is " << rows << "x" << data.U.cols()
           << "; need at least as many columns as rows";
        throw IllConditionedError(os.str(), std::numeric_limits<double>::infinity());
    }

    Eigen::BDCSVD<MatrixXd> svd(data.U, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(rows - 1);
    if (!(smax > 0.0) || smin < 1e-10 * smax) {
        const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        std::ostringstream os;
        os << "stacked input matrix is rank deficient (condition " << cond << ")";
        throw IllConditionedError(os.str(), cond);
    }

    // Y U^+ = (Y V) S^-1 W'
    const MatrixXd YV = data.Y * svd.matrixV();
    const MatrixXd G = YV * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    return LeastSquaresFit{MarkovBlock(G, m), smin, smax};
}

LeastSquaresFit ls_markov_fit(std::span<const TrajectoryData> trajs, Index L)
{
    const DataMatrices data = build_data_matrices(trajs, L);
    return ls_markov_fit(data, trajs.front().m());
}

MarkovBlock ls_markov(std::span<const TrajectoryData> trajs, Index L)
{
    return ls_markov_fit(trajs, L).estimate;
}

std::vector<std::vector<Index>> page_partition(Index L, Index T_f, Index N)
{
    if (L < 0 || T_f < 1 || N < 1)
        throw HorizonError("page partition needs L >= 0, T_f >= 1, N >= 1");
    const Index stride = L + 1;
    const Index d = T_f / stride;
    if (d == 0)
        throw PartitionEmptyError("T_f = " + std::to_string(T_f) + " < L + 1 = " +
                                  std::to_string(stride) + ": page partition is empty");
    std::vector<std::vector<Index>> sets(static_cast<std::size_t>(stride));
    for (Index k = 0; k < stride; ++k) {
        auto& set = sets[static_cast<std::size_t>(k)];
        set.reserve(static_cast<std::size_t>(d * N));
        for (Index i = 0; i < N; ++i)
            for (Index j = 0; j < d; ++j)
                set.push_back(i * T_f + k + j * stride);
    }
    return sets;
}

std::vector<std::vector<Index>> page_partition(const MatrixXd& U, Index L, Index T_f, Index N)
{
    if (U.cols() != T_f * N)
        throw HorizonError("U has " + std::to_string(U.cols()) + " columns, expected N * T_f = " +
                           std::to_string(T_f * N));
    return page_partition(L, T_f, N);
}

namespace {

double min_singular_over_rows(const MatrixXd& M)
{
    // sigma_min in the row sense: inf over unit v of ||v' M||.
    if (M.cols() < M.rows())
        return 0.0;
    Eigen::JacobiSVD<MatrixXd> svd(M);
    return svd.singularValues()(M.rows() - 1);
}

}  // namespace

SingularCertificate min_singular_certificate(const MatrixXd& U,
                                             const std::vector<std::vector<Index>>& partition)
{
    double sum = 0.0;
    for (const auto& set : partition) {
        MatrixXd sub(U.rows(), static_cast<Index>(set.size()));
        for (std::size_t c = 0; c < set.size(); ++c) {
            if (set[c] < 0 || set[c] >= U.cols())
                throw HorizonError("partition index out of range");
            sub.col(static_cast<Index>(c)) = U.col(set[c]);
        }
        const double s = min_singular_over_rows(sub);
        sum += s * s;
    }
    return {min_singular_over_rows(U), std::sqrt(sum)};
}

double phi_factor(std::span<const StateSpaceModel> models, const NoiseSpec& noise, Index L)
{
    const double sw2 = noise.sigma_w() * noise.sigma_w();
    double phi = 0.0;
    for (const auto& model : models) {
        MatrixXd CAL = model.C();
        for (Index k = 0; k < L; ++k)
            CAL = CAL * model.A();
        const double cal = spectral_norm(CAL);
        const double value = cal * cal * spectral_norm(gramian_gamma_inf(model, noise)) +
                             sw2 * spectral_norm(gramian_gamma_obs(model));
        phi = std::max(phi, value);
    }
    return phi;
}

double sample_complexity_bound(std::span<const StateSpaceModel> models, const NoiseSpec& noise,
                               Index L, double eps, double delta, Index N, Index T)
{
    if (models.empty())
        throw InvalidModelError("sample_complexity_bound needs at least one model");
    if (!(eps > 0.0) || !(delta > 0.0) || !(delta < std::exp(-1.0)))
        throw InvalidModelError("need eps > 0 and 0 < delta < 1/e");
    if (!(noise.sigma_u > 0.0))
        throw InvalidModelError("sigma_u must be positive");
    if (L < 1 || N < 1 || T < 1)
        throw HorizonError("sample_complexity_bound needs L, N, T >= 1");

    Index n = 0;
    const Index m = models.front().m(), p = models.front().p();
    for (const auto& model : models)
        n = std::max(n, model.n());

    const double dim = static_cast<double>(p + (m + n) * L) +
                       std::log(static_cast<double>(N) * static_cast<double>(T) / delta);
    const double su2 = noise.sigma_u * noise.sigma_u;
    return static_cast<double>(L) / (eps * eps * su2) * dim * dim * phi_factor(models, noise, L);
}

}  // namespace lticlust

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the routines it is used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lticlust/lti.hpp"

namespace lticlust::oracle {

/// Scalar-loop state recursion with explicit inputs and noise sequences.
inline MatrixXd direct_outputs(const StateSpaceModel& M, const MatrixXd& inputs,
                               const MatrixXd& w1, const MatrixXd& w2)
{
    const Index T = inputs.cols() - 1, n = M.n(), m = M.m(), p = M.p();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0), next(x.size());
    MatrixXd y(p, T);
    for (Index t = 0; t < T; ++t) {
        for (Index i = 0; i < n; ++i) {
            double acc = w1(i, t);
            for (Index j = 0; j < n; ++j)
                acc += M.A()(i, j) * x[static_cast<std::size_t>(j)];
            for (Index j = 0; j < m; ++j)
                acc += M.B()(i, j) * inputs(j, t);
            next[static_cast<std::size_t>(i)] = acc;
        }
        x = next;
        for (Index r = 0; r < p; ++r) {
            double acc = w2(r, t);
            for (Index j = 0; j < n; ++j)
                acc += M.C()(r, j) * x[static_cast<std::size_t>(j)];
            for (Index j = 0; j < m; ++j)
                acc += M.D()(r, j) * inputs(j, t + 1);
            y(r, t) = acc;
        }
    }
    return y;
}

/// Markov blocks through explicit matrix powers.
inline MatrixXd markov_by_powers(const StateSpaceModel& M, Index L)
{
    MatrixXd out(M.p(), M.m() * (L + 1));
    out.leftCols(M.m()) = M.D();
    for (Index k = 1; k <= L; ++k) {
        MatrixXd Ak = MatrixXd::Identity(M.n(), M.n());
        for (Index j = 0; j < k - 1; ++j)
            Ak = Ak * M.A();
        out.middleCols(k * M.m(), M.m()) = M.C() * Ak * M.B();
    }
    return out;
}

inline double distance_by_powers(const StateSpaceModel& a, const StateSpaceModel& b, Index L)
{
    return (markov_by_powers(a, L) - markov_by_powers(b, L)).norm();
}

/// Gamma_inf with a fixed number of terms.
inline MatrixXd gamma_inf_fixed(const StateSpaceModel& M, double su, double sw, Index terms)
{
    MatrixXd sum = MatrixXd::Zero(M.n(), M.n());
    MatrixXd At = MatrixXd::Identity(M.n(), M.n());
    for (Index t = 0; t < terms; ++t) {
        sum += su * su * (At * M.B()) * (At * M.B()).transpose() + sw * sw * At * At.transpose();
        At = M.A() * At;
    }
    return sum;
}

inline MatrixXd gamma_obs_fixed(const StateSpaceModel& M, Index terms)
{
    MatrixXd sum = MatrixXd::Identity(M.p(), M.p());
    MatrixXd At = MatrixXd::Identity(M.n(), M.n());
    for (Index t = 0; t < terms; ++t) {
        sum += (M.C() * At) * (M.C() * At).transpose();
        At = M.A() * At;
    }
    return sum;
}

/// Doubles the truncation horizon until successive results agree to 1e-15.
template <class F>
MatrixXd doubling_limit(F&& fixed_terms)
{
    Index terms = 64;
    MatrixXd prev = fixed_terms(terms);
    for (int it = 0; it < 20; ++it) {
        terms *= 2;
        MatrixXd cur = fixed_terms(terms);
        if ((cur - prev).norm() <= 1e-15 * (1.0 + cur.norm()))
            return cur;
        prev = std::move(cur);
    }
    return prev;
}

/// Normal-equation least squares: Y U' (U U')^-1.
inline MatrixXd normal_equation_ls(const MatrixXd& Y, const MatrixXd& U)
{
    const MatrixXd gram = U * U.transpose();
    return (Y * U.transpose()) * gram.inverse();
}

/// Minimum SSE over all K^n assignments, empty clusters allowed.
inline double exhaustive_kmeans_sse(const std::vector<VectorXd>& pts, int K)
{
    const std::size_t n = pts.size();
    std::vector<int> labels(n, 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        double sse = 0.0;
        for (int c = 0; c < K; ++c) {
            VectorXd mean = VectorXd::Zero(pts[0].size());
            int cnt = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == c) {
                    mean += pts[i];
                    ++cnt;
                }
            if (cnt == 0)
                continue;
            mean /= cnt;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == c)
                    sse += (pts[i] - mean).squaredNorm();
        }
        best = std::min(best, sse);
        std::size_t pos = 0;
        while (pos < n && ++labels[pos] == K)
            labels[pos++] = 0;
        if (pos == n)
            break;
    }
    return best;
}

/// Well-conditioned random invertible matrix.
inline MatrixXd random_invertible(Index n, std::mt19937_64& eng)
{
    std::normal_distribution<double> g;
    MatrixXd Q(n, n);
    for (;;) {
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                Q(i, j) = g(eng);
        Eigen::JacobiSVD<MatrixXd> svd(Q);
        const auto& s = svd.singularValues();
        if (s(n - 1) > 0.2 * s(0))
            return Q;
    }
}

/// Minimal random model with Gaussian entries and a prescribed spectral radius.
inline StateSpaceModel random_model(Index n, Index m, Index p, double rho, std::mt19937_64& eng)
{
    std::normal_distribution<double> g;
    auto draw = [&](Index r, Index c) {
        MatrixXd M(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j)
                M(i, j) = g(eng);
        return M;
    };
    MatrixXd A = draw(n, n);
    Eigen::EigenSolver<MatrixXd> es(A, false);
    A *= rho / es.eigenvalues().cwiseAbs().maxCoeff();
    return StateSpaceModel(A, draw(n, m), draw(p, n), draw(p, m));
}

}  // namespace lticlust::oracle

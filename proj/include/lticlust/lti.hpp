#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace lticlust {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Discrete-time realization
///
///     x_{t+1} = A x_t + B u_t + w1_t
///     y_t     = C x_t + D u_t + w2_t
///
/// with x in R^n, u in R^m, y in R^p. Construction validates that the four
/// matrices agree on (n, m, p); the object is immutable afterwards.
class StateSpaceModel {
public:
    StateSpaceModel(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D);

    const MatrixXd& A() const noexcept { return A_; }
    const MatrixXd& B() const noexcept { return B_; }
    const MatrixXd& C() const noexcept { return C_; }
    const MatrixXd& D() const noexcept { return D_; }

    Index n() const noexcept { return A_.rows(); }
    Index m() const noexcept { return B_.cols(); }
    Index p() const noexcept { return C_.rows(); }

    double spectral_radius() const;
    bool is_stable() const { return spectral_radius() < 1.0; }

    /// (C Q^-1, Q A Q^-1, Q B, D)
    StateSpaceModel similarity_transform(const MatrixXd& Q) const;

private:
    MatrixXd A_, B_, C_, D_;
};

/// Impulse-response parameters [G_0 G_1 ... G_L], G_0 = D, G_k = C A^{k-1} B.
class MarkovBlock {
public:
    /// `data` must be p x m(L+1).
    MarkovBlock(MatrixXd data, Index m);

    Index horizon() const noexcept { return data_.cols() / m_ - 1; }
    Index m() const noexcept { return m_; }
    Index p() const noexcept { return data_.rows(); }
    const MatrixXd& matrix() const noexcept { return data_; }

    /// Block G_k, 0 <= k <= horizon().
    auto block(Index k) const { return data_.middleCols(k * m_, m_); }

    /// Leading blocks G_0..G_L as a new MarkovBlock.
    MarkovBlock truncated(Index L) const;

    /// Row-major flattening of the p x m(L+1) matrix.
    VectorXd flatten() const;
    static MarkovBlock unflatten(const VectorXd& v, Index p, Index m);

private:
    MatrixXd data_;
    Index m_;
};

struct NoiseSpec {
    double sigma_u = 1.0;
    double sigma_w1 = 0.0;  ///< process noise
    double sigma_w2 = 0.0;  ///< measurement noise

    double sigma_w() const noexcept { return sigma_w1 > sigma_w2 ? sigma_w1 : sigma_w2; }
};

/// Observed record of one system: inputs u_0..u_T, outputs y_1..y_T.
/// inputs is m x (T+1); outputs is p x T with column t-1 holding y_t.
struct TrajectoryData {
    MatrixXd inputs;
    MatrixXd outputs;

    Index length() const noexcept { return outputs.cols(); }
    Index m() const noexcept { return inputs.rows(); }
    Index p() const noexcept { return outputs.rows(); }
    VectorXd u(Index t) const { return inputs.col(t); }
    VectorXd y(Index t) const { return outputs.col(t - 1); }
};

/// Everything the simulator drew, including quantities that are never
/// observable from data (states and noise). Column t of `states` is x_t for
/// t = 0..T; column t of process_noise is w1_t (t = 0..T-1) and of
/// measurement_noise is w2_t (column t-1, t = 1..T).
struct SimulationRecord {
    TrajectoryData data;
    MatrixXd states;
    MatrixXd process_noise;
    MatrixXd measurement_noise;
};

/// Simulates T steps from x_0 = 0 with Gaussian inputs and noise.
/// Inputs, process and measurement noise come from separate streams derived
/// from `seed`, so changing a noise level leaves the input sequence unchanged.
TrajectoryData simulate(const StateSpaceModel& model, Index T, const NoiseSpec& noise,
                        std::uint64_t seed);

SimulationRecord simulate_detailed(const StateSpaceModel& model, Index T, const NoiseSpec& noise,
                                   std::uint64_t seed);

/// Same recursion with caller-provided inputs (m x (T+1)); only noise is drawn.
SimulationRecord simulate_with_inputs(const StateSpaceModel& model, const MatrixXd& inputs,
                                      const NoiseSpec& noise, std::uint64_t seed);

MarkovBlock markov_parameters(const StateSpaceModel& model, Index L);

/// Truncation rule for infinite sums: stop once `hysteresis` consecutive
/// terms have magnitude below tol.
struct AutoHorizon {
    double tol = 1e-12;
    int hysteresis = 10;
    Index max_terms = 1'000'000;
};

using DistanceHorizon = std::variant<Index, AutoHorizon>;

/// sqrt(sum_t ||G_t(m1) - G_t(m2)||_F^2), t from 0 to L (or until the
/// auto cutoff). When include_feedthrough is false the t = 0 term is skipped.
double impulse_response_distance(const StateSpaceModel& m1, const StateSpaceModel& m2,
                                 DistanceHorizon horizon, bool include_feedthrough = true);

double impulse_response_distance(const MarkovBlock& g1, const MarkovBlock& g2,
                                 bool include_feedthrough = true);

/// A Gaussian, rescaled so rho(A) ~ U[rho_lo, rho_hi]; B, C and D Gaussian,
/// rescaled to unit spectral norm. zero_d forces D = 0.
StateSpaceModel random_stable_model(Index n, Index m, Index p, std::pair<double, double> rho_range,
                                    std::uint64_t seed, bool zero_d = false);

/// sum_t sigma_u^2 A^t B (A^t B)' + sigma_w^2 A^t (A^t)'
MatrixXd gramian_gamma_inf(const StateSpaceModel& model, const NoiseSpec& noise,
                           const AutoHorizon& cutoff = {});

/// I_p + sum_t C A^t (C A^t)'
MatrixXd gramian_gamma_obs(const StateSpaceModel& model, const AutoHorizon& cutoff = {});

/// Block Hankel matrix with block (i, j) = G_{i+j+1}; G_0 is never used.
MatrixXd hankel_from_markov(const MarkovBlock& g, Index rows, Index cols);

double spectral_radius(const MatrixXd& A);
double spectral_norm(const MatrixXd& M);

}  // namespace lticlust

#include "lticlust/lti.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lticlust/errors.hpp"
#include "lticlust/rng.hpp"

namespace lticlust {

namespace {

std::string dims(const MatrixXd& M)
{
    std::ostringstream os;
    os << M.rows() << "x" << M.cols();
    return os.str();
}

void require_stable(const StateSpaceModel& model, const char* what)
{
    if (!model.is_stable()) {
        std::ostringstream os;
        os << what << ": model is not strictly stable (rho(A) = " << model.spectral_radius() << ")";
        throw NotStableError(os.str());
    }
}

}  // namespace

StateSpaceModel::StateSpaceModel(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D))
{
    const Index n = A_.rows();
    if (n < 1 || A_.cols() != n || B_.rows() != n || C_.cols() != n || B_.cols() < 1 ||
        C_.rows() < 1 || D_.rows() != C_.rows() || D_.cols() != B_.cols()) {
        throw InvalidModelError("inconsistent model dimensions: A " + dims(A_) + ", B " +
                                dims(B_) + ", C " + dims(C_) + ", D " + dims(D_));
    }
}

double StateSpaceModel::spectral_radius() const { return lticlust::spectral_radius(A_); }

StateSpaceModel StateSpaceModel::similarity_transform(const MatrixXd& Q) const
{
    if (Q.rows() != n() || Q.cols() != n())
        throw InvalidModelError("similarity transform must be " + std::to_string(n()) + "x" +
                                std::to_string(n()));
    const MatrixXd Qinv = Q.inverse();
    return StateSpaceModel(Q * A_ * Qinv, Q * B_, C_ * Qinv, D_);
}

MarkovBlock::MarkovBlock(MatrixXd data, Index m) : data_(std::move(data)), m_(m)
{
    if (m_ < 1 || data_.cols() < m_ || data_.cols() % m_ != 0)
        throw InvalidModelError("Markov block with " + std::to_string(data_.cols()) +
                                " columns is not a multiple of m = " + std::to_string(m_));
}

MarkovBlock MarkovBlock::truncated(Index L) const
{
    if (L < 0 || L > horizon())
        throw HorizonError("cannot truncate horizon " + std::to_string(horizon()) + " to " +
                           std::to_string(L));
    return MarkovBlock(data_.leftCols(m_ * (L + 1)), m_);
}

VectorXd MarkovBlock::flatten() const
{
    VectorXd v(data_.size());
    Index k = 0;
    for (Index i = 0; i < data_.rows(); ++i)
        for (Index j = 0; j < data_.cols(); ++j)
            v(k++) = data_(i, j);
    return v;
}

MarkovBlock MarkovBlock::unflatten(const VectorXd& v, Index p, Index m)
{
    if (p < 1 || m < 1 || v.size() % (p * m) != 0)
        throw InvalidModelError("flattened Markov block has incompatible size");
    const Index cols = v.size() / p;
    MatrixXd data(p, cols);
    Index k = 0;
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < cols; ++j)
            data(i, j) = v(k++);
    return MarkovBlock(std::move(data), m);
}

SimulationRecord simulate_with_inputs(const StateSpaceModel& model, const MatrixXd& inputs,
                                      const NoiseSpec& noise, std::uint64_t seed)
{
    const Index T = inputs.cols() - 1;
    if (T < 1)
        throw HorizonError("simulation needs at least one step");
    if (inputs.rows() != model.m())
        throw InvalidModelError("input dimension " + std::to_string(inputs.rows()) +
                                " does not match model m = " + std::to_string(model.m()));
    if (noise.sigma_u < 0 || noise.sigma_w1 < 0 || noise.sigma_w2 < 0)
        throw InvalidModelError("noise levels must be nonnegative");

    Engine process_eng(derive_seed(seed, "process"));
    Engine measure_eng(derive_seed(seed, "measurement"));

    SimulationRecord rec;
    rec.process_noise = gaussian_matrix(process_eng, model.n(), T, noise.sigma_w1);
    rec.measurement_noise = gaussian_matrix(measure_eng, model.p(), T, noise.sigma_w2);
    rec.states = MatrixXd::Zero(model.n(), T + 1);
    rec.data.inputs = inputs;
    rec.data.outputs.resize(model.p(), T);

    for (Index t = 0; t < T; ++t) {
        rec.states.col(t + 1) = model.A() * rec.states.col(t) + model.B() * inputs.col(t) +
                                rec.process_noise.col(t);
        rec.data.outputs.col(t) = model.C() * rec.states.col(t + 1) +
                                  model.D() * inputs.col(t + 1) + rec.measurement_noise.col(t);
    }
    return rec;
}

SimulationRecord simulate_detailed(const StateSpaceModel& model, Index T, const NoiseSpec& noise,
                                   std::uint64_t seed)
{
    if (T < 1)
        throw HorizonError("simulation needs T >= 1");
    if (noise.sigma_u < 0)
        throw InvalidModelError("noise levels must be nonnegative");
    Engine input_eng(derive_seed(seed, "inputs"));
    MatrixXd inputs = gaussian_matrix(input_eng, model.m(), T + 1, noise.sigma_u);
    return simulate_with_inputs(model, inputs, noise, seed);
}

TrajectoryData simulate(const StateSpaceModel& model, Index T, const NoiseSpec& noise,
                        std::uint64_t seed)
{
    return simulate_detailed(model, T, noise, seed).data;
}

MarkovBlock markov_parameters(const StateSpaceModel& model, Index L)
{
    if (L < 0)
        throw HorizonError("Markov horizon must be nonnegative");
    const Index m = model.m();
    MatrixXd data(model.p(), m * (L + 1));
    data.leftCols(m) = model.D();
    MatrixXd AkB = model.B();
    for (Index k = 1; k <= L; ++k) {
        data.middleCols(k * m, m) = model.C() * AkB;
        if (k < L)
            AkB = model.A() * AkB;
    }
    return MarkovBlock(std::move(data), m);
}

double impulse_response_distance(const StateSpaceModel& m1, const StateSpaceModel& m2,
                                 DistanceHorizon horizon, bool include_feedthrough)
{
    if (m1.m() != m2.m() || m1.p() != m2.p())
        throw InvalidModelError("distance needs models with equal (m, p)");

    double sum = include_feedthrough ? (m1.D() - m2.D()).squaredNorm() : 0.0;

    if (const Index* fixed = std::get_if<Index>(&horizon)) {
        if (*fixed < 0)
            throw HorizonError("distance horizon must be nonnegative");
        MatrixXd AkB1 = m1.B(), AkB2 = m2.B();
        for (Index k = 1; k <= *fixed; ++k) {
            sum += (m1.C() * AkB1 - m2.C() * AkB2).squaredNorm();
            AkB1 = m1.A() * AkB1;
            AkB2 = m2.A() * AkB2;
        }
        return std::sqrt(sum);
    }

    const auto& cutoff = std::get<AutoHorizon>(horizon);
    require_stable(m1, "impulse_response_distance");
    require_stable(m2, "impulse_response_distance");
    MatrixXd AkB1 = m1.B(), AkB2 = m2.B();
    int quiet = 0;
    for (Index k = 1; k <= cutoff.max_terms && quiet < cutoff.hysteresis; ++k) {
        const double term = (m1.C() * AkB1 - m2.C() * AkB2).squaredNorm();
        sum += term;
        quiet = std::sqrt(term) < cutoff.tol ? quiet + 1 : 0;
        AkB1 = m1.A() * AkB1;
        AkB2 = m2.A() * AkB2;
    }
    return std::sqrt(sum);
}

double impulse_response_distance(const MarkovBlock& g1, const MarkovBlock& g2,
                                 bool include_feedthrough)
{
    if (g1.m() != g2.m() || g1.p() != g2.p() || g1.horizon() != g2.horizon())
        throw InvalidModelError("distance needs Markov blocks of equal shape");
    const Index skip = include_feedthrough ? 0 : g1.m();
    const Index cols = g1.matrix().cols() - skip;
    return (g1.matrix().rightCols(cols) - g2.matrix().rightCols(cols)).norm();
}

StateSpaceModel random_stable_model(Index n, Index m, Index p, std::pair<double, double> rho_range,
                                    std::uint64_t seed, bool zero_d)
{
    const auto [lo, hi] = rho_range;
    if (!(lo > 0.0 && lo <= hi && hi < 1.0))
        throw InvalidModelError("rho_range must satisfy 0 < lo <= hi < 1");
    if (n < 1 || m < 1 || p < 1)
        throw InvalidModelError("model dimensions must be positive");

    Engine eng(seed);
    MatrixXd A;
    double rho = 0.0;
    do {
        A = gaussian_matrix(eng, n, n);
        rho = spectral_radius(A);
    } while (rho < 1e-12);

    std::uniform_real_distribution<double> target_dist(lo, hi);
    const double target = lo == hi ? lo : target_dist(eng);
    A *= target / rho;

    auto unit_norm = [&](Index rows, Index cols) {
        MatrixXd M;
        double s = 0.0;
        do {
            M = gaussian_matrix(eng, rows, cols);
            s = spectral_norm(M);
        } while (s < 1e-12);
        return MatrixXd(M / s);
    };
    MatrixXd B = unit_norm(n, m);
    MatrixXd C = unit_norm(p, n);
    MatrixXd D = unit_norm(p, m);
    if (zero_d)
        D.setZero();
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(D));
}

MatrixXd gramian_gamma_inf(const StateSpaceModel& model, const NoiseSpec& noise,
                           const AutoHorizon& cutoff)
{
    require_stable(model, "gramian_gamma_inf");
    const double su2 = noise.sigma_u * noise.sigma_u;
    const double sw2 = noise.sigma_w() * noise.sigma_w();
    const Index n = model.n();

    MatrixXd sum = MatrixXd::Zero(n, n);
    MatrixXd At = MatrixXd::Identity(n, n);
    int quiet = 0;
    for (Index t = 0; t < cutoff.max_terms && quiet < cutoff.hysteresis; ++t) {
        const MatrixXd AtB = At * model.B();
        const MatrixXd term = su2 * AtB * AtB.transpose() + sw2 * At * At.transpose();
        sum += term;
        quiet = spectral_norm(term) < cutoff.tol ? quiet + 1 : 0;
        At = model.A() * At;
    }
    return sum;
}

MatrixXd gramian_gamma_obs(const StateSpaceModel& model, const AutoHorizon& cutoff)
{
    require_stable(model, "gramian_gamma_obs");
    const Index p = model.p();
    MatrixXd sum = MatrixXd::Identity(p, p);
    MatrixXd CAt = model.C();
    int quiet = 0;
    for (Index t = 0; t < cutoff.max_terms && quiet < cutoff.hysteresis; ++t) {
        const MatrixXd term = CAt * CAt.transpose();
        sum += term;
        quiet = spectral_norm(term) < cutoff.tol ? quiet + 1 : 0;
        CAt = CAt * model.A();
    }
    return sum;
}

MatrixXd hankel_from_markov(const MarkovBlock& g, Index rows, Index cols)
{
    if (rows < 1 || cols < 1)
        throw HorizonError("Hankel matrix needs at least one block row and column");
    if (g.horizon() < rows + cols - 1)
        throw HorizonError("Hankel " + std::to_string(rows) + "x" + std::to_string(cols) +
                           " needs Markov horizon >= " + std::to_string(rows + cols - 1) +
                           ", got " + std::to_string(g.horizon()));
    const Index p = g.p(), m = g.m();
    MatrixXd H(p * rows, m * cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            H.block(i * p, j * m, p, m) = g.block(i + j + 1);
    return H;
}

double spectral_radius(const MatrixXd& A)
{
    if (A.size() == 0)
        return 0.0;
    Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const MatrixXd& M)
{
    if (M.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<MatrixXd> svd(M);
    return svd.singularValues()(0);
}

}  // namespace lticlust

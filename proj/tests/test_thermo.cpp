#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tpf/errors.hpp"
#include "tpf/models.hpp"
#include "tpf/observables.hpp"
#include "tpf/pipeline.hpp"
#include "tpf/random.hpp"
#include "tpf/tpms.hpp"

using namespace tpf;

namespace {

dyn::MapTrajectory random_qutrit(std::uint64_t seed)
{
    rnd::TrajectorySpec spec;
    spec.dim = 3;
    return rnd::random_trajectory(spec, seed);
}

} // namespace

TEST(PathOperator, VanishesForClosedDynamics)
{
    models::ClosedDriveParams p;
    p.field_x = 0.3;
    p.n_steps = 400;
    const auto drive = models::closed_drive(p);
    const auto a = thermo::analyze_path(drive.traj);
    ASSERT_EQ(a.n_valid, drive.traj.size());
    for (std::size_t i = 0; i < a.n_valid; i += 50) {
        EXPECT_LT(max_abs(a.path[i].matrix()), 1e-12);
        const Matrix H = drive.hamiltonians[i].matrix();
        const Matrix traceless = H - H.trace() / 2.0 * Matrix::Identity(2, 2);
        EXPECT_LT(max_abs(a.K[i].matrix() - traceless), 1e-9);
    }
}

TEST(PathOperator, PrefixStopsAtSingularMap)
{
    const auto traj = tpf::testing::constant_generator_trajectory(tpf::testing::damped_qubit_generator(1.0, 0.5),
                                                                  10.0, 100);
    thermo::PathOptions opts;
    opts.condition_threshold = 10.0;
    const auto a = thermo::analyze_path(traj, opts);
    ASSERT_TRUE(a.singular_time.has_value());
    EXPECT_LT(a.n_valid, traj.size());
    EXPECT_GT(*a.singular_condition, 10.0);
    EXPECT_NEAR(*a.singular_time, traj.time(a.n_valid), 1e-12);

    const auto full = thermo::analyze_path(traj);
    thermo::ObservableSeries K;
    K.times = full.times;
    K.ops = full.K;
    K.initial.assign(full.K.size(), full.K.front());
    EXPECT_THROW(thermo::path_operator(traj, K, traj.size() - 1, opts), SingularMap);
    EXPECT_LT(max_abs(thermo::path_operator(traj, K, 40).matrix() - full.path[40].matrix()), 1e-12);
}

TEST(Observables, BalanceAndConventionsAgreeOnMeans)
{
    const auto traj = random_qutrit(21);
    const auto a = thermo::analyze_path(traj);
    const auto def = thermo::work_heat_observables(traj, a);
    EXPECT_LT(pipeline::balance_residual(def, a), 1e-10);
    rnd::Engine rng(22);
    const DensityMatrix rho = rnd::random_density(3, rng);
    for (auto conv : {thermo::Convention::single_measure_final, thermo::Convention::single_measure_initial}) {
        const auto wh = thermo::work_heat_observables(traj, a, conv);
        for (std::size_t i = 10; i < a.n_valid; i += 47) {
            EXPECT_NEAR(thermo::mean_change(wh.work, traj, i, rho), thermo::mean_change(def.work, traj, i, rho), 1e-10);
            EXPECT_NEAR(thermo::mean_change(wh.heat, traj, i, rho), thermo::mean_change(def.heat, traj, i, rho), 1e-10);
        }
    }
}

TEST(Observables, ShiftedObservableKeepsMeans)
{
    const auto traj = random_qutrit(23);
    const auto a = thermo::analyze_path(traj);
    const auto wh = thermo::work_heat_observables(traj, a);
    rnd::Engine rng(24);
    std::vector<HermitianOperator> shifts;
    for (int k = 0; k < 4; ++k) shifts.push_back(rnd::random_hermitian(3, rng));
    const std::vector<DensityMatrix> states{rnd::random_density(3, rng), rnd::random_density(3, rng)};
    EXPECT_LT(pipeline::gauge_spread(traj, wh.work, shifts, states), 1e-10);
    const auto moved = thermo::shifted_observable(wh.heat, traj, shifts[0]);
    EXPECT_LT(max_abs(moved.initial[7].matrix() - shifts[0].matrix()), 1e-14);
}

TEST(Distribution, NormalizedWithCorrectMean)
{
    const auto traj = random_qutrit(25);
    const auto a = thermo::analyze_path(traj);
    const double beta = 1.3;
    const DensityMatrix rho0 = gibbs_state(a.K.front(), beta);
    const std::size_t i = 120;
    const HermitianOperator Ow = a.K[i] - a.path[i];
    const auto dist = tpms::tpms_distribution(rho0, traj.map(i), a.K.front(), Ow);
    double total = 0.0;
    for (double p : dist.probs) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_FALSE(dist.coherence_warning);
    for (std::size_t k = 1; k < dist.outcomes.size(); ++k) EXPECT_LT(dist.outcomes[k - 1], dist.outcomes[k]);
    const double mean = Ow.expectation(tpf::apply(traj.map(i), rho0.matrix())) - a.K.front().expectation(rho0.matrix());
    EXPECT_NEAR(tpms::moment(dist, 1), mean, 1e-12);
}

TEST(Distribution, CoherentInputRaisesWarning)
{
    rnd::Engine rng(26);
    const DensityMatrix rho(0.5 * (pauli::identity() + 0.6 * pauli::x()));
    const auto dist = tpms::tpms_distribution(rho, Superoperator::identity(2), HermitianOperator(pauli::z()),
                                              HermitianOperator(pauli::z()));
    EXPECT_TRUE(dist.coherence_warning);
    EXPECT_NEAR(dist.coherence_norm, 0.3 * std::sqrt(2.0), 1e-12);
}

TEST(Distribution, DegenerateLevelsShareOneProjector)
{
    const HermitianOperator O = HermitianOperator::diagonal(RealVector::Constant(3, 0.7));
    const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    const auto dist = tpms::tpms_distribution(rho, Superoperator::identity(3), O, O);
    ASSERT_EQ(dist.outcomes.size(), 1u);
    EXPECT_NEAR(dist.outcomes[0], 0.0, 1e-15);
}

TEST(CorrectionFactors, InternalEnergyFormsAgree)
{
    const auto traj = random_qutrit(27);
    const auto a = thermo::analyze_path(traj);
    for (std::size_t i : {std::size_t{50}, std::size_t{200}}) {
        const auto lu = tpms::lambda_u(traj.map(i), a.K[i], 0.8);
        EXPECT_NEAR(lu.direct, lu.adjoint, 1e-12);
        EXPECT_NEAR(lu.direct, lu.mixed_overlap, 1e-12);
        EXPECT_LE(lu.direct, lu.bound + 1e-12);
    }
}

TEST(CorrectionFactors, UnitalMapsGiveOne)
{
    rnd::Engine rng(28);
    const Superoperator U = unitary_conjugation(rnd::random_unitary(3, rng));
    const HermitianOperator K = rnd::random_hermitian(3, rng);
    EXPECT_NEAR(tpms::lambda_u(U, K, 2.0).direct, 1.0, 1e-12);
    const auto lw = tpms::lambda_w(U, K, K, HermitianOperator::zero(3), 2.0);
    EXPECT_NEAR(lw.value, 1.0, 1e-12);
    EXPECT_NEAR(lw.bound, 1.0, 1e-12);
}

TEST(CorrectionFactors, ReportConsistency)
{
    const auto traj = random_qutrit(29);
    const auto a = thermo::analyze_path(traj);
    const double beta = 0.9;
    const auto rows = pipeline::lambda_series(traj, a, beta);
    ASSERT_EQ(rows.size(), a.n_valid);
    for (std::size_t i = 0; i < rows.size(); i += 40) {
        const auto& r = rows[i];
        EXPECT_NEAR(r.exp_avg_w, r.lambda_w * std::exp(-beta * r.delta_F_bar), 1e-10 * r.exp_avg_w);
        EXPECT_LE(r.lambda_w, r.lambda_w_bound * (1.0 + 1e-12));
        EXPECT_GE(r.mean_w - r.delta_F_bar, r.dissipated_bound - 1e-10);
        // Jensen
        EXPECT_GE(r.mean_w, -std::log(r.exp_avg_w) / beta - 1e-10);
    }
    EXPECT_NEAR(rows.front().lambda_w, 1.0, 1e-12);
}

TEST(CorrectionFactors, HeatFactorOverflowsToInfinity)
{
    const HermitianOperator P = HermitianOperator::diagonal(RealVector::LinSpaced(2, -1e4, 0.0));
    const auto h = tpms::heat_fluctuation(DensityMatrix::maximally_mixed(2), Superoperator::identity(2), P, 1.0);
    EXPECT_TRUE(std::isinf(h.value));
}

TEST(FreeEnergy, NonequilibriumFreeEnergyOfGibbsState)
{
    rnd::Engine rng(30);
    const HermitianOperator K = rnd::random_hermitian(3, rng);
    const double beta = 1.7;
    const double F = -log_partition(K, beta) / beta;
    EXPECT_NEAR(tpms::noneq_free_energy(gibbs_state(K, beta), K, beta), F, 1e-12);
    EXPECT_GT(tpms::noneq_free_energy(rnd::random_density(3, rng), K, beta), F);
}

TEST(Coherent, GibbsInputHasNoCorrection)
{
    rnd::Engine rng(31);
    const HermitianOperator H0 = rnd::random_hermitian(3, rng);
    const auto data = thermo::coherent_initial_construction(gibbs_state(H0, 0.7), H0);
    EXPECT_NEAR(data.beta, 0.7, 1e-8);
    EXPECT_LT(max_abs(data.xi.matrix()), 1e-7);
    EXPECT_NEAR(data.relative_entropy, 0.0, 1e-10);
}

TEST(Coherent, PopulationInversionHasNoMatchingBeta)
{
    const HermitianOperator H0(0.5 * pauli::z());
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.8;
    rho(1, 1) = 0.2;
    EXPECT_THROW(thermo::coherent_initial_construction(DensityMatrix(rho), H0), NoMatchingBeta);
}

TEST(Coherent, SchemeMatchesTraceAndChain)
{
    rnd::Engine rng(32);
    const HermitianOperator H0(0.5 * pauli::z());
    const DensityMatrix rho0(0.5 * (pauli::identity() + 0.3 * pauli::x() - 0.5 * pauli::z()));
    const auto data = thermo::coherent_initial_construction(rho0, H0);
    EXPECT_NEAR(H0.expectation(rho0.matrix()), H0.expectation(gibbs_state(H0, data.beta).matrix()), 1e-10);
    const Superoperator U = unitary_conjugation(rnd::random_unitary(2, rng));
    const HermitianOperator Ht(0.8 * pauli::z() + 0.1 * pauli::x());
    const auto rep = thermo::coherent_work_fluctuation(data, U, Ht);
    const auto obs = thermo::coherent_work_observables(data, rho0, H0, U, Ht);
    const double scheme = tpms::exp_average(tpms::tpms_distribution(rho0, U, obs.initial, obs.final), data.beta);
    EXPECT_NEAR(scheme, rep.value, 1e-12);
    EXPECT_LE(rep.value, rep.golden_thompson * (1.0 + 1e-12));
    EXPECT_LE(rep.golden_thompson, rep.chain_bound * (1.0 + 1e-12));
    EXPECT_NEAR(rep.jarzynski_factor, std::exp(-data.beta * rep.delta_F_bar), 1e-12);
}

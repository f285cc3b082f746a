#include <gtest/gtest.h>

#include "support.hpp"
#include "tpf/errors.hpp"
#include "tpf/random.hpp"

using namespace tpf;
using tpf::testing::constant_generator_trajectory;
using tpf::testing::damped_qubit_generator;

TEST(Generator, RecoversConstantGenerator)
{
    const Superoperator L = damped_qubit_generator(1.0, 0.3);
    const auto traj = constant_generator_trajectory(L, 4.0, 400);
    const auto fd = traj.without_derivatives();
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{200}, std::size_t{399}, std::size_t{400}}) {
        EXPECT_LT(max_abs(dyn::generator_at(traj, i).matrix() - L.matrix()), 1e-10);
        EXPECT_LT(max_abs(dyn::generator_at(fd, i).matrix() - L.matrix()), 1e-7);
    }
}

TEST(Generator, CentralFourBeatsCentralTwo)
{
    const Superoperator L = damped_qubit_generator(1.0, 0.3);
    const auto traj = constant_generator_trajectory(L, 4.0, 200).without_derivatives();
    dyn::GeneratorOptions c2;
    c2.stencil = dyn::Stencil::central2;
    const double e2 = max_abs(dyn::generator_at(traj, 100, c2).matrix() - L.matrix());
    const double e4 = max_abs(dyn::generator_at(traj, 100).matrix() - L.matrix());
    EXPECT_LT(e4, e2 / 100.0);
}

TEST(Generator, TooFewPointsForStencil)
{
    const auto traj = constant_generator_trajectory(damped_qubit_generator(1.0, 0.1), 0.1, 2).without_derivatives();
    EXPECT_THROW(dyn::generator_at(traj, 1), BoundaryStencil);
}

TEST(MinimalDissipation, TracelessJumpsLeaveHamiltonianUntouched)
{
    const Matrix H = 0.5 * pauli::z() + 0.2 * pauli::x();
    const auto split = dyn::minimal_dissipation_split(damped_qubit_generator(1.0, 0.3));
    EXPECT_LT(max_abs(split.K.matrix() - H), 1e-13);
    EXPECT_LT(max_abs(split.dissipator.matrix() - (lindblad_dissipator(pauli::minus()) * Complex(0.3)).matrix()),
              1e-13);
}

TEST(MinimalDissipation, ShiftsTracefulJumpOperators)
{
    // D[a I + L] = D[L] - i[i (a^* L - a L^dag) / 2, .] for traceless L
    const Complex a(0.4, 0.3);
    const Matrix L = pauli::minus();
    const Matrix J = a * Matrix::Identity(2, 2) + L;
    const auto split = dyn::minimal_dissipation_split(lindblad_dissipator(J));
    const Matrix expected = (std::conj(a) * L - a * L.adjoint()) / Complex(0.0, -2.0);
    EXPECT_LT(max_abs(split.K.matrix() - expected), 1e-13);
}

TEST(MinimalDissipation, BasisIndependent)
{
    rnd::Engine rng(7);
    const Superoperator L = hamiltonian_superop(rnd::random_hermitian(3, rng).matrix())
                            + lindblad_dissipator(rnd::ginibre(3, 3, rng)) * Complex(0.2);
    const auto split = dyn::minimal_dissipation_split(L);
    const HermitianOperator K2 = dyn::effective_hamiltonian(L, rnd::random_unitary(3, rng));
    EXPECT_LT(max_abs(split.K.matrix() - K2.matrix()), 1e-12);
    EXPECT_NEAR(std::abs(split.K.matrix().trace()), 0.0, 1e-13);
}

TEST(MinimalDissipation, RejectsNonTracePreservingInput)
{
    EXPECT_THROW(dyn::minimal_dissipation_split(Superoperator::identity(2)), InvalidOperator);
}

TEST(MinimalDissipation, LindbladDecompositionReconstructs)
{
    rnd::Engine rng(8);
    const Superoperator D = lindblad_dissipator(pauli::minus()) * Complex(0.3)
                            + lindblad_dissipator(pauli::z()) * Complex(0.05);
    const auto dec = dyn::lindblad_decomposition(D);
    Superoperator rebuilt = Superoperator::zero(2);
    for (std::size_t k = 0; k < dec.rates.size(); ++k)
        rebuilt = rebuilt + lindblad_dissipator(dec.operators[k]) * Complex(dec.rates[k]);
    EXPECT_LT(max_abs(rebuilt.matrix() - D.matrix()), 1e-12);
    for (double r : dec.rates) EXPECT_GT(r, -1e-12);
}

TEST(Propagator, InversePropagatorComposes)
{
    rnd::TrajectorySpec spec;
    spec.dim = 3;
    const auto traj = rnd::random_trajectory(spec, 11);
    const Superoperator P = dyn::inverse_propagator(traj, 60, 150);
    EXPECT_LT(max_abs(compose(P, traj.map(150)).matrix() - traj.map(60).matrix()), 1e-11);
    EXPECT_FALSE(dyn::first_singular_index(traj).has_value());
    for (std::size_t i : {std::size_t{0}, std::size_t{100}, std::size_t{200}}) {
        const auto r = cptp_diagnostics(traj.map(i));
        EXPECT_LT(r.trace_preserving_residual, 1e-12);
        EXPECT_GT(r.choi_min_eigenvalue, -1e-12);
    }
}

TEST(Invertibility, FlagsThresholdCrossings)
{
    const auto traj = constant_generator_trajectory(damped_qubit_generator(1.0, 0.5), 10.0, 100);
    dyn::InvertibilityOptions opts;
    opts.condition_threshold = 10.0;
    const auto rows = dyn::invertibility_report(traj, opts);
    const auto first = dyn::first_singular_index(traj, 10.0);
    ASSERT_TRUE(first.has_value());
    EXPECT_TRUE(rows[*first].singular);
    EXPECT_FALSE(rows[*first - 1].singular);
    EXPECT_NEAR(rows.front().condition_number, 1.0, 1e-12);
}

TEST(Trajectory, RejectsNonIdentityStart)
{
    const UniformGrid grid(1.0, 2);
    std::vector<Superoperator> maps(3, Superoperator::identity(2));
    maps[0] = unitary_conjugation(pauli::x());
    EXPECT_ANY_THROW(dyn::MapTrajectory(grid, maps));
}

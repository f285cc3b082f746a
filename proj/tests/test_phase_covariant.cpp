#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tpf/models.hpp"
#include "tpf/observables.hpp"
#include "tpf/phase_covariant.hpp"
#include "tpf/random.hpp"

using namespace tpf;

namespace {

pc::PCRates constant_rates(double w, double gp, double gm, double gz)
{
    return {[w](double) { return w; }, [gp](double) { return gp; }, [gm](double) { return gm; },
            [gz](double) { return gz; }};
}

} // namespace

TEST(PhaseCovariant, MapMatchesExponentiatedGenerator)
{
    const auto sol = pc::solve(constant_rates(1.3, 0.05, 0.2, 0.03), UniformGrid(6.0, 600));
    const Superoperator L = pc::pc_generator(1.3, 0.05, 0.2, 0.03);
    for (std::size_t i : {std::size_t{0}, std::size_t{137}, std::size_t{600}}) {
        const Matrix exact = tpf::testing::expm(L.matrix() * sol.grid.time(i));
        EXPECT_LT(max_abs(pc::pc_map(sol.coeffs, i).matrix() - exact), 1e-10) << "i = " << i;
    }
}

TEST(PhaseCovariant, GeneratorMatchesLindbladForm)
{
    const Superoperator L = pc::pc_generator(0.9, 0.1, 0.3, 0.05);
    const Superoperator expected = hamiltonian_superop(0.45 * pauli::z()) + lindblad_dissipator(pauli::plus()) * Complex(0.1)
                                   + lindblad_dissipator(pauli::minus()) * Complex(0.3)
                                   + lindblad_dissipator(pauli::z()) * Complex(0.05);
    EXPECT_LT(max_abs(L.matrix() - expected.matrix()), 1e-14);
}

TEST(PhaseCovariant, PauliRoundTrip)
{
    rnd::Engine rng(41);
    const Superoperator S = kraus_map(std::vector<Matrix>{0.6 * rnd::random_unitary(2, rng), 0.8 * rnd::random_unitary(2, rng)});
    EXPECT_LT(max_abs(pc::pauli_to_superop(pc::superop_to_pauli(S)).matrix() - S.matrix()), 1e-13);
    EXPECT_GT(pc::off_structure_norm(S), 1e-3);
    const auto sol = pc::solve(constant_rates(1.0, 0.1, 0.2, 0.0), UniformGrid(2.0, 20));
    EXPECT_LT(pc::off_structure_norm(pc::pc_map(sol.coeffs, 20)), 1e-14);
    const RealMatrix R = pc::pauli_transfer(sol.coeffs, 20);
    EXPECT_DOUBLE_EQ(R(3, 0), sol.coeffs.c[20]);
    EXPECT_DOUBLE_EQ(R(3, 3), sol.coeffs.d_par[20]);
}

TEST(PhaseCovariant, ThermalRatesRelaxToGibbsBias)
{
    const double beta = 1.4, w = 1.0, gm = 0.4;
    const double gp = gm * std::exp(-beta * w);
    const auto sol = pc::solve(constant_rates(w, gp, gm, 0.0), UniformGrid(10.0, 1000));
    const std::size_t n = 1000;
    EXPECT_NEAR(sol.coeffs.c[n] / (1.0 - sol.coeffs.d_par[n]), -std::tanh(0.5 * beta * w), 1e-10);
}

TEST(PhaseCovariant, ClosedFormMatchesGenericPipeline)
{
    models::WeakCouplingParams p;
    const auto sol = pc::solve(models::weak_coupling_rates(p), UniformGrid(p.t_f(), 800));
    const auto traj = pc::pc_trajectory(sol);
    const auto a = thermo::analyze_path(traj);
    for (std::size_t i : {std::size_t{100}, std::size_t{400}, std::size_t{800}}) {
        const Matrix& P = a.path[i].matrix();
        EXPECT_NEAR(0.5 * (P(0, 0) + P(1, 1)).real(), sol.thermo.P0[i], 1e-8);
        EXPECT_NEAR(0.5 * (P(0, 0) - P(1, 1)).real(), sol.thermo.P3[i], 1e-8);
        const auto cf = pc::closed_form(sol, p.beta, i);
        EXPECT_NEAR(cf.lambda_u, 1.0 - sol.coeffs.c[i] * std::tanh(0.5 * p.beta * sol.rates.omega[i]), 1e-12);
        EXPECT_LE(cf.lambda_w, cf.lambda_w_bound + 1e-12);
    }
}

TEST(PhaseCovariant, PureDecoherenceIsHeatless)
{
    const auto sol = pc::solve(constant_rates(1.0, 0.0, 0.0, 0.2), UniformGrid(5.0, 200));
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        EXPECT_EQ(sol.thermo.P0[i], 0.0);
        EXPECT_EQ(sol.thermo.P3[i], 0.0);
        EXPECT_NEAR(pc::closed_form(sol, 1.0, i).lambda_w, 1.0, 1e-14);
    }
}

TEST(PhaseCovariant, GeneralDimensionAgreesOnQubits)
{
    models::WeakCouplingParams p;
    const auto sol = pc::solve(models::weak_coupling_rates(p), UniformGrid(p.t_f(), 800));
    const auto traj = pc::pc_trajectory(sol).without_derivatives();
    const auto a = thermo::analyze_path(traj);
    const auto general = pc::pc_general_d(pc::extract_general(traj));
    ASSERT_EQ(general.q.size(), traj.size());
    for (std::size_t i : {std::size_t{200}, std::size_t{600}}) {
        EXPECT_FALSE(general.flagged[i]);
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(general.k[i](j), a.K[i].matrix()(j, j).real(), 1e-7);
            EXPECT_NEAR(general.q[i](j), a.path[i].matrix()(j, j).real(), 1e-7);
            EXPECT_NEAR(general.w[i](j), general.k[i](j) - general.q[i](j), 1e-14);
        }
    }
}

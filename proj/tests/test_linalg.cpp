#include <gtest/gtest.h>

#include "tpf/errors.hpp"
#include "tpf/linalg.hpp"
#include "tpf/quadrature.hpp"
#include "tpf/random.hpp"

using namespace tpf;

TEST(Vectorization, ColumnStackingIdentity)
{
    rnd::Engine rng(1);
    const Matrix A = rnd::ginibre(3, 3, rng), X = rnd::ginibre(3, 3, rng), B = rnd::ginibre(3, 3, rng);
    const Vector lhs = vec(A * X * B);
    const Vector rhs = kron(B.transpose(), A) * vec(X);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(vec(X)(1 + 2 * 3), X(1, 2));
    EXPECT_LT(max_abs(unvec(vec(X), 3) - X), 0.0 + 1e-300);
}

TEST(Superoperators, BuildersMatchDirectAction)
{
    rnd::Engine rng(2);
    const Matrix U = rnd::random_unitary(2, rng);
    const Matrix H = rnd::random_hermitian(2, rng).matrix();
    const Matrix X = rnd::ginibre(2, 2, rng);
    const Complex i(0.0, 1.0);
    EXPECT_LT(max_abs(tpf::apply(unitary_conjugation(U), X) - U * X * U.adjoint()), 1e-12);
    EXPECT_LT(max_abs(tpf::apply(hamiltonian_superop(H), X) - (-i * (H * X - X * H))), 1e-12);
    const Matrix L = pauli::minus();
    const Matrix expected = L * X * L.adjoint() - 0.5 * (L.adjoint() * L * X + X * L.adjoint() * L);
    EXPECT_LT(max_abs(tpf::apply(lindblad_dissipator(L), X) - expected), 1e-12);
    EXPECT_LT(max_abs(tpf::apply(compose(left_multiplication(H), right_multiplication(U)), X) - H * X * U), 1e-12);
}

TEST(Superoperators, HilbertSchmidtAdjoint)
{
    rnd::Engine rng(3);
    const Superoperator S = kraus_map(std::vector<Matrix>{0.6 * rnd::random_unitary(3, rng), 0.8 * rnd::random_unitary(3, rng)});
    const Matrix A = rnd::ginibre(3, 3, rng), B = rnd::ginibre(3, 3, rng);
    const Complex lhs = (A.adjoint() * tpf::apply(S, B)).trace();
    const Complex rhs = (tpf::apply(hs_adjoint(S), A).adjoint() * B).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
}

TEST(Superoperators, CptpDiagnostics)
{
    const auto id = cptp_diagnostics(Superoperator::identity(3));
    EXPECT_EQ(id.trace_preserving_residual, 0.0);
    EXPECT_NEAR(id.choi_min_eigenvalue, 0.0, 1e-14);
    EXPECT_NEAR(id.unital_residual, 0.0, 1e-14);

    // transpose is positive and trace preserving but not completely positive
    Matrix T = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) T(j + 2 * i, i + 2 * j) = 1.0;
    EXPECT_NEAR(cptp_diagnostics(Superoperator(2, T)).choi_min_eigenvalue, -1.0, 1e-12);

    const Superoperator decay = kraus_map(std::vector<Matrix>{pauli::minus(),
                                           Matrix(0.5 * (pauli::identity() - pauli::z()))});
    const auto r = cptp_diagnostics(decay);
    EXPECT_LT(r.trace_preserving_residual, 1e-14);
    EXPECT_GT(r.unital_residual, 0.5);
}

TEST(Operators, HermitianValidation)
{
    Matrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
    EXPECT_THROW(HermitianOperator{m}, InvalidOperator);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = 2.0;
    EXPECT_THROW(DensityMatrix{bad}, InvalidOperator);
}

TEST(Operators, GibbsStateStableAtLargeBeta)
{
    const HermitianOperator h = HermitianOperator::diagonal(RealVector::LinSpaced(3, -1.0, 1.0));
    const DensityMatrix g = gibbs_state(h, 1e4);
    EXPECT_NEAR(g.matrix()(0, 0).real(), 1.0, 1e-14);
    EXPECT_NEAR(log_partition(h, 1e4), 1e4, 1e-8);
    const DensityMatrix g1 = gibbs_state(h, 1.0);
    EXPECT_NEAR(g1.matrix()(0, 0).real() / g1.matrix()(1, 1).real(), std::exp(1.0), 1e-12);
}

TEST(Operators, SpectralFunctions)
{
    rnd::Engine rng(4);
    const HermitianOperator h = rnd::random_hermitian(3, rng);
    const HermitianOperator e = exp_hermitian(h);
    EXPECT_LT(max_abs(log_hermitian(e).matrix() - h.matrix()), 1e-12);
    EXPECT_NEAR(lambda_min(e), std::exp(lambda_min(h)), 1e-12);
    EXPECT_THROW(log_hermitian(h - HermitianOperator::identity(3) * 10.0), DomainError);
    EXPECT_THROW(exp_hermitian(h, 1e6), DomainError);
}

TEST(Operators, GellMannBasisOrthonormal)
{
    for (int d : {2, 3, 4}) {
        const auto basis = gell_mann_basis(d);
        ASSERT_EQ(static_cast<int>(basis.size()), d * d - 1);
        for (std::size_t a = 0; a < basis.size(); ++a) {
            EXPECT_NEAR(std::abs(basis[a].trace()), 0.0, 1e-14);
            EXPECT_TRUE(is_hermitian(basis[a], 1e-14));
            for (std::size_t b = 0; b < basis.size(); ++b) {
                EXPECT_NEAR(std::abs((basis[a].adjoint() * basis[b]).trace()), a == b ? 1.0 : 0.0, 1e-13);
            }
        }
    }
}

TEST(Operators, InvertRefusesSingularMaps)
{
    EXPECT_THROW(invert(Superoperator::zero(2)), SingularMap);
    // complete dephasing kills the coherences
    const Superoperator dephase = kraus_map({Matrix(0.5 * (pauli::identity() + pauli::z())),
                                             Matrix(0.5 * (pauli::identity() - pauli::z()))});
    try {
        invert(dephase, 1e12, 3.5);
        FAIL() << "expected SingularMap";
    } catch (const SingularMap& e) {
        ASSERT_TRUE(e.time().has_value());
        EXPECT_EQ(*e.time(), 3.5);
    }
    rnd::Engine rng(5);
    const Superoperator U = unitary_conjugation(rnd::random_unitary(2, rng));
    const auto inv = invert(U);
    EXPECT_NEAR(inv.condition_number, 1.0, 1e-12);
    EXPECT_LT(max_abs(compose(inv.inverse, U).matrix() - Matrix::Identity(4, 4)), 1e-12);
}

TEST(Quadrature, ExactOnPolynomials)
{
    // even points: composite Simpson, exact on cubics. Odd points end in a
    // three-point panel, exact on quadratics.
    for (int n : {2, 3, 6, 7, 30, 31}) {
        const UniformGrid grid(2.0, n);
        std::vector<double> cubic, quad;
        for (double t : grid.times()) {
            cubic.push_back(1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t);
            quad.push_back(1.0 - 2.0 * t + 3.0 * t * t);
        }
        const auto F = cumulative_simpson(cubic, grid.dt());
        const auto G = cumulative_simpson(quad, grid.dt());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid.time(k);
            if (k % 2 == 0) EXPECT_NEAR(F[k], t - t * t + t * t * t - 0.125 * t * t * t * t, 1e-12) << n << " " << k;
            EXPECT_NEAR(G[k], t - t * t + t * t * t, 1e-12) << n << " " << k;
        }
    }
}

TEST(Quadrature, FourthOrderConvergence)
{
    auto err = [](int n) {
        const UniformGrid grid(3.0, n);
        std::vector<double> f;
        for (double t : grid.times()) f.push_back(std::cos(2.0 * t));
        const auto F = cumulative_simpson(f, grid.dt());
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            worst = std::max(worst, std::abs(F[k] - 0.5 * std::sin(2.0 * grid.time(k))));
        return worst;
    };
    EXPECT_GT(std::log2(err(41) / err(81)), 3.7);
    EXPECT_GT(std::log2(err(40) / err(80)), 3.7);
}

TEST(Quadrature, GridFromTimes)
{
    const std::vector<double> ok{0.0, 0.25, 0.5, 0.75};
    const auto g = UniformGrid::from_times(ok);
    EXPECT_EQ(g.n_steps(), 3);
    EXPECT_DOUBLE_EQ(g.dt(), 0.25);
    EXPECT_EQ(g.index_of(0.6), 2u);
    const std::vector<double> uneven{0.0, 0.25, 0.6};
    EXPECT_ANY_THROW(UniformGrid::from_times(uneven));
}

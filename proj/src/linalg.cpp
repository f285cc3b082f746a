// linalg.cpp: dense operator and superoperator primitives

#include "tpf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "tpf/errors.hpp"

namespace tpf {

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

namespace {

double hermiticity_residual_of(int d, const Matrix& s)
{
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const Matrix sij = unvec(s.col(i + j * d), d);
            const Matrix sji = unvec(s.col(j + i * d), d);
            worst = std::max(worst, max_abs(sji - sij.adjoint()));
        }
    }
    return worst;
}

} // namespace

double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol)
{
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tol * std::max(1.0, max_abs(m));
}

// --- HermitianOperator -------------------------------------------------------

HermitianOperator::HermitianOperator(const Matrix& m, double tol)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidOperator("HermitianOperator requires a non-empty square matrix");
    }
    if (!m.allFinite()) {
        throw InvalidOperator("HermitianOperator entries must be finite");
    }
    if (!is_hermitian(m, tol)) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: ||A - A^dag||_max = " << max_abs(m - m.adjoint());
        throw InvalidOperator(msg.str());
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(int dim)
{
    return HermitianOperator(Matrix::Zero(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::identity(int dim)
{
    return HermitianOperator(Matrix::Identity(dim, dim), Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& values)
{
    return HermitianOperator(values.cast<Complex>().asDiagonal().toDenseMatrix(), Trusted{});
}

double HermitianOperator::expectation(const Matrix& x) const
{
    return (m_ * x).trace().real();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const
{
    return HermitianOperator(m_ + o.m_, Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const
{
    return HermitianOperator(m_ - o.m_, Trusted{});
}

HermitianOperator HermitianOperator::operator*(double s) const
{
    return HermitianOperator(m_ * s, Trusted{});
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix::DensityMatrix(const Matrix& m)
{
    HermitianOperator h(m);
    const double tr = h.trace();
    if (std::abs(tr - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "density matrix trace is " << tr;
        throw InvalidOperator(msg.str());
    }
    const double lmin = lambda_min(h);
    if (lmin < -1e-10) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << lmin;
        throw InvalidOperator(msg.str());
    }
    m_ = h.matrix();
}

DensityMatrix DensityMatrix::maximally_mixed(int dim)
{
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Vector& psi)
{
    const Vector n = psi / psi.norm();
    return DensityMatrix(n * n.adjoint());
}

DensityMatrix gibbs_state(const HermitianOperator& h, double beta)
{
    const auto eig = eig_hermitian(h);
    const double shift = eig.values.minCoeff();
    RealVector w(eig.values.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(-beta * (eig.values(i) - shift));
    w /= w.sum();
    Matrix rho = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix(rho);
}

// --- Superoperator -----------------------------------------------------------

Superoperator::Superoperator(int dim, const Matrix& m) : dim_(dim), m_(m)
{
    if (dim <= 0 || m.rows() != dim * dim || m.cols() != dim * dim) {
        throw InvalidOperator("superoperator matrix must be d^2 x d^2");
    }
    if (!m.allFinite()) {
        throw InvalidOperator("superoperator entries must be finite");
    }
    const double res = hermiticity_residual_of(dim, m);
    if (res > 1e-10 * std::max(1.0, max_abs(m))) {
        std::ostringstream msg;
        msg << "superoperator is not Hermiticity preserving (residual " << res << ")";
        throw InvalidOperator(msg.str());
    }
}

Superoperator Superoperator::unchecked(int dim, Matrix m)
{
    return Superoperator(dim, std::move(m), true);
}

Superoperator Superoperator::identity(int dim)
{
    return Superoperator(dim, Matrix::Identity(dim * dim, dim * dim), true);
}

Superoperator Superoperator::zero(int dim)
{
    return Superoperator(dim, Matrix::Zero(dim * dim, dim * dim), true);
}

Superoperator Superoperator::operator+(const Superoperator& o) const
{
    return Superoperator(dim_, m_ + o.m_, true);
}

Superoperator Superoperator::operator-(const Superoperator& o) const
{
    return Superoperator(dim_, m_ - o.m_, true);
}

Superoperator Superoperator::operator*(Complex s) const
{
    return Superoperator(dim_, m_ * s, true);
}

// --- spectral calculus -------------------------------------------------------

EigenDecomposition eig_hermitian(const HermitianOperator& h)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw InvalidOperator("Hermitian eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator func_hermitian(const HermitianOperator& h, const std::function<double(double)>& f)
{
    const auto eig = eig_hermitian(h);
    RealVector fv(eig.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) {
        fv(i) = f(eig.values(i));
        if (!std::isfinite(fv(i))) {
            std::ostringstream msg;
            msg << "function undefined at eigenvalue " << eig.values(i);
            throw DomainError(msg.str());
        }
    }
    const Matrix out = eig.vectors * fv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    return HermitianOperator(out, 1e-9);
}

HermitianOperator exp_hermitian(const HermitianOperator& h, double scale)
{
    return func_hermitian(h, [scale](double x) { return std::exp(scale * x); });
}

HermitianOperator log_hermitian(const HermitianOperator& h, double zero_tol)
{
    return func_hermitian(h, [zero_tol](double x) {
        if (std::abs(x) <= zero_tol) return 0.0;
        if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
        return std::log(x);
    });
}

double lambda_max(const HermitianOperator& h)
{
    return eig_hermitian(h).values.maxCoeff();
}

double lambda_min(const HermitianOperator& h)
{
    return eig_hermitian(h).values.minCoeff();
}

double log_partition(const HermitianOperator& h, double beta)
{
    const RealVector ev = eig_hermitian(h).values;
    const double lo = ev.minCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) sum += std::exp(-beta * (ev(i) - lo));
    return -beta * lo + std::log(sum);
}

// --- superoperator algebra ---------------------------------------------------

Vector vec(const Matrix& a)
{
    return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, int dim)
{
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix apply(const Superoperator& s, const Matrix& a)
{
    if (a.rows() != s.dim() || a.cols() != s.dim()) {
        throw InvalidOperator("operator dimension does not match superoperator");
    }
    return unvec(s.matrix() * vec(a), s.dim());
}

HermitianOperator apply_hermitian(const Superoperator& s, const HermitianOperator& a, double tol)
{
    return HermitianOperator(tpf::apply(s, a.matrix()), tol);
}

Superoperator hs_adjoint(const Superoperator& s)
{
    return Superoperator::unchecked(s.dim(), s.matrix().adjoint());
}

Superoperator compose(const Superoperator& s1, const Superoperator& s2)
{
    if (s1.dim() != s2.dim()) throw InvalidOperator("cannot compose superoperators of different dimension");
    return Superoperator::unchecked(s1.dim(), s1.matrix() * s2.matrix());
}

double condition_number(const Superoperator& s)
{
    Eigen::JacobiSVD<Matrix> svd(s.matrix());
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

InverseResult invert(const Superoperator& s, double threshold, std::optional<double> time)
{
    Eigen::JacobiSVD<Matrix> svd(s.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= threshold)) {
        std::ostringstream msg;
        msg << "map is not invertible within threshold: condition number " << cond;
        if (time) msg << " at t = " << *time;
        throw SingularMap(cond, time, msg.str());
    }
    Matrix inv = svd.matrixV() * sv.cwiseInverse().cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
    return {Superoperator::unchecked(s.dim(), std::move(inv)), cond};
}

Matrix choi_matrix(const Superoperator& s)
{
    const int d = s.dim();
    Matrix choi = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            choi += kron(matrix_unit(d, i, j), unvec(s.matrix().col(i + j * d), d));
    return choi;
}

CptpReport cptp_diagnostics(const Superoperator& s)
{
    const int d = s.dim();
    CptpReport r{};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const Complex tr = unvec(s.matrix().col(i + j * d), d).trace();
            const double expected = (i == j) ? 1.0 : 0.0;
            r.trace_preserving_residual = std::max(r.trace_preserving_residual, std::abs(tr - expected));
        }
    }
    Matrix choi = choi_matrix(s);
    choi = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(choi, Eigen::EigenvaluesOnly);
    r.choi_min_eigenvalue = solver.eigenvalues().minCoeff();
    const Matrix id = Matrix::Identity(d, d);
    r.unital_residual = (tpf::apply(s, id) - id).norm();
    r.hermiticity_residual = hermiticity_residual_of(d, s.matrix());
    return r;
}

// --- builders ----------------------------------------------------------------

Superoperator left_multiplication(const Matrix& a)
{
    const int d = static_cast<int>(a.rows());
    return Superoperator::unchecked(d, kron(Matrix::Identity(d, d), a));
}

Superoperator right_multiplication(const Matrix& b)
{
    const int d = static_cast<int>(b.rows());
    return Superoperator::unchecked(d, kron(b.transpose(), Matrix::Identity(d, d)));
}

Superoperator unitary_conjugation(const Matrix& u)
{
    const int d = static_cast<int>(u.rows());
    return Superoperator::unchecked(d, kron(u.conjugate(), u));
}

Superoperator hamiltonian_superop(const Matrix& h)
{
    const int d = static_cast<int>(h.rows());
    const Matrix id = Matrix::Identity(d, d);
    const Complex mi(0.0, -1.0);
    return Superoperator::unchecked(d, mi * (kron(id, h) - kron(h.transpose(), id)));
}

Superoperator lindblad_dissipator(const Matrix& l)
{
    const int d = static_cast<int>(l.rows());
    const Matrix id = Matrix::Identity(d, d);
    const Matrix ldl = l.adjoint() * l;
    Matrix m = kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
    return Superoperator::unchecked(d, std::move(m));
}

Superoperator kraus_map(const std::vector<Matrix>& kraus)
{
    if (kraus.empty()) throw InvalidOperator("kraus_map needs at least one operator");
    const int d = static_cast<int>(kraus.front().rows());
    Matrix m = Matrix::Zero(d * d, d * d);
    for (const auto& k : kraus) m += kron(k.conjugate(), k);
    return Superoperator(d, m);
}

Matrix matrix_unit(int dim, int i, int j)
{
    Matrix e = Matrix::Zero(dim, dim);
    e(i, j) = 1.0;
    return e;
}

std::vector<Matrix> gell_mann_basis(int dim)
{
    std::vector<Matrix> basis;
    const double r2 = std::sqrt(2.0);
    for (int j = 0; j < dim; ++j) {
        for (int k = j + 1; k < dim; ++k) {
            Matrix s = Matrix::Zero(dim, dim);
            s(j, k) = s(k, j) = 1.0 / r2;
            basis.push_back(s);
            Matrix a = Matrix::Zero(dim, dim);
            a(j, k) = Complex(0.0, -1.0 / r2);
            a(k, j) = Complex(0.0, 1.0 / r2);
            basis.push_back(a);
        }
    }
    for (int l = 1; l < dim; ++l) {
        Matrix g = Matrix::Zero(dim, dim);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (int j = 0; j < l; ++j) g(j, j) = norm;
        g(l, l) = -static_cast<double>(l) * norm;
        basis.push_back(g);
    }
    return basis;
}

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix y()
{
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

Matrix z()
{
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix plus()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}

Matrix minus()
{
    Matrix m(2, 2);
    m << 0.0, 0.0, 1.0, 0.0;
    return m;
}

} // namespace pauli

} // namespace tpf

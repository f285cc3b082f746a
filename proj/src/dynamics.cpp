// dynamics.cpp: generator extraction, minimal-dissipation split, inverse propagators

#include "tpf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpf/errors.hpp"

namespace tpf::dyn {

namespace {

// Row vector vec(I)^dag S; equals vec(I)^dag for trace-preserving S and 0 for
// trace-annihilating S.
Eigen::RowVectorXcd trace_row(const Superoperator& s)
{
    const int d = s.dim();
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d * d);
    for (int k = 0; k < d; ++k) row += s.matrix().row(k + k * d);
    return row;
}

Eigen::RowVectorXcd identity_row(int d)
{
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d * d);
    for (int k = 0; k < d; ++k) row(k + k * d) = 1.0;
    return row;
}

Matrix weighted_sum(const MapTrajectory& traj, std::size_t first, std::initializer_list<double> weights, double scale)
{
    Matrix acc = Matrix::Zero(traj.map(0).matrix().rows(), traj.map(0).matrix().cols());
    std::size_t k = first;
    for (double w : weights) {
        if (w != 0.0) acc += w * traj.map(k).matrix();
        ++k;
    }
    return acc * scale;
}

} // namespace

MapTrajectory::MapTrajectory(UniformGrid grid, std::vector<Superoperator> maps)
    : grid_(grid), maps_(std::move(maps))
{
    validate();
}

MapTrajectory::MapTrajectory(UniformGrid grid, std::vector<Superoperator> maps, std::vector<Superoperator> derivatives)
    : grid_(grid), maps_(std::move(maps)), derivatives_(std::move(derivatives))
{
    validate();
    if (derivatives_.size() != maps_.size()) {
        throw std::invalid_argument("derivative count does not match map count");
    }
    for (const auto& d : derivatives_) {
        if (d.dim() != dim()) throw std::invalid_argument("derivative dimension mismatch");
    }
}

void MapTrajectory::validate() const
{
    if (maps_.size() != grid_.size()) {
        std::ostringstream msg;
        msg << "trajectory has " << maps_.size() << " maps for " << grid_.size() << " grid points";
        throw std::invalid_argument(msg.str());
    }
    const int d = maps_.front().dim();
    if (max_abs(maps_.front().matrix() - Matrix::Identity(d * d, d * d)) > 1e-12) {
        throw std::invalid_argument("trajectory must start with the identity map");
    }
    const Eigen::RowVectorXcd id_row = identity_row(d);
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        if (maps_[i].dim() != d) throw std::invalid_argument("trajectory maps differ in dimension");
        const double res = (trace_row(maps_[i]) - id_row).cwiseAbs().maxCoeff();
        if (res > 1e-10) {
            std::ostringstream msg;
            msg << "map at t = " << grid_.time(i) << " is not trace preserving (residual " << res << ")";
            throw std::invalid_argument(msg.str());
        }
    }
}

Superoperator map_derivative(const MapTrajectory& traj, std::size_t i, Stencil stencil)
{
    if (traj.derivative_source() == DerivativeSource::analytic) return traj.analytic_derivative(i);

    const std::size_t n = traj.size();
    const double h = traj.grid().dt();
    const int d = traj.dim();
    if (i >= n) throw std::out_of_range("grid index out of range");

    if (stencil == Stencil::central2) {
        if (n < 3) throw BoundaryStencil("second-order stencil needs at least 3 grid points");
        const double s = 1.0 / (2.0 * h);
        if (i == 0) return Superoperator::unchecked(d, weighted_sum(traj, 0, {-3.0, 4.0, -1.0}, s));
        if (i == n - 1) return Superoperator::unchecked(d, weighted_sum(traj, n - 3, {1.0, -4.0, 3.0}, s));
        return Superoperator::unchecked(d, weighted_sum(traj, i - 1, {-1.0, 0.0, 1.0}, s));
    }

    if (n < 5) throw BoundaryStencil("fourth-order stencil needs at least 5 grid points");
    const double s = 1.0 / (12.0 * h);
    if (i == 0) return Superoperator::unchecked(d, weighted_sum(traj, 0, {-25.0, 48.0, -36.0, 16.0, -3.0}, s));
    if (i == 1) return Superoperator::unchecked(d, weighted_sum(traj, 0, {-3.0, -10.0, 18.0, -6.0, 1.0}, s));
    if (i == n - 2) return Superoperator::unchecked(d, weighted_sum(traj, n - 5, {-1.0, 6.0, -18.0, 10.0, 3.0}, s));
    if (i == n - 1) return Superoperator::unchecked(d, weighted_sum(traj, n - 5, {3.0, -16.0, 36.0, -48.0, 25.0}, s));
    return Superoperator::unchecked(d, weighted_sum(traj, i - 2, {1.0, -8.0, 0.0, 8.0, -1.0}, s));
}

Superoperator generator_at(const MapTrajectory& traj, std::size_t i, const GeneratorOptions& options)
{
    const auto inv = invert(traj.map(i), options.condition_threshold, traj.time(i));
    return compose(map_derivative(traj, i, options.stencil), inv.inverse);
}

HermitianOperator effective_hamiltonian(const Superoperator& generator, const Matrix& basis)
{
    const int d = generator.dim();
    if (basis.rows() != d || basis.cols() != d) throw InvalidOperator("basis must be d x d");
    Matrix sum = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            const Matrix jk = basis.col(j) * basis.col(k).adjoint();
            const Matrix kj = jk.adjoint();
            const Matrix lkj = tpf::apply(generator, kj);
            sum += jk * lkj - lkj * jk;
        }
    }
    const Matrix k = sum / Complex(0.0, 2.0 * d);
    return HermitianOperator(k, 1e-8);
}

GeneratorSplit minimal_dissipation_split(const Superoperator& generator, double time)
{
    const int d = generator.dim();
    const double scale = std::max(1.0, max_abs(generator.matrix()));
    const double tr_res = trace_row(generator).cwiseAbs().maxCoeff();
    if (tr_res > 1e-8 * scale) {
        std::ostringstream msg;
        msg << "generator at t = " << time << " is not trace annihilating (residual " << tr_res << ")";
        throw InvalidOperator(msg.str());
    }
    const double herm_res = cptp_diagnostics(generator).hermiticity_residual;
    if (herm_res > 1e-8 * scale) {
        std::ostringstream msg;
        msg << "generator at t = " << time << " is not Hermiticity preserving (residual " << herm_res << ")";
        throw InvalidOperator(msg.str());
    }
    HermitianOperator k = effective_hamiltonian(generator, Matrix::Identity(d, d));
    Superoperator dissipator = generator - hamiltonian_superop(k.matrix());
    return {std::move(k), std::move(dissipator), time};
}

LindbladDecomposition lindblad_decomposition(const Superoperator& dissipator)
{
    const int d = dissipator.dim();
    std::vector<Matrix> basis = gell_mann_basis(d);
    const std::size_t m = basis.size();
    // Process-matrix coefficients in the traceless sector:
    // c_ab = <conj(F_b) (x) F_a, D>_HS, so that D contains sum_ab c_ab F_a . F_b^dag.
    Matrix c(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            const Matrix e = kron(basis[b].conjugate(), basis[a]);
            c(a, b) = (e.adjoint() * dissipator.matrix()).trace();
        }
    }
    c = 0.5 * (c + c.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
    LindbladDecomposition out;
    for (std::size_t k = 0; k < m; ++k) {
        Matrix l = Matrix::Zero(d, d);
        for (std::size_t a = 0; a < m; ++a) l += solver.eigenvectors()(a, k) * basis[a];
        out.rates.push_back(solver.eigenvalues()(k));
        out.operators.push_back(l);
    }
    return out;
}

Superoperator inverse_propagator(const MapTrajectory& traj, std::size_t i_tau, std::size_t i_t, double condition_threshold)
{
    if (i_tau > i_t) throw std::invalid_argument("inverse propagator needs tau <= t");
    if (i_tau == i_t) return Superoperator::identity(traj.dim());
    const auto inv = invert(traj.map(i_t), condition_threshold, traj.time(i_t));
    return compose(traj.map(i_tau), inv.inverse);
}

std::vector<InvertibilityRow> invertibility_report(const MapTrajectory& traj, const InvertibilityOptions& options)
{
    const std::size_t n = traj.size();
    std::vector<InvertibilityRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double cond = condition_number(traj.map(i));
        rows[i] = {traj.time(i), cond, !(cond <= options.condition_threshold), false};
    }
    const std::size_t w = options.spike_window > 0 ? options.spike_window : std::max<std::size_t>(2, n / 50);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double c = rows[i].condition_number;
        if (!(c >= rows[i - 1].condition_number && c >= rows[i + 1].condition_number)) continue;
        const double left = rows[i >= w ? i - w : 0].condition_number;
        const double right = rows[std::min(n - 1, i + w)].condition_number;
        if (c >= options.spike_ratio * std::max(left, right)) rows[i].spike = true;
    }
    return rows;
}

std::optional<std::size_t> first_singular_index(const MapTrajectory& traj, double condition_threshold)
{
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (!(condition_number(traj.map(i)) <= condition_threshold)) return i;
    }
    return std::nullopt;
}

} // namespace tpf::dyn

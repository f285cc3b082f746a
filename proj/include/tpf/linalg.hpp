// linalg.hpp: dense operators, density matrices and superoperators for small Hilbert spaces
//
// Units: hbar = 1 throughout.
//
// Vectorization convention (fixed, never changed): column stacking.
//   vec(A)[i + j*d] = A(i, j),   vec(A X B) = (B^T (x) A) vec(X).
// A superoperator is stored as the d^2 x d^2 matrix acting on vec(.), so that
// composition is the matrix product and the Hilbert-Schmidt adjoint is the
// conjugate transpose.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace tpf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultConditionThreshold = 1e12;

// Max-abs entry, the norm used by all entrywise tolerance checks.
double max_abs(const Matrix& m);

// Returns true when ||m - m^dagger||_max <= tol * max(1, ||m||_max).
bool is_hermitian(const Matrix& m, double tol);

class HermitianOperator {
public:
    // Symmetrizes m if it is Hermitian within tol (relative to max(1, ||m||_max)),
    // throws InvalidOperator otherwise.
    explicit HermitianOperator(const Matrix& m, double tol = kHermitianTol);

    static HermitianOperator zero(int dim);
    static HermitianOperator identity(int dim);
    static HermitianOperator diagonal(const RealVector& values);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

    double trace() const { return m_.trace().real(); }
    // Re Tr{A X}; the imaginary part vanishes for Hermitian X.
    double expectation(const Matrix& x) const;

    HermitianOperator operator+(const HermitianOperator& o) const;
    HermitianOperator operator-(const HermitianOperator& o) const;
    HermitianOperator operator*(double s) const;

private:
    struct Trusted {};
    HermitianOperator(Matrix m, Trusted) : m_(std::move(m)) {}

    Matrix m_;
};

class DensityMatrix {
public:
    // Hermitian to 1e-12, unit trace to 1e-12, min eigenvalue >= -1e-10.
    explicit DensityMatrix(const Matrix& m);

    static DensityMatrix maximally_mixed(int dim);
    static DensityMatrix pure(const Vector& psi);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    HermitianOperator as_operator() const { return HermitianOperator(m_); }

private:
    Matrix m_;
};

// Gibbs state e^{-beta H}/Tr{e^{-beta H}}, evaluated with a spectral shift so large
// beta does not overflow.
DensityMatrix gibbs_state(const HermitianOperator& h, double beta);

class Superoperator {
public:
    // Validates shape and Hermiticity preservation (to 1e-10 relative).
    Superoperator(int dim, const Matrix& m);

    // No validation; for algebra whose result is known to be well formed up to
    // conditioning (compose, invert, finite differences).
    static Superoperator unchecked(int dim, Matrix m);

    static Superoperator identity(int dim);
    static Superoperator zero(int dim);

    int dim() const { return dim_; }
    const Matrix& matrix() const { return m_; }

    Superoperator operator+(const Superoperator& o) const;
    Superoperator operator-(const Superoperator& o) const;
    Superoperator operator*(Complex s) const;

private:
    Superoperator(int dim, Matrix m, bool) : dim_(dim), m_(std::move(m)) {}

    int dim_;
    Matrix m_;
};

// --- spectral calculus -------------------------------------------------------

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // orthonormal columns
};

EigenDecomposition eig_hermitian(const HermitianOperator& h);

// sum_n f(lambda_n) |n><n|; throws DomainError when f returns a non-finite value.
HermitianOperator func_hermitian(const HermitianOperator& h, const std::function<double(double)>& f);

// e^{scale * H}
HermitianOperator exp_hermitian(const HermitianOperator& h, double scale = 1.0);

// Natural log with the convention ln 0 = 0 for eigenvalues with |lambda| <= zero_tol.
// Eigenvalues below -zero_tol raise DomainError.
HermitianOperator log_hermitian(const HermitianOperator& h, double zero_tol = 1e-14);

double lambda_max(const HermitianOperator& h);
double lambda_min(const HermitianOperator& h);

// ln Tr{e^{-beta H}} computed with a spectral shift.
double log_partition(const HermitianOperator& h, double beta);

// --- superoperator algebra ---------------------------------------------------

Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, int dim);

Matrix apply(const Superoperator& s, const Matrix& a);
// apply() followed by symmetrization; tol is relative to max(1, ||result||_max).
HermitianOperator apply_hermitian(const Superoperator& s, const HermitianOperator& a, double tol = 1e-9);

Superoperator hs_adjoint(const Superoperator& s);
// s1 o s2 : first s2, then s1.
Superoperator compose(const Superoperator& s1, const Superoperator& s2);

struct InverseResult {
    Superoperator inverse;
    double condition_number;
};

// 2-norm condition number (ratio of extreme singular values).
double condition_number(const Superoperator& s);

// Throws SingularMap (carrying the condition number and time label) when the
// condition number exceeds threshold.
InverseResult invert(const Superoperator& s,
                     double threshold = kDefaultConditionThreshold,
                     std::optional<double> time = std::nullopt);

struct CptpReport {
    double trace_preserving_residual;  // max_ij |Tr S(|i><j|) - delta_ij|
    double choi_min_eigenvalue;        // unnormalized Choi: sum_ij |i><j| (x) S(|i><j|)
    double unital_residual;            // ||S(I) - I||_F
    double hermiticity_residual;       // max_ij ||S(|j><i|) - S(|i><j|)^dagger||_max
};

// The Choi operator is left unnormalized, so the identity map has Choi spectrum
// {d, 0, ..., 0} and choi_min_eigenvalue = 0.
CptpReport cptp_diagnostics(const Superoperator& s);

Matrix choi_matrix(const Superoperator& s);

// --- builders ----------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);

Superoperator left_multiplication(const Matrix& a);   // X -> A X
Superoperator right_multiplication(const Matrix& b);  // X -> X B
Superoperator unitary_conjugation(const Matrix& u);   // X -> U X U^dagger
Superoperator hamiltonian_superop(const Matrix& h);   // X -> -i[H, X]
Superoperator lindblad_dissipator(const Matrix& l);   // X -> L X L^dag - {L^dag L, X}/2
Superoperator kraus_map(const std::vector<Matrix>& kraus);

Matrix matrix_unit(int dim, int i, int j);

// Orthonormal (Tr{F_a^dag F_b} = delta_ab) traceless Hermitian basis of size d^2 - 1.
std::vector<Matrix> gell_mann_basis(int dim);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
Matrix plus();   // |e><g| with |e> = (1, 0), sigma_z |e> = +|e>
Matrix minus();  // |g><e|
} // namespace pauli

} // namespace tpf

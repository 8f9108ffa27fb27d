#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace framegate {

class Rng;

using Complex = std::complex<double>;

inline constexpr int max_dim = 16;

/// Dense square complex matrix, row-major, dimension 0..16. Dimension 0 is
/// only the moved-from / default state; every operation expects dim >= 1.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim);
    ComplexMatrix(int dim, std::initializer_list<Complex> row_major);
    ComplexMatrix(int dim, std::span<const Complex> row_major);

    static ComplexMatrix identity(int dim);
    static ComplexMatrix diagonal(std::span<const double> entries);
    static ComplexMatrix diagonal(std::initializer_list<double> entries);

    [[nodiscard]] int dim() const noexcept { return dim_; }

    Complex& operator()(int row, int col) { return data_[static_cast<std::size_t>(row * dim_ + col)]; }
    const Complex& operator()(int row, int col) const
    {
        return data_[static_cast<std::size_t>(row * dim_ + col)];
    }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> entries() noexcept { return data_; }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] ComplexMatrix transpose() const;
    [[nodiscard]] ComplexMatrix conj() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex scale);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  private:
    int dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix m);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(ComplexMatrix m, Complex scale);
std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v);

/// Largest entrywise modulus of a − b.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
/// Spectral norm (largest singular value).
double operator_norm(const ComplexMatrix& m);
/// Hilbert-Schmidt inner product tr(a† b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
/// a b a†
ComplexMatrix conjugate_by(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tolerance);
bool is_unitary(const ComplexMatrix& m, double tolerance);
/// (m + m†)/2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

Complex det(const ComplexMatrix& m);
/// Gauss-Jordan with partial pivoting; Singular when |det| <= 1e-12.
ComplexMatrix inverse(const ComplexMatrix& m);

/// Phase-insensitive distance between unitaries: dim − |tr(a† b)|.
double projective_defect(const ComplexMatrix& a, const ComplexMatrix& b);

/// Multiplies by the phase that makes the first entry of the first column
/// with modulus above `threshold` real and positive.
ComplexMatrix canonical_phase(const ComplexMatrix& m, double threshold = 1e-12);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  ///< sorted descending
    ComplexMatrix eigenvectors;       ///< column k belongs to eigenvalues[k]
};

/// Cyclic Jacobi eigensolver for Hermitian input. Degenerate clusters get a
/// basis derived from the cluster projector so the result depends only on
/// the eigenspace, not on rotation order.
EigenDecomposition herm_eig(const ComplexMatrix& a);

/// V f(Λ) V† for a Hermitian matrix.
ComplexMatrix spectral_apply(const EigenDecomposition& eig, const std::function<Complex(double)>& f);

ComplexMatrix sqrt_pd(const ComplexMatrix& a);

struct PolarDecomposition {
    ComplexMatrix R;  ///< positive-definite Hermitian factor
    ComplexMatrix U;  ///< unitary factor, X = R U
};

PolarDecomposition polar(const ComplexMatrix& x);

ComplexMatrix haar_unitary(int dim, std::uint64_t seed);
ComplexMatrix haar_unitary(int dim, Rng& rng);
/// Entries i.i.d. standard complex Gaussian.
ComplexMatrix ginibre(int dim, Rng& rng);
/// Random Hermitian positive-definite matrix C†C + eps·1.
ComplexMatrix random_positive_definite(int dim, Rng& rng, double eps = 0.1);
/// Random density matrix (trace one) of rank `rank` (0 means full rank).
ComplexMatrix random_density(int dim, Rng& rng, int rank = 0);

/// Dense real matrix with arbitrary shape, used for design matrices and
/// four-vector maps.
class RealMatrix {
  public:
    RealMatrix() = default;
    RealMatrix(int rows, int cols);
    RealMatrix(int rows, int cols, std::initializer_list<double> row_major);

    static RealMatrix identity(int n);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }

    [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }
    [[nodiscard]] RealMatrix transpose() const;

    friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator+(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator-(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator*(double s, const RealMatrix& a);
std::vector<double> operator*(const RealMatrix& a, std::span<const double> v);

double max_abs_diff(const RealMatrix& a, const RealMatrix& b);
/// Spectral norm via the symmetric eigenproblem of aᵀa.
double operator_norm(const RealMatrix& a);
double det(const RealMatrix& a);
RealMatrix inverse(const RealMatrix& a);
/// Numerical rank by full-pivot elimination, relative tolerance.
int rank(const RealMatrix& a, double rel_tol = 1e-10);

struct LeastSquares {
    std::vector<double> solution;
    double residual = 0.0;  ///< Euclidean norm of a x − b
    int rank = 0;
};

/// Solves the normal equations aᵀa x = aᵀb. Rank below cols() leaves the
/// solution empty; the caller decides how to report it.
LeastSquares least_squares(const RealMatrix& a, std::span<const double> b, double rel_tol = 1e-10);

}  // namespace framegate

#include "framegate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "framegate/error.hpp"
#include "framegate/random.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {
namespace {

void check_dim(int dim)
{
    if (dim < 0 || dim > max_dim) {
        fail(ErrorCode::InvalidArgument, "matrix dimension " + std::to_string(dim) + " outside 0..16");
    }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.dim() != b.dim()) {
        fail(ErrorCode::DimensionMismatch,
             "dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
}

void require_same_shape(const RealMatrix& a, const RealMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorCode::DimensionMismatch, "real matrix shapes differ");
    }
}

}  // namespace

// ---------------------------------------------------------------- ComplexMatrix

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim)
{
    check_dim(dim);
    data_.assign(static_cast<std::size_t>(dim * dim), Complex{});
}

ComplexMatrix::ComplexMatrix(int dim, std::initializer_list<Complex> row_major)
    : ComplexMatrix(dim, std::span<const Complex>(row_major.begin(), row_major.size()))
{
}

ComplexMatrix::ComplexMatrix(int dim, std::span<const Complex> row_major) : dim_(dim)
{
    check_dim(dim);
    if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
        fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim * dim) + " entries, got "
                                               + std::to_string(row_major.size()));
    }
    data_.assign(row_major.begin(), row_major.end());
}

ComplexMatrix ComplexMatrix::identity(int dim)
{
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries)
{
    ComplexMatrix m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.dim(); ++i) {
        m(i, i) = entries[static_cast<std::size_t>(i)];
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> entries)
{
    return diagonal(std::span<const double>(entries.begin(), entries.size()));
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix out(dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const
{
    ComplexMatrix out(dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::conj() const
{
    ComplexMatrix out(*this);
    for (auto& z : out.data_) {
        z = std::conj(z);
    }
    return out;
}

Complex ComplexMatrix::trace() const
{
    Complex sum{};
    for (int i = 0; i < dim_; ++i) {
        sum += (*this)(i, i);
    }
    return sum;
}

bool ComplexMatrix::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs)
{
    require_same_dim(*this, rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += rhs.data_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs)
{
    require_same_dim(*this, rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= rhs.data_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale)
{
    for (auto& z : data_) {
        z *= scale;
    }
    return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator-(ComplexMatrix m) { return m *= -1.0; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
ComplexMatrix operator*(ComplexMatrix m, Complex scale) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs)
{
    require_same_dim(lhs, rhs);
    const int n = lhs.dim();
    ComplexMatrix out(n);
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < n; ++k) {
            const Complex a = lhs(r, k);
            if (a == Complex{}) {
                continue;
            }
            for (int c = 0; c < n; ++c) {
                out(r, c) += a * rhs(k, c);
            }
        }
    }
    return out;
}

std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v)
{
    if (v.size() != static_cast<std::size_t>(m.dim())) {
        fail(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
    }
    std::vector<Complex> out(v.size());
    for (int r = 0; r < m.dim(); ++r) {
        Complex sum{};
        for (int c = 0; c < m.dim(); ++c) {
            sum += m(r, c) * v[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = sum;
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_same_dim(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return worst;
}

double max_abs(const ComplexMatrix& m)
{
    double worst = 0.0;
    for (auto z : m.entries()) {
        worst = std::max(worst, std::abs(z));
    }
    return worst;
}

double frobenius_norm(const ComplexMatrix& m)
{
    double sum = 0.0;
    for (auto z : m.entries()) {
        sum += std::norm(z);
    }
    return std::sqrt(sum);
}

double operator_norm(const ComplexMatrix& m)
{
    const auto eig = herm_eig(hermitian_part(m.adjoint() * m));
    return std::sqrt(std::max(0.0, eig.eigenvalues.front()));
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_same_dim(a, b);
    Complex sum{};
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        sum += std::conj(a.entries()[i]) * b.entries()[i];
    }
    return sum;
}

ComplexMatrix conjugate_by(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b * a.adjoint(); }

bool is_hermitian(const ComplexMatrix& m, double tolerance)
{
    for (int r = 0; r < m.dim(); ++r) {
        for (int c = r; c < m.dim(); ++c) {
            if (std::abs(m(r, c) - std::conj(m(c, r))) > tolerance) {
                return false;
            }
        }
    }
    return true;
}

bool is_unitary(const ComplexMatrix& m, double tolerance)
{
    return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.dim())) <= tolerance;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m)
{
    ComplexMatrix out(m.dim());
    for (int r = 0; r < m.dim(); ++r) {
        out(r, r) = m(r, r).real();
        for (int c = r + 1; c < m.dim(); ++c) {
            const Complex v = 0.5 * (m(r, c) + std::conj(m(c, r)));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

Complex det(const ComplexMatrix& m)
{
    const int n = m.dim();
    ComplexMatrix a(m);
    Complex result = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        if (a(pivot, col) == Complex{}) {
            return Complex{};
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a(pivot, c), a(col, c));
            }
            result = -result;
        }
        result *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / a(col, col);
            for (int c = col; c < n; ++c) {
                a(r, c) -= f * a(col, c);
            }
        }
    }
    return result;
}

ComplexMatrix inverse(const ComplexMatrix& m)
{
    if (std::abs(det(m)) <= scaled(tol::singular)) {
        fail(ErrorCode::Singular, "matrix is singular (|det| <= 1e-12)");
    }
    const int n = m.dim();
    ComplexMatrix a(m);
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        for (int c = 0; c < n; ++c) {
            std::swap(a(pivot, c), a(col, c));
            std::swap(inv(pivot, c), inv(col, c));
        }
        const Complex p = a(col, col);
        for (int c = 0; c < n; ++c) {
            a(col, c) /= p;
            inv(col, c) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const Complex f = a(r, col);
            if (f == Complex{}) {
                continue;
            }
            for (int c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

double projective_defect(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return static_cast<double>(a.dim()) - std::abs(hs_inner(a, b));
}

ComplexMatrix canonical_phase(const ComplexMatrix& m, double threshold)
{
    for (int r = 0; r < m.dim(); ++r) {
        const Complex z = m(r, 0);
        if (std::abs(z) > threshold) {
            if (z.imag() == 0.0 && z.real() > 0.0) {
                return m;
            }
            ComplexMatrix out = m * (std::abs(z) / z);
            // Exact pivot so a second pass is a no-op.
            out(r, 0) = Complex(std::abs(z), 0.0);
            return out;
        }
    }
    return m;
}

// ---------------------------------------------------------------- herm_eig

namespace {

constexpr int max_sweeps = 100;
constexpr double jacobi_rel_tol = 1e-14;

double off_diagonal_norm(const ComplexMatrix& a)
{
    double sum = 0.0;
    for (int r = 0; r < a.dim(); ++r) {
        for (int c = 0; c < a.dim(); ++c) {
            if (r != c) {
                sum += std::norm(a(r, c));
            }
        }
    }
    return std::sqrt(sum);
}

// One complex Jacobi rotation zeroing a(p,q). The phase of a(p,q) is moved
// into column q first, which reduces the 2x2 block to the real symmetric
// case.
void rotate(ComplexMatrix& a, ComplexMatrix& v, int p, int q)
{
    const Complex z = a(p, q);
    const double abs_z = std::abs(z);
    if (abs_z == 0.0) {
        return;
    }
    const Complex e = z / abs_z;
    const Complex e_bar = std::conj(e);
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double theta = (aqq - app) / (2.0 * abs_z);
    double t = 0.0;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    }
    else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const int n = a.dim();
    for (int k = 0; k < n; ++k) {
        if (k == p || k == q) {
            continue;
        }
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        const Complex new_kp = c * akp - s * e_bar * akq;
        const Complex new_kq = s * akp + c * e_bar * akq;
        a(k, p) = new_kp;
        a(k, q) = new_kq;
        a(p, k) = std::conj(new_kp);
        a(q, k) = std::conj(new_kq);
    }
    a(p, p) = app - t * abs_z;
    a(q, q) = aqq + t * abs_z;
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    for (int k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = c * vkp - s * e_bar * vkq;
        v(k, q) = s * vkp + c * e_bar * vkq;
    }
}

std::vector<Complex> column(const ComplexMatrix& m, int c)
{
    std::vector<Complex> out(static_cast<std::size_t>(m.dim()));
    for (int r = 0; r < m.dim(); ++r) {
        out[static_cast<std::size_t>(r)] = m(r, c);
    }
    return out;
}

double vec_norm(const std::vector<Complex>& x)
{
    double s = 0.0;
    for (auto z : x) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

// Re-derives the basis of a degenerate eigenspace from its projector:
// greedy Gram-Schmidt over projected canonical basis vectors, taking the
// largest remaining residual each step and the lowest index on ties.
std::vector<std::vector<Complex>> cluster_basis(const std::vector<std::vector<Complex>>& vectors)
{
    const std::size_t k = vectors.size();
    const std::size_t n = vectors.front().size();
    std::vector<std::vector<Complex>> candidates(n, std::vector<Complex>(n));
    // candidates[j] = P e_j, P = Σ v v†
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& vec : vectors) {
            const Complex coeff = std::conj(vec[j]);
            for (std::size_t i = 0; i < n; ++i) {
                candidates[j][i] += vec[i] * coeff;
            }
        }
    }
    std::vector<std::vector<Complex>> basis;
    std::vector<bool> used(n, false);
    while (basis.size() < k) {
        std::vector<std::vector<Complex>> residuals(n);
        double best = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) {
                continue;
            }
            auto r = candidates[j];
            for (const auto& b : basis) {
                Complex overlap{};
                for (std::size_t i = 0; i < n; ++i) {
                    overlap += std::conj(b[i]) * r[i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    r[i] -= overlap * b[i];
                }
            }
            best = std::max(best, vec_norm(r));
            residuals[j] = std::move(r);
        }
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!used[j] && vec_norm(residuals[j]) >= best * (1.0 - 1e-9)) {
                pick = j;
                break;
            }
        }
        auto r = residuals[pick];
        // Second pass against the accepted vectors for numerical orthogonality.
        for (const auto& b : basis) {
            Complex overlap{};
            for (std::size_t i = 0; i < n; ++i) {
                overlap += std::conj(b[i]) * r[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                r[i] -= overlap * b[i];
            }
        }
        const double norm = vec_norm(r);
        for (auto& z : r) {
            z /= norm;
        }
        used[pick] = true;
        basis.push_back(std::move(r));
    }
    return basis;
}

void fix_vector_phase(std::vector<Complex>& x)
{
    double biggest = 0.0;
    for (auto z : x) {
        biggest = std::max(biggest, std::abs(z));
    }
    for (auto z : x) {
        if (std::abs(z) >= biggest * (1.0 - 1e-9)) {
            const Complex phase = std::abs(z) / z;
            for (auto& w : x) {
                w *= phase;
            }
            return;
        }
    }
}

}  // namespace

EigenDecomposition herm_eig(const ComplexMatrix& input)
{
    const int n = input.dim();
    if (n < 1) {
        fail(ErrorCode::InvalidArgument, "herm_eig on an empty matrix");
    }
    if (!input.all_finite()) {
        fail(ErrorCode::InvalidArgument, "matrix has non-finite entries");
    }
    if (!is_hermitian(input, scaled(tol::herm) * std::max(1.0, max_abs(input)))) {
        fail(ErrorCode::NotHermitian, "max |A - A^dagger| exceeds 1e-12");
    }
    ComplexMatrix a = hermitian_part(input);
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double norm = frobenius_norm(a);

    int sweep = 0;
    while (off_diagonal_norm(a) > jacobi_rel_tol * norm) {
        if (++sweep > max_sweeps) {
            fail(ErrorCode::NoConvergence, "Jacobi did not converge in 100 sweeps");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                rotate(a, v, p, q);
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x).real() > a(y, y).real(); });

    EigenDecomposition out;
    out.eigenvalues.reserve(static_cast<std::size_t>(n));
    std::vector<std::vector<Complex>> vecs;
    for (int idx : order) {
        out.eigenvalues.push_back(a(idx, idx).real());
        vecs.push_back(column(v, idx));
    }

    const double gap = scaled(tol::cluster_gap);
    std::size_t start = 0;
    while (start < vecs.size()) {
        std::size_t end = start + 1;
        while (end < vecs.size() && out.eigenvalues[end - 1] - out.eigenvalues[end] < gap) {
            ++end;
        }
        if (end - start > 1) {
            std::vector<std::vector<Complex>> cluster(vecs.begin() + static_cast<std::ptrdiff_t>(start),
                                                      vecs.begin() + static_cast<std::ptrdiff_t>(end));
            auto basis = cluster_basis(cluster);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                vecs[start + i] = std::move(basis[i]);
            }
        }
        start = end;
    }

    out.eigenvectors = ComplexMatrix(n);
    for (int c = 0; c < n; ++c) {
        auto& x = vecs[static_cast<std::size_t>(c)];
        fix_vector_phase(x);
        for (int r = 0; r < n; ++r) {
            out.eigenvectors(r, c) = x[static_cast<std::size_t>(r)];
        }
    }
    return out;
}

ComplexMatrix spectral_apply(const EigenDecomposition& eig, const std::function<Complex(double)>& f)
{
    const int n = eig.eigenvectors.dim();
    ComplexMatrix out(n);
    for (int k = 0; k < n; ++k) {
        const Complex fk = f(eig.eigenvalues[static_cast<std::size_t>(k)]);
        for (int r = 0; r < n; ++r) {
            const Complex left = eig.eigenvectors(r, k) * fk;
            for (int c = 0; c < n; ++c) {
                out(r, c) += left * std::conj(eig.eigenvectors(c, k));
            }
        }
    }
    return out;
}

ComplexMatrix sqrt_pd(const ComplexMatrix& a)
{
    const auto eig = herm_eig(a);
    if (eig.eigenvalues.back() <= scaled(tol::singular)) {
        fail(ErrorCode::NotPositiveDefinite, "smallest eigenvalue " + std::to_string(eig.eigenvalues.back())
                                                 + " is not above 1e-12");
    }
    return hermitian_part(spectral_apply(eig, [](double x) { return Complex(std::sqrt(x)); }));
}

PolarDecomposition polar(const ComplexMatrix& x)
{
    if (std::abs(det(x)) <= scaled(tol::singular)) {
        fail(ErrorCode::Singular, "polar decomposition needs |det X| > 1e-12");
    }
    const auto eig = herm_eig(hermitian_part(x * x.adjoint()));
    if (eig.eigenvalues.back() <= 0.0) {
        fail(ErrorCode::Singular, "X X^dagger is not positive definite");
    }
    PolarDecomposition out;
    out.R = hermitian_part(spectral_apply(eig, [](double v) { return Complex(std::sqrt(v)); }));
    const ComplexMatrix r_inv = spectral_apply(eig, [](double v) { return Complex(1.0 / std::sqrt(v)); });
    out.U = r_inv * x;
    return out;
}

ComplexMatrix ginibre(int dim, Rng& rng)
{
    ComplexMatrix z(dim);
    for (auto& entry : z.entries()) {
        const double re = rng.normal();
        const double im = rng.normal();
        entry = Complex(re, im) / std::sqrt(2.0);
    }
    return z;
}

ComplexMatrix haar_unitary(int dim, Rng& rng)
{
    if (dim < 1 || dim > max_dim) {
        fail(ErrorCode::InvalidArgument, "haar_unitary dimension must be 1..16");
    }
    ComplexMatrix q = ginibre(dim, rng);
    // Modified Gram-Schmidt on columns, applied twice. The implied triangular
    // factor has a positive real diagonal, which is the phase correction that
    // makes the distribution Haar.
    for (int c = 0; c < dim; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int prev = 0; prev < c; ++prev) {
                Complex overlap{};
                for (int r = 0; r < dim; ++r) {
                    overlap += std::conj(q(r, prev)) * q(r, c);
                }
                for (int r = 0; r < dim; ++r) {
                    q(r, c) -= overlap * q(r, prev);
                }
            }
        }
        double norm = 0.0;
        for (int r = 0; r < dim; ++r) {
            norm += std::norm(q(r, c));
        }
        norm = std::sqrt(norm);
        for (int r = 0; r < dim; ++r) {
            q(r, c) /= norm;
        }
    }
    return q;
}

ComplexMatrix haar_unitary(int dim, std::uint64_t seed)
{
    Rng rng(seed);
    return haar_unitary(dim, rng);
}

ComplexMatrix random_positive_definite(int dim, Rng& rng, double eps)
{
    const ComplexMatrix c = ginibre(dim, rng);
    return hermitian_part(c.adjoint() * c + eps * ComplexMatrix::identity(dim));
}

ComplexMatrix random_density(int dim, Rng& rng, int rank_wanted)
{
    const int r = rank_wanted <= 0 ? dim : std::min(rank_wanted, dim);
    ComplexMatrix g = ginibre(dim, rng);
    for (int row = 0; row < dim; ++row) {
        for (int col = r; col < dim; ++col) {
            g(row, col) = 0.0;
        }
    }
    ComplexMatrix rho = hermitian_part(g * g.adjoint());
    return rho * (1.0 / rho.trace().real());
}

// ---------------------------------------------------------------- RealMatrix

RealMatrix::RealMatrix(int rows, int cols) : rows_(rows), cols_(cols)
{
    if (rows < 0 || cols < 0) {
        fail(ErrorCode::InvalidArgument, "negative real matrix shape");
    }
    data_.assign(static_cast<std::size_t>(rows * cols), 0.0);
}

RealMatrix::RealMatrix(int rows, int cols, std::initializer_list<double> row_major) : RealMatrix(rows, cols)
{
    if (row_major.size() != data_.size()) {
        fail(ErrorCode::DimensionMismatch, "real matrix initializer size");
    }
    std::copy(row_major.begin(), row_major.end(), data_.begin());
}

RealMatrix RealMatrix::identity(int n)
{
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

RealMatrix RealMatrix::transpose() const
{
    RealMatrix out(cols_, rows_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b)
{
    if (a.cols() != b.rows()) {
        fail(ErrorCode::DimensionMismatch, "real matrix product shapes");
    }
    RealMatrix out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = 0; k < a.cols(); ++k) {
            const double x = a(r, k);
            if (x == 0.0) {
                continue;
            }
            for (int c = 0; c < b.cols(); ++c) {
                out(r, c) += x * b(k, c);
            }
        }
    }
    return out;
}

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b)
{
    require_same_shape(a, b);
    RealMatrix out(a);
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            out(r, c) += b(r, c);
        }
    }
    return out;
}

RealMatrix operator-(const RealMatrix& a, const RealMatrix& b)
{
    require_same_shape(a, b);
    RealMatrix out(a);
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            out(r, c) -= b(r, c);
        }
    }
    return out;
}

RealMatrix operator*(double s, const RealMatrix& a)
{
    RealMatrix out(a);
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            out(r, c) *= s;
        }
    }
    return out;
}

std::vector<double> operator*(const RealMatrix& a, std::span<const double> v)
{
    if (v.size() != static_cast<std::size_t>(a.cols())) {
        fail(ErrorCode::DimensionMismatch, "real matrix-vector size mismatch");
    }
    std::vector<double> out(static_cast<std::size_t>(a.rows()), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        double sum = 0.0;
        for (int c = 0; c < a.cols(); ++c) {
            sum += a(r, c) * v[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = sum;
    }
    return out;
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b)
{
    require_same_shape(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return worst;
}

double operator_norm(const RealMatrix& a)
{
    const RealMatrix gram = a.transpose() * a;
    ComplexMatrix g(gram.rows());
    for (int r = 0; r < gram.rows(); ++r) {
        for (int c = 0; c < gram.cols(); ++c) {
            g(r, c) = gram(r, c);
        }
    }
    const auto eig = herm_eig(hermitian_part(g));
    return std::sqrt(std::max(0.0, eig.eigenvalues.front()));
}

double det(const RealMatrix& m)
{
    if (m.rows() != m.cols()) {
        fail(ErrorCode::DimensionMismatch, "determinant of a non-square matrix");
    }
    const int n = m.rows();
    RealMatrix a(m);
    double result = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        if (a(pivot, col) == 0.0) {
            return 0.0;
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a(pivot, c), a(col, c));
            }
            result = -result;
        }
        result *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (int c = col; c < n; ++c) {
                a(r, c) -= f * a(col, c);
            }
        }
    }
    return result;
}

RealMatrix inverse(const RealMatrix& m)
{
    if (m.rows() != m.cols()) {
        fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
    }
    const int n = m.rows();
    RealMatrix a(m);
    RealMatrix inv = RealMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
                pivot = r;
            }
        }
        if (std::abs(a(pivot, col)) < 1e-300) {
            fail(ErrorCode::Singular, "real matrix is singular");
        }
        for (int c = 0; c < n; ++c) {
            std::swap(a(pivot, c), a(col, c));
            std::swap(inv(pivot, c), inv(col, c));
        }
        const double p = a(col, col);
        for (int c = 0; c < n; ++c) {
            a(col, c) /= p;
            inv(col, c) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a(r, col);
            if (f == 0.0) {
                continue;
            }
            for (int c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

int rank(const RealMatrix& m, double rel_tol)
{
    RealMatrix a(m);
    const int rows = a.rows();
    const int cols = a.cols();
    double scale = 0.0;
    for (double x : a.entries()) {
        scale = std::max(scale, std::abs(x));
    }
    if (scale == 0.0) {
        return 0;
    }
    const double threshold = rel_tol * scale;
    int r = 0;
    std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
    for (; r < std::min(rows, cols); ++r) {
        int best_row = -1;
        int best_col = -1;
        double best = threshold;
        for (int i = r; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                if (!col_used[static_cast<std::size_t>(j)] && std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    best_row = i;
                    best_col = j;
                }
            }
        }
        if (best_row < 0) {
            break;
        }
        for (int j = 0; j < cols; ++j) {
            std::swap(a(best_row, j), a(r, j));
        }
        col_used[static_cast<std::size_t>(best_col)] = true;
        for (int i = r + 1; i < rows; ++i) {
            const double f = a(i, best_col) / a(r, best_col);
            if (f == 0.0) {
                continue;
            }
            for (int j = 0; j < cols; ++j) {
                a(i, j) -= f * a(r, j);
            }
        }
    }
    return r;
}

LeastSquares least_squares(const RealMatrix& a, std::span<const double> b, double rel_tol)
{
    if (b.size() != static_cast<std::size_t>(a.rows())) {
        fail(ErrorCode::DimensionMismatch, "least squares right-hand side size");
    }
    LeastSquares out;
    out.rank = rank(a, rel_tol);
    if (out.rank < a.cols()) {
        return out;
    }
    const RealMatrix at = a.transpose();
    const RealMatrix normal = at * a;
    const std::vector<double> rhs = at * b;
    const RealMatrix inv = inverse(normal);
    out.solution = inv * std::span<const double>(rhs);
    const std::vector<double> fitted = a * std::span<const double>(out.solution);
    double res = 0.0;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        res += (fitted[i] - b[i]) * (fitted[i] - b[i]);
    }
    out.residual = std::sqrt(res);
    return out;
}

}  // namespace framegate

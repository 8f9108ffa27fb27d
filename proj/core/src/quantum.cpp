#include "framegate/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "framegate/error.hpp"
#include "framegate/random.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {
namespace {

void require_dim(int expected, int got, const char* what)
{
    if (expected != got) {
        fail(ErrorCode::DimensionMismatch, std::string(what) + ": dimension " + std::to_string(got)
                                               + " where " + std::to_string(expected) + " was expected");
    }
}

// Merges descending eigenvalues into clusters and returns, for each
// cluster, its mean eigenvalue and the column indices it covers.
struct Cluster {
    double eigenvalue = 0.0;
    int first = 0;
    int last = 0;  // exclusive
};

std::vector<Cluster> clusters_of(const std::vector<double>& eigenvalues)
{
    std::vector<Cluster> out;
    const double gap = scaled(tol::cluster_gap);
    int start = 0;
    const int n = static_cast<int>(eigenvalues.size());
    while (start < n) {
        int end = start + 1;
        while (end < n && eigenvalues[static_cast<std::size_t>(end - 1)] - eigenvalues[static_cast<std::size_t>(end)] < gap) {
            ++end;
        }
        double sum = 0.0;
        for (int k = start; k < end; ++k) {
            sum += eigenvalues[static_cast<std::size_t>(k)];
        }
        out.push_back({sum / (end - start), start, end});
        start = end;
    }
    return out;
}

ComplexMatrix cluster_projector(const EigenDecomposition& eig, const Cluster& c)
{
    const int n = eig.eigenvectors.dim();
    ComplexMatrix p(n);
    for (int k = c.first; k < c.last; ++k) {
        for (int r = 0; r < n; ++r) {
            for (int col = 0; col < n; ++col) {
                p(r, col) += eig.eigenvectors(r, k) * std::conj(eig.eigenvectors(col, k));
            }
        }
    }
    return p;
}

bool matches(double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)) * tolerance_scale(); }

ComplexMatrix from_coordinates(int dim, const std::vector<ComplexMatrix>& basis, std::span<const double> coords)
{
    ComplexMatrix out(dim);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        out += coords[k] * basis[k];
    }
    return hermitian_part(out);
}

double hermitian_overlap(const ComplexMatrix& b, const ComplexMatrix& p)
{
    // tr(b p) for Hermitian arguments is real
    double sum = 0.0;
    const int n = b.dim();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            sum += (b(r, c) * p(c, r)).real();
        }
    }
    return sum;
}

// Projects a Hermitian matrix onto unit-trace PSD matrices by clipping the
// spectrum; returns the smallest eigenvalue seen before clipping.
double clip_to_state(ComplexMatrix& rho)
{
    const auto eig = herm_eig(rho);
    const double min_eig = eig.eigenvalues.back();
    if (min_eig < 0.0) {
        rho = hermitian_part(spectral_apply(eig, [](double x) { return Complex(std::max(0.0, x)); }));
    }
    rho = rho * (1.0 / rho.trace().real());
    return min_eig;
}

}  // namespace

// ---------------------------------------------------------------- State

State State::make(ComplexMatrix rho, std::optional<ComplexMatrix> metric)
{
    if (rho.dim() < 1 || !rho.all_finite()) {
        fail(ErrorCode::NotPhysical, "state matrix is empty or non-finite");
    }
    if (!is_hermitian(rho, scaled(tol::herm) * std::max(1.0, max_abs(rho)))) {
        fail(ErrorCode::NotHermitian, "state matrix is not Hermitian");
    }
    rho = hermitian_part(rho);
    const auto eig = herm_eig(rho);
    if (eig.eigenvalues.back() < -scaled(tol::psd) * std::max(1.0, eig.eigenvalues.front())) {
        fail(ErrorCode::NotPhysical, "state has eigenvalue " + std::to_string(eig.eigenvalues.back()));
    }
    ComplexMatrix weight = ComplexMatrix::identity(rho.dim());
    if (metric) {
        require_dim(rho.dim(), metric->dim(), "metric");
        if (!is_hermitian(*metric, scaled(tol::herm) * std::max(1.0, max_abs(*metric)))) {
            fail(ErrorCode::NotHermitian, "metric is not Hermitian");
        }
        *metric = hermitian_part(*metric);
        const ComplexMatrix r_inv = inverse(*metric);
        weight = hermitian_part(r_inv * r_inv);
    }
    const double norm = hs_inner(weight, rho).real();
    if (std::abs(norm - 1.0) > scaled(tol::recon)) {
        fail(ErrorCode::NotPhysical, "metric trace tr(rho R^-2) = " + std::to_string(norm) + " is not 1");
    }
    return State(std::move(rho), std::move(metric));
}

ComplexMatrix State::metric_or_identity() const { return metric_ ? *metric_ : ComplexMatrix::identity(dim()); }

ComplexMatrix State::metric_weight() const
{
    if (!metric_) {
        return ComplexMatrix::identity(dim());
    }
    const ComplexMatrix r_inv = inverse(*metric_);
    return hermitian_part(r_inv * r_inv);
}

// ---------------------------------------------------------------- Observable

Observable Observable::make(ComplexMatrix matrix, std::string label, std::string unit,
                            std::optional<ComplexMatrix> metric)
{
    if (matrix.dim() < 1 || !matrix.all_finite()) {
        fail(ErrorCode::InvalidArgument, "observable matrix is empty or non-finite");
    }
    if (metric) {
        require_dim(matrix.dim(), metric->dim(), "observable metric");
        const ComplexMatrix r_inv = inverse(*metric);
        const ComplexMatrix weighted = r_inv * r_inv * matrix;
        if (!is_hermitian(weighted, scaled(tol::recon) * std::max(1.0, max_abs(weighted)))) {
            fail(ErrorCode::MetricIncompatible, "R^-2 M is not Hermitian");
        }
    }
    else {
        if (!is_hermitian(matrix, scaled(tol::herm) * std::max(1.0, max_abs(matrix)))) {
            fail(ErrorCode::NotHermitian, "observable is not Hermitian");
        }
        matrix = hermitian_part(matrix);
    }
    return Observable{std::move(matrix), std::move(label), std::move(unit), std::move(metric)};
}

// ---------------------------------------------------------------- Encoding

Encoding Encoding::make(const ComplexMatrix& x, int parity)
{
    if (parity != 1 && parity != -1) {
        fail(ErrorCode::InvalidArgument, "parity must be +1 or -1");
    }
    if (x.dim() < 1 || !x.all_finite()) {
        fail(ErrorCode::InvalidArgument, "encoding matrix is empty or non-finite");
    }
    if (std::abs(det(x)) <= scaled(tol::singular)) {
        fail(ErrorCode::Singular, "encoding matrix has |det| <= 1e-12");
    }
    return Encoding(canonical_phase(x), parity);
}

bool Encoding::is_unitary() const { return framegate::is_unitary(x_, 1e-10 * tolerance_scale()); }

ComplexMatrix encode_matrix(const Encoding& phi, const ComplexMatrix& m)
{
    require_dim(phi.dim(), m.dim(), "encoding");
    if (phi.parity() == 1) {
        return phi.X() * m * phi.X().adjoint();
    }
    const ComplexMatrix xb = phi.X().conj();
    return xb * m.transpose() * xb.adjoint();
}

State apply_encoding(const Encoding& phi, const State& rho)
{
    require_dim(phi.dim(), rho.dim(), "apply_encoding");
    const ComplexMatrix out = hermitian_part(encode_matrix(phi, rho.rho()));
    // The metric transports like the state: R'² = X R² X† (conjugated for
    // parity −1), which keeps tr(ρ' R'⁻²) = tr(ρ R⁻²).
    const ComplexMatrix r = rho.metric_or_identity();
    ComplexMatrix r2 = hermitian_part(phi.X() * (r * r) * phi.X().adjoint());
    if (phi.parity() == -1) {
        r2 = r2.conj();
    }
    std::optional<ComplexMatrix> metric;
    if (max_abs_diff(r2, ComplexMatrix::identity(r2.dim())) > scaled(tol::herm)) {
        metric = sqrt_pd(r2);
    }
    return State::make(out, std::move(metric));
}

Observable apply_encoding_observable(const Encoding& phi, const Observable& m)
{
    require_dim(phi.dim(), m.matrix.dim(), "apply_encoding_observable");
    const ComplexMatrix& x = phi.X();
    const ComplexMatrix inner = phi.parity() == 1 ? m.matrix : m.matrix.transpose();
    return Observable::make(hermitian_part(x.adjoint() * inner * x), m.label, m.unit);
}

// ---------------------------------------------------------------- Born rule

namespace {

// Canonical Hermitian stand-ins for a metric state and an R-Hermitian
// operator: σ = R⁻¹ρR⁻¹ and B = R⁻¹ M R share the statistics.
std::pair<ComplexMatrix, ComplexMatrix> canonical_pair(const State& rho, const Observable& m)
{
    require_dim(rho.dim(), m.matrix.dim(), "born");
    if (!rho.metric()) {
        if (!is_hermitian(m.matrix, scaled(tol::herm) * std::max(1.0, max_abs(m.matrix)))) {
            fail(ErrorCode::MetricIncompatible, "observable is not Hermitian for a state without metric");
        }
        return {rho.rho(), hermitian_part(m.matrix)};
    }
    const ComplexMatrix& r = *rho.metric();
    const ComplexMatrix r_inv = inverse(r);
    const ComplexMatrix weighted = r_inv * r_inv * m.matrix;
    if (!is_hermitian(weighted, scaled(tol::recon) * std::max(1.0, max_abs(weighted)))) {
        fail(ErrorCode::MetricIncompatible, "R^-2 M is not Hermitian for the state's metric");
    }
    ComplexMatrix sigma = hermitian_part(r_inv * rho.rho() * r_inv);
    ComplexMatrix b = hermitian_part(r_inv * m.matrix * r);
    return {std::move(sigma), std::move(b)};
}

}  // namespace

std::vector<Outcome> born(const State& rho, const Observable& m)
{
    const auto [sigma, b] = canonical_pair(rho, m);
    const auto eig = herm_eig(b);
    std::vector<Outcome> out;
    double total = 0.0;
    for (const auto& c : clusters_of(eig.eigenvalues)) {
        const double p = std::clamp(hermitian_overlap(sigma, cluster_projector(eig, c)), 0.0, 1.0);
        out.push_back({c.eigenvalue, p});
        total += p;
    }
    if (total > 0.0) {
        for (auto& o : out) {
            o.probability = std::clamp(o.probability / total, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<double> outcome_spectrum(const State& rho, const Observable& device)
{
    require_dim(rho.dim(), device.matrix.dim(), "outcome_spectrum");
    const ComplexMatrix r = rho.metric_or_identity();
    return herm_eig(hermitian_part(r * device.matrix * r)).eigenvalues;
}

// ---------------------------------------------------------------- tomography

std::vector<ComplexMatrix> hermitian_basis(int dim)
{
    std::vector<ComplexMatrix> basis;
    basis.push_back(ComplexMatrix::identity(dim) * (1.0 / std::sqrt(static_cast<double>(dim))));
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < dim; ++j) {
        for (int k = j + 1; k < dim; ++k) {
            ComplexMatrix sym(dim);
            sym(j, k) = s;
            sym(k, j) = s;
            basis.push_back(std::move(sym));
            ComplexMatrix anti(dim);
            anti(j, k) = Complex(0.0, -s);
            anti(k, j) = Complex(0.0, s);
            basis.push_back(std::move(anti));
        }
    }
    for (int l = 1; l < dim; ++l) {
        ComplexMatrix d(dim);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (int m = 0; m < l; ++m) {
            d(m, m) = norm;
        }
        d(l, l) = -l * norm;
        basis.push_back(std::move(d));
    }
    return basis;
}

std::vector<double> hermitian_coordinates(const ComplexMatrix& h)
{
    const auto basis = hermitian_basis(h.dim());
    std::vector<double> out;
    out.reserve(basis.size());
    for (const auto& b : basis) {
        out.push_back(hermitian_overlap(b, h));
    }
    return out;
}

std::vector<SpectralProjector> spectral_projectors(const ComplexMatrix& h)
{
    const auto eig = herm_eig(h);
    std::vector<SpectralProjector> out;
    for (const auto& c : clusters_of(eig.eigenvalues)) {
        out.push_back({c.eigenvalue, cluster_projector(eig, c)});
    }
    return out;
}

TomographyResult tomography(int dim, const std::vector<Measurement>& data, const TomographyOptions& options)
{
    if (dim < 1 || dim > max_dim) {
        fail(ErrorCode::InvalidArgument, "tomography dimension outside 1..16");
    }
    const auto basis = hermitian_basis(dim);
    const int unknowns = dim * dim;

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& meas : data) {
        require_dim(dim, meas.observable.matrix.dim(), "tomography observable");
        const auto eig = herm_eig(meas.observable.matrix);
        const auto clusters = clusters_of(eig.eigenvalues);
        std::vector<double> probs(clusters.size(), 0.0);
        for (const auto& o : meas.distribution) {
            auto hit = std::find_if(clusters.begin(), clusters.end(),
                                    [&](const Cluster& c) { return matches(o.eigenvalue, c.eigenvalue); });
            if (hit == clusters.end()) {
                fail(ErrorCode::Inconsistent, "outcome " + std::to_string(o.eigenvalue) + " is not an eigenvalue of '"
                                                  + meas.observable.label + "'");
            }
            probs[static_cast<std::size_t>(hit - clusters.begin())] += o.probability;
        }
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const ComplexMatrix proj = cluster_projector(eig, clusters[c]);
            std::vector<double> row;
            row.reserve(basis.size());
            for (const auto& b : basis) {
                row.push_back(hermitian_overlap(b, proj));
            }
            rows.push_back(std::move(row));
            rhs.push_back(probs[c]);
        }
    }

    RealMatrix design(static_cast<int>(rows.size()), unknowns);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < unknowns; ++c) {
            design(static_cast<int>(r), c) = rows[r][static_cast<std::size_t>(c)];
        }
    }
    const auto fit = least_squares(design, rhs);
    if (fit.rank < unknowns) {
        fail(ErrorCode::Incomplete, "design matrix rank " + std::to_string(fit.rank) + " of "
                                        + std::to_string(unknowns) + " needed");
    }
    if (fit.residual > options.residual_tol * tolerance_scale()) {
        fail(ErrorCode::Inconsistent, "least-squares residual " + std::to_string(fit.residual));
    }
    ComplexMatrix rho = from_coordinates(dim, basis, fit.solution);
    if (rho.trace().real() <= 0.0) {
        fail(ErrorCode::NotPhysical, "reconstructed trace is not positive");
    }
    rho = rho * (1.0 / rho.trace().real());
    const double min_eig = clip_to_state(rho);
    if (min_eig < -options.not_physical_tol * tolerance_scale()) {
        fail(ErrorCode::NotPhysical, "reconstructed eigenvalue " + std::to_string(min_eig));
    }
    return TomographyResult{State::make(rho), fit.residual, min_eig, fit.rank};
}

TomographyResult typed_tomography(int dim, const std::vector<TypedMeasurement>& data,
                                  const TomographyOptions& options)
{
    if (dim < 1 || dim > max_dim) {
        fail(ErrorCode::InvalidArgument, "tomography dimension outside 1..16");
    }
    const auto basis = hermitian_basis(dim);
    const int unknowns = dim * dim;

    // The type S = R² enters the spectrum linearly through tr(S N) = Σ λ.
    RealMatrix design(static_cast<int>(data.size()), unknowns);
    std::vector<double> sums;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& m = data[i];
        require_dim(dim, m.device.matrix.dim(), "typed tomography device");
        if (static_cast<int>(m.eigenvalues.size()) != dim) {
            fail(ErrorCode::Inconsistent, "eigenvalue readout needs " + std::to_string(dim) + " values");
        }
        for (int c = 0; c < unknowns; ++c) {
            design(static_cast<int>(i), c) = hermitian_overlap(basis[static_cast<std::size_t>(c)], m.device.matrix);
        }
        double s = 0.0;
        for (double e : m.eigenvalues) {
            s += e;
        }
        sums.push_back(s);
    }
    const auto fit = least_squares(design, sums);
    if (fit.rank < unknowns) {
        fail(ErrorCode::Incomplete, "device span rank " + std::to_string(fit.rank) + " of "
                                        + std::to_string(unknowns) + " needed for the type");
    }
    const ComplexMatrix s = from_coordinates(dim, basis, fit.solution);
    const auto s_eig = herm_eig(s);
    if (s_eig.eigenvalues.back() <= scaled(tol::singular)) {
        fail(ErrorCode::NotPhysical, "fitted type is not positive definite");
    }
    const ComplexMatrix r = hermitian_part(spectral_apply(s_eig, [](double x) { return Complex(std::sqrt(x)); }));

    std::vector<Measurement> canonical;
    double spectrum_residual = 0.0;
    for (const auto& m : data) {
        const ComplexMatrix b = hermitian_part(r * m.device.matrix * r);
        const auto spectrum = herm_eig(b).eigenvalues;
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            spectrum_residual = std::max(spectrum_residual, std::abs(spectrum[k] - m.eigenvalues[k]));
        }
        canonical.push_back({Observable::make(b, m.device.label, m.device.unit), m.distribution});
    }
    if (spectrum_residual > options.residual_tol * tolerance_scale() * std::max(1.0, max_abs(s))) {
        fail(ErrorCode::Inconsistent, "eigenvalue readouts fit no single type (residual "
                                          + std::to_string(spectrum_residual) + ")");
    }
    auto inner = tomography(dim, canonical, options);
    const ComplexMatrix omega = hermitian_part(r * inner.state.rho() * r);
    std::optional<ComplexMatrix> metric;
    if (max_abs_diff(r, ComplexMatrix::identity(dim)) > scaled(tol::herm)) {
        metric = r;
    }
    return TomographyResult{State::make(omega, std::move(metric)), std::max(inner.residual, spectrum_residual),
                            inner.min_eigenvalue, fit.rank};
}

// ---------------------------------------------------------------- relation

namespace {

// Linear map on complex matrices from its action O on traceless
// coordinates (identity fixed), optionally precomposed with transpose.
ComplexMatrix apply_fitted_map(const std::vector<ComplexMatrix>& basis, const RealMatrix& o, const ComplexMatrix& z,
                               bool transpose_first)
{
    const ComplexMatrix in = transpose_first ? z.transpose() : z;
    const int n = static_cast<int>(basis.size());
    ComplexMatrix out = hs_inner(basis[0], in) * basis[0];
    for (int k = 1; k < n; ++k) {
        const Complex ck = hs_inner(basis[static_cast<std::size_t>(k)], in);
        if (ck == Complex{}) {
            continue;
        }
        for (int j = 1; j < n; ++j) {
            out += (ck * o(j - 1, k - 1)) * basis[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

struct Candidate {
    ComplexMatrix u;
    double residual = std::numeric_limits<double>::infinity();
};

Candidate candidate_for(const std::vector<std::pair<State, State>>& pairs, const std::vector<ComplexMatrix>& basis,
                        const RealMatrix& o, int parity)
{
    const int d = pairs.front().first.dim();
    const int dd = d * d;
    // Choi matrix C[(a,i),(b,j)] = M(E_ab)_ij; for M = Ad_V it equals |w⟩⟨w|
    // with w[(a,i)] = V_ia.
    ComplexMatrix choi(dd);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            ComplexMatrix e(d);
            e(a, b) = 1.0;
            const ComplexMatrix image = apply_fitted_map(basis, o, e, parity == -1);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    choi(a * d + i, b * d + j) = image(i, j);
                }
            }
        }
    }
    const auto eig = herm_eig(hermitian_part(choi));
    const double lead = eig.eigenvalues.front();
    Candidate out;
    if (lead <= 0.0) {
        return out;
    }
    ComplexMatrix v(d);
    for (int a = 0; a < d; ++a) {
        for (int i = 0; i < d; ++i) {
            v(i, a) = eig.eigenvectors(a * d + i, 0) * std::sqrt(lead);
        }
    }
    if (std::abs(det(v)) <= scaled(tol::singular)) {
        return out;
    }
    ComplexMatrix u = polar(v).U;
    if (parity == -1) {
        u = u.conj();  // ρ' = V ρᵀ V† = Ū ρᵀ Ū†
    }
    u = canonical_phase(u);
    const Encoding enc = Encoding::make(u, parity);
    double worst = 0.0;
    for (const auto& [req, recv] : pairs) {
        worst = std::max(worst, max_abs_diff(encode_matrix(enc, req.rho()), recv.rho()));
    }
    out.u = u;
    out.residual = worst;
    return out;
}

}  // namespace

RelationFit reconstruct_relation(const std::vector<std::pair<State, State>>& pairs, const RelationOptions& options)
{
    if (pairs.empty()) {
        fail(ErrorCode::Underdetermined, "no state pairs supplied");
    }
    const int d = pairs.front().first.dim();
    if (d < 2 || d > 4) {
        fail(ErrorCode::InvalidArgument, "reconstruct_relation supports dimensions 2..4");
    }
    for (const auto& [req, recv] : pairs) {
        require_dim(d, req.dim(), "requested state");
        require_dim(d, recv.dim(), "received state");
    }
    const auto basis = hermitian_basis(d);
    const int traceless = d * d - 1;
    const int m = static_cast<int>(pairs.size());

    // Fit the Bloch-space map O row by row: r'_j = Σ_k O_jk r_k.
    RealMatrix inputs(m, traceless);
    std::vector<std::vector<double>> outputs(static_cast<std::size_t>(traceless), std::vector<double>(static_cast<std::size_t>(m)));
    for (int i = 0; i < m; ++i) {
        const auto& [req, recv] = pairs[static_cast<std::size_t>(i)];
        for (int k = 0; k < traceless; ++k) {
            inputs(i, k) = hermitian_overlap(basis[static_cast<std::size_t>(k + 1)], req.rho());
            outputs[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                = hermitian_overlap(basis[static_cast<std::size_t>(k + 1)], recv.rho());
        }
    }
    RealMatrix o(traceless, traceless);
    for (int j = 0; j < traceless; ++j) {
        const auto fit = least_squares(inputs, outputs[static_cast<std::size_t>(j)]);
        if (fit.rank < traceless) {
            fail(ErrorCode::Underdetermined, "requested states span " + std::to_string(fit.rank) + " of "
                                                 + std::to_string(traceless) + " traceless directions");
        }
        for (int k = 0; k < traceless; ++k) {
            o(j, k) = fit.solution[static_cast<std::size_t>(k)];
        }
    }

    Candidate chosen;
    int parity = 1;
    if (d == 2) {
        parity = det(o) >= 0.0 ? 1 : -1;
        chosen = candidate_for(pairs, basis, o, parity);
    }
    else {
        Candidate plus = candidate_for(pairs, basis, o, 1);
        Candidate minus = candidate_for(pairs, basis, o, -1);
        if (minus.residual < plus.residual - 1e-12) {
            chosen = std::move(minus);
            parity = -1;
        }
        else {
            chosen = std::move(plus);
        }
    }
    if (!(chosen.residual <= options.max_residual * tolerance_scale())) {
        fail(ErrorCode::NoConsistentRelation, "best relation leaves residual " + std::to_string(chosen.residual));
    }
    return RelationFit{Encoding::make(chosen.u, parity), chosen.residual};
}

// ---------------------------------------------------------------- sampling

std::vector<OutcomeCount> sample_outcomes(const State& rho, const Observable& m, std::uint64_t n, std::uint64_t seed)
{
    const auto dist = born(rho, m);
    if (n == 0) {
        return {};
    }
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& o : dist) {
        acc += o.probability;
        cdf.push_back(acc);
    }
    std::vector<OutcomeCount> counts;
    for (const auto& o : dist) {
        counts.push_back({o.eigenvalue, 0});
    }
    Rng rng(seed);
    const std::size_t last = cdf.size() - 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        std::size_t k = 0;
        while (k < last && u >= cdf[k]) {
            ++k;
        }
        ++counts[k].count;
    }
    return counts;
}

// ---------------------------------------------------------------- helpers

ComplexMatrix psd_sqrt(const ComplexMatrix& a)
{
    const auto eig = herm_eig(hermitian_part(a));
    return hermitian_part(spectral_apply(eig, [](double x) { return Complex(std::sqrt(std::max(0.0, x))); }));
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma)
{
    const ComplexMatrix root = psd_sqrt(rho);
    const auto eig = herm_eig(hermitian_part(root * sigma * root));
    double tr = 0.0;
    for (double x : eig.eigenvalues) {
        tr += std::sqrt(std::max(0.0, x));
    }
    return std::clamp(tr * tr, 0.0, 1.0);
}

ComplexMatrix pure_state(std::span<const Complex> v)
{
    const int n = static_cast<int>(v.size());
    ComplexMatrix out(n);
    double norm = 0.0;
    for (auto z : v) {
        norm += std::norm(z);
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            out(r, c) = v[static_cast<std::size_t>(r)] * std::conj(v[static_cast<std::size_t>(c)]) / norm;
        }
    }
    return out;
}

const ComplexMatrix& pauli_x()
{
    static const ComplexMatrix m(2, {0.0, 1.0, 1.0, 0.0});
    return m;
}

const ComplexMatrix& pauli_y()
{
    static const ComplexMatrix m(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0});
    return m;
}

const ComplexMatrix& pauli_z()
{
    static const ComplexMatrix m(2, {1.0, 0.0, 0.0, -1.0});
    return m;
}

}  // namespace framegate

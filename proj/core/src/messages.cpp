#include "framegate/messages.hpp"

#include <cmath>

#include "framegate/error.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {

SystemDescriptor SystemDescriptor::make(ComplexMatrix r, ComplexMatrix u, int parity)
{
    if (parity != 1 && parity != -1) {
        fail(ErrorCode::InvalidArgument, "descriptor parity must be +1 or -1");
    }
    if (r.dim() < 1 || r.dim() != u.dim() || !r.all_finite() || !u.all_finite()) {
        fail(ErrorCode::DimensionMismatch, "descriptor type and basis must be finite with equal dimension");
    }
    if (!is_hermitian(r, scaled(tol::recon) * std::max(1.0, max_abs(r)))) {
        fail(ErrorCode::NotHermitian, "descriptor type is not Hermitian");
    }
    r = hermitian_part(r);
    if (herm_eig(r).eigenvalues.back() <= scaled(tol::singular)) {
        fail(ErrorCode::NotPositiveDefinite, "descriptor type is not positive definite");
    }
    if (!is_unitary(u, scaled(tol::recon))) {
        fail(ErrorCode::InvalidArgument, "descriptor basis is not unitary");
    }
    return SystemDescriptor(std::move(r), std::move(u), parity);
}

SystemDescriptor SystemDescriptor::from_encoding(const Encoding& phi)
{
    auto p = polar(phi.X());
    ComplexMatrix r = phi.parity() == 1 ? std::move(p.R) : p.R.transpose();
    return make(std::move(r), std::move(p.U), phi.parity());
}

ComplexMatrix SystemDescriptor::X() const { return (parity_ == 1 ? r_ : r_.transpose()) * u_; }

std::string_view to_string(MessageKind k) noexcept
{
    switch (k) {
    case MessageKind::Hello: return "Hello";
    case MessageKind::Request: return "Request";
    case MessageKind::Answer: return "Answer";
    case MessageKind::Correction: return "Correction";
    case MessageKind::Verify: return "Verify";
    case MessageKind::Abort: return "Abort";
    }
    return "?";
}

std::vector<double> distinct_eigenvalues(const std::vector<double>& eigenvalues)
{
    std::vector<double> out;
    const double gap = scaled(tol::cluster_gap);
    std::size_t start = 0;
    while (start < eigenvalues.size()) {
        std::size_t end = start + 1;
        while (end < eigenvalues.size() && eigenvalues[end - 1] - eigenvalues[end] < gap) {
            ++end;
        }
        double sum = 0.0;
        for (std::size_t k = start; k < end; ++k) {
            sum += eigenvalues[k];
        }
        out.push_back(sum / static_cast<double>(end - start));
        start = end;
    }
    return out;
}

std::vector<Outcome> outcome_list(const std::vector<double>& eigenvalues, const std::vector<double>& probabilities)
{
    const auto distinct = distinct_eigenvalues(eigenvalues);
    if (distinct.size() != probabilities.size()) {
        fail(ErrorCode::InvalidArgument, std::to_string(distinct.size()) + " distinct eigenvalues but "
                                             + std::to_string(probabilities.size()) + " probabilities");
    }
    std::vector<Outcome> out;
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        out.push_back({distinct[k], probabilities[k]});
    }
    return out;
}

void validate(const RequestMsg& r)
{
    const std::size_t n = r.observables.size();
    if (r.eigenvalues.size() != n || r.probabilities.size() != n) {
        fail(ErrorCode::InvalidArgument, "request lists disagree in length");
    }
    if (r.mode.is_sampled() && r.mode.copies == 0) {
        fail(ErrorCode::InvalidArgument, "sampled mode needs at least one copy");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& label = r.observables[i].label;
        const auto& ev = r.eigenvalues[i];
        if (static_cast<int>(ev.size()) != r.observables[i].matrix.dim()) {
            fail(ErrorCode::InvalidArgument, "observable '" + label + "' needs one eigenvalue per dimension");
        }
        for (std::size_t k = 0; k < ev.size(); ++k) {
            if (!std::isfinite(ev[k]) || (k > 0 && ev[k] > ev[k - 1])) {
                fail(ErrorCode::InvalidArgument, "eigenvalues of '" + label + "' are not finite and descending");
            }
        }
        double total = 0.0;
        for (double p : r.probabilities[i]) {
            if (!(p >= 0.0 && p <= 1.0)) {
                fail(ErrorCode::InvalidArgument, "probability outside [0, 1] for '" + label + "'");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-10) {
            fail(ErrorCode::InvalidArgument, "probabilities of '" + label + "' sum to " + std::to_string(total));
        }
        (void)outcome_list(ev, r.probabilities[i]);
    }
}

}  // namespace framegate

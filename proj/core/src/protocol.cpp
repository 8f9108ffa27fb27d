#include "framegate/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "framegate/codec.hpp"
#include "framegate/error.hpp"
#include "framegate/random.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {
namespace {

std::string class_id(int dim, ScenarioKind kind)
{
    return (kind == ScenarioKind::Abstract ? "abstract-" : "typed-") + std::to_string(dim);
}

Encoding inverse_encoding(const Encoding& phi) { return as_encoding(glparity_inverse(as_glparity(phi))); }

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)) * tolerance_scale(); }

ComplexMatrix matrix_power(const ComplexMatrix& m, int k)
{
    ComplexMatrix out = ComplexMatrix::identity(m.dim());
    for (int i = 0; i < k; ++i) {
        out = out * m;
    }
    return out;
}

/// Canonical density matrix R⁻¹ ω R⁻¹ sharing all statistics of a (pseudo-)state.
ComplexMatrix standin(const State& s)
{
    if (!s.metric()) {
        return s.rho();
    }
    const ComplexMatrix r_inv = inverse(*s.metric());
    return hermitian_part(r_inv * s.rho() * r_inv);
}

TomographyOptions sampled_options(std::uint64_t copies)
{
    TomographyOptions o;
    o.residual_tol = std::numeric_limits<double>::infinity();
    o.not_physical_tol = 10.0 / std::sqrt(static_cast<double>(copies));
    return o;
}

double sampled_relation_residual(const Mode& mode, const AgreementOptions& options, double exact_default)
{
    if (options.max_residual) {
        return *options.max_residual;
    }
    if (mode.is_sampled()) {
        return 30.0 / std::sqrt(static_cast<double>(mode.copies));
    }
    return exact_default;
}

[[noreturn]] void raise_abort(const AbortMsg& a)
{
    const auto code = error_code_from_string(a.code);
    if (code == ErrorCode::VersionMismatch || code == ErrorCode::EigenvalueMismatch
        || code == ErrorCode::ScenarioMismatch) {
        fail(*code, "peer aborted: " + a.reason);
    }
    fail(ErrorCode::PeerAbort, "peer aborted with " + a.code + ": " + a.reason);
}

template <class Body>
Body expect(const WireMessage& reply)
{
    if (const auto* a = std::get_if<AbortMsg>(&reply.body)) {
        raise_abort(*a);
    }
    const auto* body = std::get_if<Body>(&reply.body);
    if (body == nullptr) {
        fail(ErrorCode::PeerAbort, "peer replied with " + std::string(to_string(reply.kind())) + " out of order");
    }
    return *body;
}

void hello(Link& link, std::uint64_t session, const std::string& scenario)
{
    (void)expect<HelloMsg>(link.exchange({session, HelloMsg{protocol_version, "alice", scenario}}));
}

// Any local failure after the handshake is announced to Bob before it propagates.
template <class F>
auto guarded(Link& link, std::uint64_t session, F&& f) -> decltype(f())
{
    try {
        return f();
    }
    catch (const Error& e) {
        const ErrorCode c = e.code();
        if (c != ErrorCode::PeerAbort && c != ErrorCode::Timeout && c != ErrorCode::TransportError) {
            try {
                link.post({session, AbortMsg{std::string(to_string(c)), e.what()}});
            }
            catch (const Error&) {
            }
        }
        throw;
    }
}

Observable device_observable(const State& state, const ComplexMatrix& n, const std::string& label)
{
    if (!state.metric()) {
        return Observable::make(n, label);
    }
    const ComplexMatrix& r = *state.metric();
    return Observable::make(r * r * n, label, {}, r);
}

struct Readouts {
    std::vector<TypedMeasurement> typed;
    std::vector<std::vector<std::uint64_t>> counts;  ///< sampled mode only, aligned with distributions
};

/// What Alice reads off the devices for an object she describes as `desc`.
/// Sampled mode replaces each distribution by observed frequencies.
Readouts read_devices(const State& desc, const std::vector<DescribedObservable>& devices, const Mode& mode,
                      std::uint64_t stream)
{
    Readouts out;
    for (std::size_t k = 0; k < devices.size(); ++k) {
        TypedMeasurement m = device_readout(desc, devices[k].matrix);
        m.device = Observable::make(devices[k].matrix, devices[k].label);
        if (mode.is_sampled()) {
            const auto obs = device_observable(desc, devices[k].matrix, devices[k].label);
            const auto counts = sample_outcomes(desc, obs, mode.copies, derive_seed(mode.seed, stream * 64 + k));
            std::vector<std::uint64_t> c;
            for (std::size_t j = 0; j < m.distribution.size(); ++j) {
                const std::uint64_t hits = j < counts.size() ? counts[j].count : 0;
                c.push_back(hits);
                m.distribution[j].probability = static_cast<double>(hits) / static_cast<double>(mode.copies);
            }
            out.counts.push_back(std::move(c));
        }
        out.typed.push_back(std::move(m));
    }
    return out;
}

TomographyResult reconstruct(int dim, ScenarioKind kind, const Readouts& r, const Mode& mode)
{
    const TomographyOptions options = mode.is_sampled() ? sampled_options(mode.copies) : TomographyOptions{};
    if (kind == ScenarioKind::Typed) {
        return typed_tomography(dim, r.typed, options);
    }
    std::vector<Measurement> plain;
    for (const auto& m : r.typed) {
        plain.push_back({m.device, m.distribution});
    }
    return tomography(dim, plain, options);
}

ComplexMatrix plus_eigenstate(const ComplexMatrix& observable)
{
    return spectral_projectors(observable).front().projector;
}

ComplexMatrix diagonal_observable()
{
    return (pauli_x() + pauli_y() + pauli_z()) * Complex(1.0 / std::sqrt(3.0));
}

struct Round {
    std::string label;
    ComplexMatrix observable;
};

std::vector<Round> agreement_rounds(ScenarioKind kind)
{
    std::vector<Round> rounds{{"sigma_x", pauli_x()}, {"sigma_y", pauli_y()}, {"sigma_z", pauli_z()}};
    if (kind == ScenarioKind::Typed) {
        rounds.push_back({"sigma_n", diagonal_observable()});
    }
    return rounds;
}

RequestMsg eigenstate_request(const Round& round, ScenarioKind kind, const Mode& mode)
{
    RequestMsg r;
    r.system_class_id = class_id(2, kind);
    r.observables.push_back({round.label, round.observable});
    r.eigenvalues.push_back({1.0, -1.0});
    r.probabilities.push_back({1.0, 0.0});
    r.mode = mode;
    return r;
}

std::vector<double> fourvector_vec(const ComplexMatrix& h)
{
    const auto v = hermitian_to_fourvector(hermitian_part(h));
    return {v.begin(), v.end()};
}

void append_matrix(std::string& out, const ComplexMatrix& m)
{
    out += "m " + std::to_string(m.dim());
    for (const Complex& z : m.entries()) {
        out += ' ' + format_double(z.real()) + ' ' + format_double(z.imag());
    }
}

}  // namespace

// ---------------------------------------------------------------- helpers

std::string scenario_label(const std::string& family, ScenarioKind kind)
{
    return family + (kind == ScenarioKind::Abstract ? "-abstract" : "-typed");
}

std::string Transcript::to_text() const
{
    std::string out = "seed " + std::to_string(seed) + "\n";
    for (const auto& e : entries) {
        out += e.direction == Direction::AliceToBob ? "A>B " : "B>A ";
        out += e.bytes;
        out += '\n';
    }
    out += "outcome ";
    out += outcome.success ? "success" : "failure";
    out += " fidelity " + format_double(outcome.fidelity) + " residual " + format_double(outcome.residual);
    if (outcome.recovered_T) {
        out += " T ";
        out += outcome.recovered_T->kind() == 1 ? "+ " : "- ";
        append_matrix(out, outcome.recovered_T->Y());
    }
    out += '\n';
    return out;
}

std::vector<DescribedObservable> standard_devices(int dim, ScenarioKind kind)
{
    const auto basis = hermitian_basis(dim);
    std::vector<DescribedObservable> out;
    if (kind == ScenarioKind::Typed) {
        out.push_back({"identity", ComplexMatrix::identity(dim)});
    }
    static const char* const pauli_names[] = {"sigma_x", "sigma_y", "sigma_z"};
    for (std::size_t k = 1; k < basis.size(); ++k) {
        std::string label = dim == 2 ? pauli_names[k - 1] : "basis_" + std::to_string(k);
        out.push_back({std::move(label), basis[k] * Complex(std::sqrt(2.0))});
    }
    return out;
}

TypedMeasurement device_readout(const State& state, const ComplexMatrix& n)
{
    const Observable described = Observable::make(n);
    return TypedMeasurement{described, outcome_spectrum(state, described),
                            born(state, device_observable(state, n, {}))};
}

RequestMsg make_request(const State& wanted, ScenarioKind kind, const Mode& mode)
{
    RequestMsg r;
    r.system_class_id = class_id(wanted.dim(), kind);
    r.mode = mode;
    for (auto& d : standard_devices(wanted.dim(), kind)) {
        const auto readout = device_readout(wanted, d.matrix);
        std::vector<double> probs;
        for (const auto& o : readout.distribution) {
            probs.push_back(o.probability);
        }
        r.eigenvalues.push_back(readout.eigenvalues);
        r.probabilities.push_back(std::move(probs));
        r.observables.push_back(std::move(d));
    }
    validate(r);
    return r;
}

GLParityElement relative_transform(const Encoding& alice, const Encoding& bob)
{
    return glparity_compose(as_glparity(bob), glparity_inverse(as_glparity(alice)));
}

bool implementable(const GLParityElement& t) { return t.kind() == 1; }
bool implementable(const PUAElement& t) { return t.parity() == 1; }

double chi_squared_p_value(const std::vector<std::vector<double>>& expected,
                           const std::vector<std::vector<std::uint64_t>>& observed)
{
    if (expected.size() != observed.size()) {
        fail(ErrorCode::DimensionMismatch, "expected and observed lists differ in length");
    }
    double stat = 0.0;
    double dof = 0.0;
    for (std::size_t d = 0; d < expected.size(); ++d) {
        if (expected[d].size() != observed[d].size()) {
            fail(ErrorCode::DimensionMismatch, "outcome lists differ in length");
        }
        std::uint64_t n = 0;
        for (auto c : observed[d]) {
            n += c;
        }
        int cells = 0;
        for (std::size_t j = 0; j < expected[d].size(); ++j) {
            const double p = expected[d][j];
            const auto o = static_cast<double>(observed[d][j]);
            if (p <= 1e-15) {
                if (observed[d][j] > 0) {
                    return 0.0;
                }
                continue;
            }
            const double e = p * static_cast<double>(n);
            stat += (o - e) * (o - e) / e;
            ++cells;
        }
        dof += std::max(0, cells - 1);
    }
    if (dof <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

GLParityFit fit_glparity(const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& pairs, double max_residual)
{
    if (pairs.empty()) {
        fail(ErrorCode::Underdetermined, "no pairs to fit");
    }
    for (const auto& [in, out] : pairs) {
        if (in.dim() != 2 || out.dim() != 2) {
            fail(ErrorCode::DimensionMismatch, "GL-parity fit needs qubit pairs");
        }
    }
    const int m = static_cast<int>(pairs.size());
    RealMatrix inputs(m, 4);
    std::vector<std::vector<double>> outputs(4, std::vector<double>(static_cast<std::size_t>(m)));
    double scale = 1.0;
    for (int i = 0; i < m; ++i) {
        const auto x = fourvector_vec(pairs[static_cast<std::size_t>(i)].first);
        const auto y = fourvector_vec(pairs[static_cast<std::size_t>(i)].second);
        for (int k = 0; k < 4; ++k) {
            inputs(i, k) = x[static_cast<std::size_t>(k)];
            outputs[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(k)];
            scale = std::max(scale, std::abs(y[static_cast<std::size_t>(k)]));
        }
    }
    RealMatrix l(4, 4);
    double linear_residual = 0.0;
    for (int j = 0; j < 4; ++j) {
        const auto fit = least_squares(inputs, outputs[static_cast<std::size_t>(j)]);
        if (fit.rank < 4) {
            fail(ErrorCode::Underdetermined, "inputs span " + std::to_string(fit.rank) + " of 4 directions");
        }
        for (int k = 0; k < 4; ++k) {
            l(j, k) = fit.solution[static_cast<std::size_t>(k)];
        }
        linear_residual = std::max(linear_residual, fit.residual);
    }
    const double tolerance = max_residual * tolerance_scale();
    if (!(linear_residual <= tolerance * scale)) {
        fail(ErrorCode::NoConsistentRelation,
             "no linear map fits the received objects (residual " + std::to_string(linear_residual) + ")");
    }
    const int kind = det(l) >= 0.0 ? 1 : -1;

    // Complex-linear extension of the fitted map, precomposed with the
    // transpose for kind −1, so that it reads M ↦ Y M Y† in both cases.
    auto apply = [&l](const ComplexMatrix& h) {
        const auto x = fourvector_vec(h);
        const auto y = l * std::span<const double>(x);
        return fourvector_to_hermitian({y[0], y[1], y[2], y[3]});
    };
    auto extended = [&](ComplexMatrix a) {
        if (kind == -1) {
            a = a.transpose();
        }
        const ComplexMatrix re = hermitian_part(a);
        const ComplexMatrix im = (a - a.adjoint()) * Complex(0.0, -0.5);
        return apply(re) + apply(im) * Complex(0.0, 1.0);
    };
    ComplexMatrix choi(4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ComplexMatrix e(2);
            e(i, j) = 1.0;
            const ComplexMatrix img = extended(e);
            for (int k = 0; k < 2; ++k) {
                for (int q = 0; q < 2; ++q) {
                    choi(i * 2 + k, j * 2 + q) = img(k, q);
                }
            }
        }
    }
    const auto eig = herm_eig(hermitian_part(choi));
    const double top = eig.eigenvalues.front();
    double rest = 0.0;
    for (std::size_t k = 1; k < eig.eigenvalues.size(); ++k) {
        rest = std::max(rest, std::abs(eig.eigenvalues[k]));
    }
    const double rank_tol = std::max(scaled(tol::recon) * 100.0, tolerance);
    if (!(top > 0.0) || rest > rank_tol * top) {
        fail(ErrorCode::EigenvalueMismatch, "fitted map is not a conjugation (Choi spectrum "
                                                + std::to_string(top) + ", " + std::to_string(rest) + ")");
    }
    ComplexMatrix y(2);
    const double root = std::sqrt(top);
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
            y(k, i) = root * eig.eigenvectors(i * 2 + k, 0);
        }
    }
    GLParityFit out{GLParityElement::make(y, kind), 0.0};
    for (const auto& [in, target] : pairs) {
        out.residual = std::max(out.residual, max_abs_diff(act(out.element, in), target));
    }
    if (out.residual > std::max(tolerance, rank_tol) * scale) {
        fail(ErrorCode::EigenvalueMismatch, "closest conjugation leaves residual " + std::to_string(out.residual));
    }
    return out;
}

// ---------------------------------------------------------------- links

WireMessage LocalLink::exchange(const WireMessage& msg)
{
    auto reply = bob_.handle(decode(encode(msg)));
    if (!reply) {
        fail(ErrorCode::TransportError, "peer sent no reply to " + std::string(to_string(msg.kind())));
    }
    return decode(encode(*reply));
}

void LocalLink::post(const WireMessage& msg) { (void)bob_.handle(decode(encode(msg))); }

WireMessage RecordingLink::exchange(const WireMessage& msg)
{
    entries_.push_back({Direction::AliceToBob, encode(msg)});
    WireMessage reply = inner_.exchange(msg);
    entries_.push_back({Direction::BobToAlice, encode(reply)});
    return reply;
}

void RecordingLink::post(const WireMessage& msg)
{
    entries_.push_back({Direction::AliceToBob, encode(msg)});
    inner_.post(msg);
}

// ---------------------------------------------------------------- Bob

BobAgent::BobAgent(Encoding encoding, BobOptions options) : encoding_(std::move(encoding)), options_(std::move(options))
{
    if (options_.drift && options_.drift->dim() != encoding_.dim()) {
        fail(ErrorCode::DimensionMismatch, "drift unitary does not match the system dimension");
    }
}

WireMessage BobAgent::reply(MessageBody body)
{
    ++replies_;
    if (options_.abort_at_reply > 0 && replies_ == options_.abort_at_reply) {
        finished_ = true;
        return {session_id_, AbortMsg{std::string(to_string(ErrorCode::PeerAbort)), "injected abort"}};
    }
    return {session_id_, std::move(body)};
}

WireMessage BobAgent::abort(ErrorCode code, const std::string& reason)
{
    finished_ = true;
    return {session_id_, AbortMsg{std::string(to_string(code)), reason}};
}

std::optional<WireMessage> BobAgent::handle(const WireMessage& msg)
{
    if (finished_) {
        return abort(ErrorCode::InvalidArgument, "session already finished");
    }
    if (const auto* a = std::get_if<AbortMsg>(&msg.body)) {
        (void)a;
        finished_ = true;
        return std::nullopt;
    }
    if (expect_ == Expect::Hello) {
        const auto* h = std::get_if<HelloMsg>(&msg.body);
        session_id_ = msg.session_id;
        if (h == nullptr) {
            return abort(ErrorCode::InvalidArgument,
                         "expected Hello, got " + std::string(to_string(msg.kind())));
        }
        if (h->version != protocol_version) {
            return abort(ErrorCode::VersionMismatch, "peer speaks version " + std::to_string(h->version));
        }
        const std::string suffix = options_.scenario == ScenarioKind::Abstract ? "-abstract" : "-typed";
        if (!h->scenario.ends_with(suffix)) {
            return abort(ErrorCode::ScenarioMismatch, "scenario '" + h->scenario + "' does not fit this peer");
        }
        expect_ = Expect::Any;
        return reply(HelloMsg{protocol_version, "bob", h->scenario});
    }
    if (msg.session_id != session_id_) {
        return abort(ErrorCode::InvalidArgument, "message for session " + std::to_string(msg.session_id));
    }
    switch (msg.kind()) {
    case MessageKind::Correction: {
        const auto& c = std::get<CorrectionMsg>(msg.body);
        if (c.transform && c.transform->dim() != encoding_.dim()) {
            return abort(ErrorCode::DimensionMismatch, "correction dimension does not match the system");
        }
        if (options_.scenario == ScenarioKind::Abstract && c.transform
            && !is_unitary(c.transform->Y(), scaled(tol::recon) * 100.0)) {
            return abort(ErrorCode::ScenarioMismatch, "abstract scenario needs a unitary correction");
        }
        correction_ = c.placement == Placement::Pre ? c.transform : std::nullopt;
        return reply(c);
    }
    case MessageKind::Request:
        try {
            return reply(answer(std::get<RequestMsg>(msg.body)));
        }
        catch (const Error& e) {
            return abort(e.code(), e.what());
        }
    case MessageKind::Verify:
        finished_ = true;
        return std::nullopt;
    default:
        return abort(ErrorCode::InvalidArgument, std::string(to_string(msg.kind())) + " out of order");
    }
}

AnswerMsg BobAgent::answer(const RequestMsg& r)
{
    validate(r);
    const int dim = encoding_.dim();
    if (r.system_class_id != class_id(dim, options_.scenario)) {
        fail(ErrorCode::ScenarioMismatch, "request for '" + r.system_class_id + "', this peer holds '"
                                              + class_id(dim, options_.scenario) + "'");
    }
    std::vector<TypedMeasurement> data;
    for (std::size_t i = 0; i < r.observables.size(); ++i) {
        const auto& o = r.observables[i];
        if (o.matrix.dim() != dim) {
            fail(ErrorCode::DimensionMismatch, "observable '" + o.label + "' has the wrong dimension");
        }
        ComplexMatrix n = correction_ ? hermitian_part(act_dual(*correction_, o.matrix)) : o.matrix;
        data.push_back({Observable::make(std::move(n), o.label), r.eigenvalues[i],
                        outcome_list(r.eigenvalues[i], r.probabilities[i])});
    }

    std::optional<State> described;
    try {
        if (options_.scenario == ScenarioKind::Typed) {
            described = typed_tomography(dim, data).state;
        }
        else {
            std::vector<Measurement> plain;
            for (const auto& m : data) {
                plain.push_back({m.device, m.distribution});
            }
            described = tomography(dim, plain).state;
        }
    }
    catch (const Error& e) {
        if (e.code() != ErrorCode::Incomplete) {
            throw;
        }
        // A request that pins a non-degenerate outcome with certainty names a
        // pure eigenstate even without a complete device set.
        for (const auto& m : data) {
            const auto projectors = spectral_projectors(m.device.matrix);
            if (options_.scenario == ScenarioKind::Typed) {
                const auto spectrum = herm_eig(m.device.matrix).eigenvalues;
                for (std::size_t k = 0; k < spectrum.size(); ++k) {
                    if (!same_value(spectrum[k], m.eigenvalues[k])) {
                        fail(ErrorCode::EigenvalueMismatch, "requested eigenvalues of '" + m.device.label
                                                                + "' differ from the untyped device spectrum");
                    }
                }
            }
            for (const auto& o : m.distribution) {
                if (o.probability < 1.0 - 1e-9) {
                    continue;
                }
                for (const auto& p : projectors) {
                    if (same_value(p.eigenvalue, o.eigenvalue) && std::abs(p.projector.trace().real() - 1.0) < 1e-9) {
                        described = State::make(p.projector);
                    }
                }
            }
            if (described) {
                break;
            }
        }
        if (!described) {
            throw;
        }
    }

    State physical = apply_encoding(inverse_encoding(encoding_), *described);
    if (options_.drift && prepared_ > 0) {
        physical = apply_encoding(Encoding::make(matrix_power(*options_.drift, prepared_), 1), physical);
    }
    ++prepared_;
    return AnswerMsg{physical,
                     SystemDescriptor::make(physical.metric_or_identity(), ComplexMatrix::identity(dim), 1)};
}

// ---------------------------------------------------------------- game

VerifyResult alice_game(Link& link, const Encoding& alice, ScenarioKind kind, const std::optional<GLParityElement>& t,
                        const State& wanted, const Mode& mode, const GameOptions& options)
{
    const int dim = alice.dim();
    if (wanted.dim() != dim || (t && t->dim() != dim)) {
        fail(ErrorCode::ScenarioMismatch, "encodings, correction and request differ in dimension");
    }
    if (mode.is_sampled() && mode.copies == 0) {
        fail(ErrorCode::InvalidArgument, "sampled mode needs at least one copy");
    }
    if (t && options.placement == Placement::Post && !implementable(*t)) {
        fail(ErrorCode::ScenarioMismatch, "a kind -1 correction cannot be applied as physical post-processing");
    }
    const std::uint64_t sid = options.session_id;
    hello(link, sid, scenario_label("game", kind));
    return guarded(link, sid, [&] {
        if (t) {
            (void)expect<CorrectionMsg>(link.exchange({sid, CorrectionMsg{options.placement, t}}));
        }
        const RequestMsg request = make_request(wanted, kind, mode);
        const AnswerMsg answer = expect<AnswerMsg>(link.exchange({sid, request}));
        if (answer.state.dim() != dim) {
            fail(ErrorCode::ScenarioMismatch, "answer has the wrong dimension");
        }

        State physical = answer.state;
        if (t && options.placement == Placement::Post) {
            const GLParityElement a = as_glparity(alice);
            const GLParityElement fix = glparity_compose(glparity_inverse(a), glparity_compose(*t, a));
            physical = apply_encoding(as_encoding(fix), physical);
        }
        const State desc = apply_encoding(alice, physical);

        VerifyResult result;
        result.recovered_T = t;
        const double type_residual = max_abs_diff(desc.metric_or_identity(), wanted.metric_or_identity());
        const auto devices = standard_devices(dim, kind);
        const Readouts observed = read_devices(desc, devices, mode, 0);

        double residual = kind == ScenarioKind::Typed ? type_residual : 0.0;
        bool outcomes_match = true;
        std::vector<std::vector<double>> expected;
        for (std::size_t k = 0; k < devices.size(); ++k) {
            const auto& want = request.probabilities[k];
            const auto& got = observed.typed[k].distribution;
            const auto& want_ev = request.eigenvalues[k];
            const auto& got_ev = observed.typed[k].eigenvalues;
            for (std::size_t j = 0; j < want_ev.size(); ++j) {
                residual = std::max(residual, std::abs(want_ev[j] - got_ev[j]));
            }
            if (got.size() != want.size()) {
                outcomes_match = false;
                residual = std::max(residual, 1.0);
                continue;
            }
            for (std::size_t j = 0; j < want.size(); ++j) {
                // Typed outcome values move with the type, so they get the type tolerance.
                const double label = distinct_eigenvalues(want_ev)[j];
                const bool label_ok = same_value(got[j].eigenvalue, label)
                                      || (kind == ScenarioKind::Typed
                                          && std::abs(got[j].eigenvalue - label)
                                                 <= options.type_tolerance * tolerance_scale() * std::max(1.0, std::abs(label)));
                if (!label_ok) {
                    outcomes_match = false;
                }
                residual = std::max(residual, std::abs(got[j].probability - want[j]));
            }
            expected.push_back(want);
        }
        result.residual = residual;
        const bool type_ok = kind == ScenarioKind::Abstract || type_residual <= options.type_tolerance * tolerance_scale();

        if (!mode.is_sampled()) {
            result.fidelity = std::clamp(fidelity(standin(desc), standin(wanted)), 0.0, 1.0);
            result.success = type_ok && result.fidelity >= options.fidelity_threshold;
        }
        else {
            try {
                const State estimate = reconstruct(dim, kind, observed, mode).state;
                result.fidelity = std::clamp(fidelity(standin(estimate), standin(wanted)), 0.0, 1.0);
            }
            catch (const Error&) {
                result.fidelity = 0.0;
            }
            const double p = outcomes_match ? chi_squared_p_value(expected, observed.counts) : 0.0;
            result.success = type_ok && outcomes_match && p >= options.significance;
        }
        link.post({sid, VerifyMsg{result.success, result.fidelity, result.residual, t}});
        return result;
    });
}

GameResult run_game(const Encoding& alice, const Encoding& bob, const std::optional<GLParityElement>& t,
                    const State& wanted, const Mode& mode, const GameOptions& options)
{
    if (alice.dim() != bob.dim()) {
        fail(ErrorCode::ScenarioMismatch, "encodings differ in dimension");
    }
    const bool all_unitary = alice.is_unitary() && bob.is_unitary() && !wanted.metric()
                             && (!t || is_unitary(t->Y(), scaled(tol::recon) * 100.0));
    const ScenarioKind kind = options.kind.value_or(all_unitary ? ScenarioKind::Abstract : ScenarioKind::Typed);
    if (kind == ScenarioKind::Abstract && !all_unitary) {
        fail(ErrorCode::ScenarioMismatch, "abstract scenario needs unitary encodings, correction and an untyped request");
    }
    BobAgent agent(bob, BobOptions{kind, std::nullopt, 0});
    LocalLink local(agent);
    RecordingLink recorder(local);
    GameResult out;
    out.result = alice_game(recorder, alice, kind, t, wanted, mode, options);
    out.transcript.seed = mode.seed;
    out.transcript.entries = recorder.entries();
    out.transcript.outcome = out.result;
    return out;
}

// ---------------------------------------------------------------- agreement

AbstractAgreement alice_agree_abstract(Link& link, const Encoding& alice, const Mode& mode,
                                       const AgreementOptions& options)
{
    if (alice.dim() != 2 || !alice.is_unitary()) {
        fail(ErrorCode::ScenarioMismatch, "abstract agreement needs a unitary qubit encoding");
    }
    const std::uint64_t sid = options.session_id;
    hello(link, sid, scenario_label("agree", ScenarioKind::Abstract));
    return guarded(link, sid, [&] {
        const auto devices = standard_devices(2, ScenarioKind::Abstract);
        std::vector<std::pair<State, State>> pairs;
        std::uint64_t stream = 0;
        for (const auto& round : agreement_rounds(ScenarioKind::Abstract)) {
            const auto answer = expect<AnswerMsg>(
                link.exchange({sid, eigenstate_request(round, ScenarioKind::Abstract, mode)}));
            const State desc = apply_encoding(alice, answer.state);
            const auto readouts = read_devices(desc, devices, mode, ++stream);
            pairs.emplace_back(State::make(plus_eigenstate(round.observable)),
                               reconstruct(2, ScenarioKind::Abstract, readouts, mode).state);
        }
        RelationOptions ro;
        ro.max_residual = sampled_relation_residual(mode, options, tol::relation);
        const RelationFit fit = reconstruct_relation(pairs, ro);
        const PUAElement t = pua_inverse(as_pua(fit.encoding));
        const GLParityElement tg = as_glparity(t);
        (void)expect<CorrectionMsg>(link.exchange({sid, CorrectionMsg{Placement::Pre, tg}}));
        link.post({sid, VerifyMsg{true, 1.0, fit.residual, tg}});
        return AbstractAgreement{t, fit.residual, {}};
    });
}

AbstractAgreement agree_abstract_qubit(const Encoding& alice, const Encoding& bob, const Mode& mode,
                                       const BobOptions& bob_options, const AgreementOptions& options)
{
    BobOptions bo = bob_options;
    bo.scenario = ScenarioKind::Abstract;
    BobAgent agent(bob, bo);
    LocalLink local(agent);
    RecordingLink recorder(local);
    AbstractAgreement out = alice_agree_abstract(recorder, alice, mode, options);
    out.transcript.seed = mode.seed;
    out.transcript.entries = recorder.entries();
    out.transcript.outcome = VerifyResult{true, 1.0, as_glparity(out.recovered), out.residual};
    return out;
}

TypedAgreement alice_agree_typed(Link& link, const Encoding& alice, const Mode& mode, const AgreementOptions& options)
{
    if (alice.dim() != 2) {
        fail(ErrorCode::ScenarioMismatch, "typed agreement needs a qubit encoding");
    }
    const std::uint64_t sid = options.session_id;
    hello(link, sid, scenario_label("agree", ScenarioKind::Typed));
    return guarded(link, sid, [&] {
        const auto devices = standard_devices(2, ScenarioKind::Typed);
        std::vector<std::pair<ComplexMatrix, ComplexMatrix>> pairs;
        std::uint64_t stream = 0;
        for (const auto& round : agreement_rounds(ScenarioKind::Typed)) {
            const auto answer = expect<AnswerMsg>(
                link.exchange({sid, eigenstate_request(round, ScenarioKind::Typed, mode)}));
            const State desc = apply_encoding(alice, answer.state);
            const auto readouts = read_devices(desc, devices, mode, ++stream);
            const State received = reconstruct(2, ScenarioKind::Typed, readouts, mode).state;
            const ComplexMatrix r = received.metric_or_identity();
            pairs.emplace_back(plus_eigenstate(round.observable), received.rho());
            pairs.emplace_back(ComplexMatrix::identity(2), hermitian_part(r * r));
        }
        const GLParityFit fit = fit_glparity(pairs, sampled_relation_residual(mode, options, tol::relation));
        const GLParityElement t = glparity_inverse(fit.element);
        const ScaledLorentz split = decompose_scaled_lorentz(t);
        (void)expect<CorrectionMsg>(link.exchange({sid, CorrectionMsg{Placement::Pre, t}}));
        link.post({sid, VerifyMsg{true, 1.0, fit.residual, t}});
        return TypedAgreement{t, split.lambda, split.lorentz, fit.residual, {}};
    });
}

TypedAgreement agree_typed_qubit(const Encoding& alice, const Encoding& bob, const Mode& mode,
                                 const BobOptions& bob_options, const AgreementOptions& options)
{
    BobOptions bo = bob_options;
    bo.scenario = ScenarioKind::Typed;
    BobAgent agent(bob, bo);
    LocalLink local(agent);
    RecordingLink recorder(local);
    TypedAgreement out = alice_agree_typed(recorder, alice, mode, options);
    out.transcript.seed = mode.seed;
    out.transcript.entries = recorder.entries();
    out.transcript.outcome = VerifyResult{true, 1.0, out.recovered, out.residual};
    return out;
}

}  // namespace framegate

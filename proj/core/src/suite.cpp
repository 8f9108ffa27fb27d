#include "framegate/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "framegate/codec.hpp"
#include "framegate/error.hpp"
#include "framegate/groups.hpp"
#include "framegate/protocol.hpp"
#include "framegate/random.hpp"
#include "framegate/relsg.hpp"
#include "framegate/session.hpp"
#include "framegate/tolerance.hpp"
#include "framegate/umgraph.hpp"

namespace framegate {
namespace {

struct Worst {
    double value = 0.0;
    void take(double v) { value = std::max(value, std::isnan(v) ? std::numeric_limits<double>::infinity() : v); }
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::array<double, 3> random_unit(Rng& rng)
{
    std::array<double, 3> n{rng.normal(), rng.normal(), rng.normal()};
    const double norm = std::hypot(n[0], n[1], n[2]);
    for (double& x : n) {
        x /= norm;
    }
    return n;
}

/// U₁ · diag(e^{r₁}, e^{r₂}) · U₂ with r uniform in [−spread, spread]:
/// invertible with bounded condition number.
ComplexMatrix bounded_gl(Rng& rng, double spread)
{
    const ComplexMatrix d = ComplexMatrix::diagonal({std::exp(rng.uniform(-spread, spread)),
                                                     std::exp(rng.uniform(-spread, spread))});
    return haar_unitary(2, rng) * d * haar_unitary(2, rng);
}

ComplexMatrix random_hermitian(int dim, Rng& rng)
{
    return hermitian_part(ginibre(dim, rng));
}

double relative(double err, double scale) { return err / std::max(1.0, scale); }

// ---------------------------------------------------------------- 1

CriterionResult wigner(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 1));
    Worst defect;
    int non_unitary = 0;
    int parity_errors = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const int d = 2 + i % 3;
        const int parity = rng.index(2) == 0 ? 1 : -1;
        const Encoding planted = Encoding::make(haar_unitary(d, rng), parity);
        std::vector<std::pair<State, State>> pairs;
        for (int k = 0; k < d * d + 1; ++k) {
            const State in = State::make(random_density(d, rng, 1));
            pairs.emplace_back(in, apply_encoding(planted, in));
        }
        const RelationFit fit = reconstruct_relation(pairs);
        if (!fit.encoding.is_unitary()) {
            ++non_unitary;
        }
        if (fit.encoding.parity() != parity) {
            ++parity_errors;
        }
        defect.take(projective_defect(fit.encoding.X(), planted.X()));
    }
    const double bound = 1e-9;
    CriterionResult r;
    r.measured = defect.value;
    r.threshold = bound;
    r.pass = non_unitary == 0 && parity_errors == 0 && defect.value < bound;
    r.detail = std::to_string(trials) + " relations in dims 2..4, " + std::to_string(non_unitary) + " non-unitary, "
               + std::to_string(parity_errors) + " parity errors, max projective defect " + fmt(defect.value);
    return r;
}

// ---------------------------------------------------------------- 2

CriterionResult qubit_agreement(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 2));
    Worst defect;
    int failures = 0;
    int antiunitary = 0;
    const int plants = 1000;
    for (int i = 0; i < plants; ++i) {
        const int parity = i % 2 == 0 ? 1 : -1;
        antiunitary += parity == -1;
        const Encoding alice = Encoding::make(haar_unitary(2, rng), 1);
        const PUAElement planted = PUAElement::make(haar_unitary(2, rng), parity);
        const Encoding bob = as_encoding(glparity_compose(as_glparity(planted), as_glparity(alice)));
        const auto agreed = agree_abstract_qubit(alice, bob, Mode::exact());
        defect.take(projective_defect(agreed.recovered.U(), planted.U()));
        if (agreed.recovered.parity() != parity) {
            ++failures;
        }
    }
    const double bound = 1e-9;

    int over = 0;
    Worst bloch;
    const std::array<double, 3> axis{0.0, 0.0, 1.0};
    const PUAElement rotation = PUAElement::make(su2_rotation(axis, std::numbers::pi / 3.0), 1);
    for (int run = 0; run < o.sampled_runs; ++run) {
        Rng run_rng(derive_seed(o.seed, 1000 + static_cast<std::uint64_t>(run)));
        const Encoding alice = Encoding::make(haar_unitary(2, run_rng), 1);
        const Encoding bob = as_encoding(glparity_compose(as_glparity(rotation), as_glparity(alice)));
        double err = std::numeric_limits<double>::infinity();
        try {
            const auto agreed = agree_abstract_qubit(
                alice, bob, Mode::sampled(o.sampled_copies, derive_seed(o.seed, 2000 + static_cast<std::uint64_t>(run))));
            err = operator_norm(bloch_map(agreed.recovered) - bloch_map(rotation));
        }
        catch (const Error&) {
        }
        bloch.take(err);
        if (!(err < o.sampled_bloch_bound)) {
            ++over;
        }
    }
    const double within = o.sampled_runs > 0 ? 1.0 - static_cast<double>(over) / o.sampled_runs : 1.0;

    CriterionResult r;
    r.measured = defect.value;
    r.threshold = bound;
    r.pass = failures == 0 && defect.value < bound && antiunitary >= 100 && within >= o.sampled_pass_fraction;
    r.detail = std::to_string(plants) + " exact plants (" + std::to_string(antiunitary) + " antiunitary), "
               + std::to_string(failures) + " parity errors, max defect " + fmt(defect.value) + "; sampled n="
               + std::to_string(o.sampled_copies) + ": " + fmt(100.0 * within) + "% of "
               + std::to_string(o.sampled_runs) + " runs under " + fmt(o.sampled_bloch_bound)
               + " (worst " + fmt(bloch.value) + ")";
    return r;
}

// ---------------------------------------------------------------- 3

CriterionResult spin_one_lift(const SuiteOptions&)
{
    const UMGraph g = standard_graph();
    const Encoding lifted = lift_encoding(g, {"S", "S'"}, Encoding::identity(2));
    const State up = State::make(ComplexMatrix::diagonal({1.0, 0.0, 0.0}));
    const State described = apply_encoding(lifted, up);
    const double err = max_abs_diff(described.rho(), ComplexMatrix::diagonal({1.0, 0.0, 0.0}));
    const auto* edge = g.find_edge("S", "S'");
    const int rank = edge != nullptr ? edge->projector_rank() : 0;
    const double bound = 1e-12;
    CriterionResult r;
    r.measured = err;
    r.threshold = bound;
    r.pass = err < bound && rank == 9 && edge->completeness() == Completeness::Complete;
    r.detail = "lifted z-up state deviates from diag(1,0,0) by " + fmt(err) + "; five-direction projector rank "
               + std::to_string(rank) + " of 9";
    return r;
}

// ---------------------------------------------------------------- 4

CriterionResult induced_representation(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 4));
    const UMGraph g = standard_graph();
    const std::vector<std::string> edge_path{"S", "S'"};
    Worst defect;
    int parity_errors = 0;
    const int pairs = 500;
    for (int i = 0; i < pairs; ++i) {
        const PUAElement w = PUAElement::make(haar_unitary(2, rng), rng.index(2) == 0 ? 1 : -1);
        const PUAElement v = PUAElement::make(haar_unitary(2, rng), rng.index(2) == 0 ? 1 : -1);
        const PUAElement gw = induced_rep(g, edge_path, w);
        const PUAElement gv = induced_rep(g, edge_path, v);
        const PUAElement gwv = induced_rep(g, edge_path, pua_compose(w, v));
        const PUAElement product = pua_compose(gw, gv);
        defect.take(projective_defect(gwv.U(), product.U()));
        parity_errors += gwv.parity() != product.parity();
    }

    const auto* photon = g.find_edge("S'", "S''");
    int stabilizer_errors = 0;
    for (int i = 0; i < 20; ++i) {
        const double angle = rng.uniform(0.2, 2.9);
        const auto rotated = [&](const std::array<double, 3>& axis) {
            return induced_rep(g, edge_path, PUAElement::make(su2_rotation(axis, angle), 1));
        };
        stabilizer_errors += !stabilizer_check(*photon, rotated({0.0, 0.0, 1.0}));
        stabilizer_errors += stabilizer_check(*photon, rotated({1.0, 0.0, 0.0}));
        stabilizer_errors += stabilizer_check(*photon, rotated({0.0, 1.0, 0.0}));
    }
    const double bound = 1e-9;
    CriterionResult r;
    r.measured = defect.value;
    r.threshold = bound;
    r.pass = defect.value < bound && parity_errors == 0 && stabilizer_errors == 0;
    r.detail = std::to_string(pairs) + " (W,V) pairs on the spin 1/2 -> 1 edge, max defect " + fmt(defect.value)
               + ", " + std::to_string(parity_errors) + " parity errors; photon stabilizer misclassifications: "
               + std::to_string(stabilizer_errors) + " of 60";
    return r;
}

// ---------------------------------------------------------------- 5

CriterionResult order_preservation(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 5));
    const std::array<Spin, 4> spins{Spin{1}, Spin{2}, Spin{3}, Spin{4}};
    const double boundary = 1e-10;
    int disagreements = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const double alpha = rng.uniform(-2.0, 2.0);
        const std::array<double, 3> a{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        int psd_count = 0;
        for (Spin s : spins) {
            const auto m = extend_observable(s, alpha, a);
            const double min_eig = herm_eig(m.matrix).eigenvalues.back();
            psd_count += min_eig >= -boundary;
        }
        disagreements += psd_count != 0 && psd_count != 4;
    }
    Worst zero;
    for (Spin s : spins) {
        zero.take(max_abs(extend_observable(s, 0.0, {0.0, 0.0, 0.0}).matrix));
    }
    CriterionResult r;
    r.measured = static_cast<double>(disagreements);
    r.threshold = 0.0;
    r.pass = disagreements == 0 && zero.value == 0.0;
    r.detail = std::to_string(disagreements) + " of " + std::to_string(trials)
               + " (alpha, a) with spin-dependent PSD status; zero input maps to max entry " + fmt(zero.value);
    return r;
}

// ---------------------------------------------------------------- 6

CriterionResult glparity_group(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 6));
    Worst defect;
    const int pairs = 200;
    for (int i = 0; i < pairs; ++i) {
        const ComplexMatrix a = bounded_gl(rng, 1.0);
        const ComplexMatrix b = bounded_gl(rng, 1.0);
        const ComplexMatrix m = random_hermitian(2, rng);
        for (int ka : {1, -1}) {
            for (int kb : {1, -1}) {
                const auto ga = GLParityElement::make(a, ka);
                const auto gb = GLParityElement::make(b, kb);
                const auto composed = glparity_compose(ga, gb);
                // Path one: the multiplication table. Path two: successive action.
                const ComplexMatrix table_y = a * (ka == -1 ? b.conj() : b);
                const auto via_table = GLParityElement::make(table_y, ka * kb);
                const double scale = max_abs(act(composed, m));
                defect.take(relative(max_abs_diff(act(composed, m), act(ga, act(gb, m))), scale));
                defect.take(relative(max_abs_diff(act(via_table, m), act(ga, act(gb, m))),
                                     scale));
                defect.take(composed.kind() == ka * kb ? 0.0 : 1.0);
            }
        }
        const auto split = split_scaling(a);
        const double lambda = std::pow(std::abs(det(a)), 2.0 / 2.0);
        defect.take(std::abs(split.lambda - lambda) / lambda);
        const ComplexMatrix direct = a * m * a.adjoint();
        const ComplexMatrix scaled_form = split.lambda * (split.Z * m * split.Z.adjoint());
        defect.take(relative(max_abs_diff(direct, scaled_form), max_abs(direct)));
        defect.take(std::abs(det(split.Z) - Complex(1.0)));
    }
    const double bound = 1e-10;
    CriterionResult r;
    r.measured = defect.value;
    r.threshold = bound;
    r.pass = defect.value < bound;
    r.detail = std::to_string(pairs) + " pairs x 4 table rows and split_scaling, max relative defect " + fmt(defect.value);
    return r;
}

// ---------------------------------------------------------------- 7

ComplexMatrix random_sl2c(Rng& rng)
{
    const ComplexMatrix x = bounded_gl(rng, 1.0);
    return x * (1.0 / std::sqrt(det(x)));
}

CriterionResult lorentz_bridge(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 7));
    Worst hom;
    Worst metric;
    Worst sign;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i) {
        const ComplexMatrix x = random_sl2c(rng);
        const ComplexMatrix y = random_sl2c(rng);
        const LorentzMatrix lx = sl2c_to_lorentz(x);
        const LorentzMatrix ly = sl2c_to_lorentz(y);
        const LorentzMatrix lxy = sl2c_to_lorentz(x * y);
        const RealMatrix product = lx.m * ly.m;
        double scale = 0.0;
        for (double v : product.entries()) {
            scale = std::max(scale, std::abs(v));
        }
        hom.take(relative(max_abs_diff(lxy.m, product), scale));
        metric.take(relative(lorentz_defect(lx.m), scale));
        metric.take(std::abs(det(lx.m) - 1.0));
        sign.take(max_abs_diff(sl2c_to_lorentz(-x).m, lx.m));
    }
    const LorentzMatrix worked = sl2c_to_lorentz(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0 / std::sqrt(2.0)}));
    const double worked_err = std::max({std::abs(worked(0, 0) - 1.25), std::abs(worked(3, 3) - 1.25),
                                        std::abs(worked(0, 3) - 0.75), std::abs(worked(3, 0) - 0.75)});
    CriterionResult r;
    r.measured = hom.value;
    r.threshold = 1e-9;
    r.pass = hom.value < 1e-9 && metric.value < 1e-10 && sign.value < 1e-10 && worked_err < 1e-12;
    r.detail = "homomorphism defect " + fmt(hom.value) + ", metric/det defect " + fmt(metric.value)
               + ", sign defect " + fmt(sign.value) + ", worked boost error " + fmt(worked_err);
    return r;
}

// ---------------------------------------------------------------- 8

CriterionResult typed_agreement(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 8));
    Worst lambda_err;
    Worst lorentz_err;
    int game_failures = 0;
    const int plants = 300;
    for (int i = 0; i < plants; ++i) {
        const Encoding alice = Encoding::make(bounded_gl(rng, 0.7), 1);
        const auto planted = GLParityElement::make(bounded_gl(rng, 0.7), rng.index(2) == 0 ? 1 : -1);
        const Encoding bob = as_encoding(glparity_compose(planted, as_glparity(alice)));
        const auto agreed = agree_typed_qubit(alice, bob, Mode::exact());
        const auto truth = decompose_scaled_lorentz(planted);
        lambda_err.take(std::abs(agreed.lambda - truth.lambda) / truth.lambda);
        lorentz_err.take(max_abs_diff(agreed.lorentz, truth.lorentz));
        const State wanted = apply_encoding(alice, State::make(random_density(2, rng)));
        const auto game = run_game(alice, bob, agreed.recovered, wanted);
        game_failures += !game.result.success;
    }
    CriterionResult r;
    r.measured = lorentz_err.value;
    r.threshold = 1e-8;
    r.pass = lambda_err.value < 1e-9 && lorentz_err.value < 1e-8 && game_failures == 0;
    r.detail = std::to_string(plants) + " typed plants, lambda rel. error " + fmt(lambda_err.value)
               + ", Lorentz max-entry error " + fmt(lorentz_err.value) + ", " + std::to_string(game_failures)
               + " follow-up games failed";
    return r;
}

// ---------------------------------------------------------------- 9

CriterionResult pseudo_state(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 9));
    Worst norm;
    for (int i = 0; i < 1000; ++i) {
        const int d = 2 + i % 3;
        const Encoding x = Encoding::make(ginibre(d, rng), 1);
        const State rho = State::make(random_density(d, rng));
        const State pseudo = apply_encoding(x, rho);
        // R⁻² from XX† directly, independent of the stored metric.
        const ComplexMatrix weight = inverse(x.X() * x.X().adjoint());
        norm.take(std::abs(hs_inner(weight, pseudo.rho()).real() - rho.rho().trace().real()));
        norm.take(std::abs(rho.rho().trace().real() - 1.0));
    }
    Worst isometry;
    for (int i = 0; i < 500; ++i) {
        const double mass = rng.uniform(0.5, 2.0);
        const double rap = rng.uniform(0.0, 2.0);
        const auto dir = random_unit(rng);
        const LorentzMatrix lambda = lorentz_compose(boost({rap * dir[0], rap * dir[1], rap * dir[2]}),
                                                     spatial_rotation(rotation_matrix(random_unit(rng), rng.uniform(0.0, 3.0))));
        const double prap = rng.uniform(0.0, 1.5);
        const auto pdir = random_unit(rng);
        const Momentum p = Momentum::make({mass * std::cosh(prap), mass * std::sinh(prap) * pdir[0],
                                           mass * std::sinh(prap) * pdir[1], mass * std::sinh(prap) * pdir[2]},
                                          mass);
        const Momentum lp = Momentum::make(lambda.apply(p.p()), mass);
        const ComplexMatrix x = lorentz_to_sl2c(lambda);
        const ComplexMatrix lhs = x.adjoint() * momentum_metric_weight(lp) * x;
        const ComplexMatrix rhs = momentum_metric_weight(p);
        isometry.take(relative(max_abs_diff(lhs, rhs), max_abs(rhs)));
    }
    CriterionResult r;
    r.measured = std::max(norm.value, isometry.value);
    r.threshold = 1e-10;
    r.pass = norm.value < 1e-12 && isometry.value < 1e-10;
    r.detail = "normalisation defect " + fmt(norm.value) + " (1000 states), metric isometry defect "
               + fmt(isometry.value) + " (500 boosts)";
    return r;
}

// ---------------------------------------------------------------- 10

CriterionResult stern_gerlach(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 10));
    Worst consistency;
    Worst eigen;
    Worst invariant;
    for (int i = 0; i < 1000; ++i) {
        const double g = rng.uniform(0.1, 3.0);
        const auto gdir = random_unit(rng);
        const std::array<double, 3> g_rest{g * gdir[0], g * gdir[1], g * gdir[2]};
        const double rap = rng.uniform(0.0, 2.0);
        const auto dir = random_unit(rng);
        const LorentzMatrix lambda = lorentz_compose(boost({rap * dir[0], rap * dir[1], rap * dir[2]}),
                                                     spatial_rotation(rotation_matrix(random_unit(rng), rng.uniform(0.0, 3.0))));
        const auto b = boost_scenario(g_rest, lambda);
        consistency.take(b.consistency_defect);
        const auto& G = b.observed.G;
        const double spatial = std::hypot(G[1], G[2], G[3]);
        const double scale = std::max(1.0, std::abs(G[0]) + spatial);
        eigen.take(std::abs(b.eigenvalues[0] - (G[0] + spatial)) / scale);
        eigen.take(std::abs(b.eigenvalues[1] - (G[0] - spatial)) / scale);
        invariant.take(std::abs(b.eigenvalues[0] * b.eigenvalues[1] + g * g) / std::max(1.0, g * g));
    }
    const auto worked = boost_scenario({0.0, 0.0, 1.0}, boost({0.0, 0.0, std::log(2.0)}));
    const double worked_err = std::max(std::abs(worked.eigenvalues[0] - 2.0), std::abs(worked.eigenvalues[1] + 0.5));
    Worst rest;
    for (int i = 0; i < 100; ++i) {
        const double g = rng.uniform(0.1, 3.0);
        const auto gdir = random_unit(rng);
        const auto b = boost_scenario({g * gdir[0], g * gdir[1], g * gdir[2]},
                                      spatial_rotation(rotation_matrix(random_unit(rng), rng.uniform(0.0, 6.0))));
        rest.take(std::max(std::abs(b.eigenvalues[0] - g), std::abs(b.eigenvalues[1] + g)));
    }
    CriterionResult r;
    r.measured = consistency.value;
    r.threshold = 1e-9;
    r.pass = consistency.value < 1e-9 && eigen.value < 1e-10 && invariant.value < 1e-9 && worked_err < 1e-12
             && rest.value < 1e-12;
    r.detail = "two-path defect " + fmt(consistency.value) + ", eigenvalue defect " + fmt(eigen.value)
               + ", invariant defect " + fmt(invariant.value) + ", worked case error " + fmt(worked_err)
               + ", rest-frame rotation error " + fmt(rest.value);
    return r;
}

// ---------------------------------------------------------------- 11

/// Transcript text of a session whose Bob runs in a forked child, over TCP
/// loopback or a pipe pair.
std::string two_process_transcript(const Scenario& s, bool use_pipes)
{
    std::fflush(nullptr);
    if (use_pipes) {
        int to_bob[2];
        int to_alice[2];
        if (::pipe(to_bob) != 0 || ::pipe(to_alice) != 0) {
            fail(ErrorCode::TransportError, "pipe failed");
        }
        const pid_t pid = ::fork();
        if (pid < 0) {
            fail(ErrorCode::TransportError, "fork failed");
        }
        if (pid == 0) {
            ::close(to_bob[1]);
            ::close(to_alice[0]);
            try {
                FdTransport t(to_bob[0], to_alice[1], true);
                run_bob(t, s);
            }
            catch (...) {
                ::_exit(1);
            }
            ::_exit(0);
        }
        ::close(to_bob[0]);
        ::close(to_alice[1]);
        SessionOutcome out;
        {
            FdTransport t(to_alice[0], to_bob[1], true);
            TransportLink link(t);
            out = run_alice(link, s);
        }
        ::waitpid(pid, nullptr, 0);
        return out.transcript.to_text();
    }
    TcpListener listener("127.0.0.1:0");
    const pid_t pid = ::fork();
    if (pid < 0) {
        fail(ErrorCode::TransportError, "fork failed");
    }
    if (pid == 0) {
        try {
            FdTransport t = listener.accept();
            run_bob(t, s);
        }
        catch (...) {
            ::_exit(1);
        }
        ::_exit(0);
    }
    SessionOutcome out;
    {
        FdTransport t = FdTransport::connect("127.0.0.1:" + std::to_string(listener.port()));
        TransportLink link(t);
        out = run_alice(link, s);
    }
    ::waitpid(pid, nullptr, 0);
    return out.transcript.to_text();
}

std::string mutate(const std::string& frame_bytes, Rng& rng)
{
    static const std::string alphabet = " -+.0123456789eEinfa\"\\m\n";
    std::string s = frame_bytes;
    const int edits = 1 + rng.index(4);
    for (int e = 0; e < edits && !s.empty(); ++e) {
        const auto pos = static_cast<std::size_t>(rng.index(static_cast<int>(s.size())));
        switch (rng.index(6)) {
        case 0: s[pos] = static_cast<char>(rng.bits() & 0xff); break;
        case 1: s[pos] = alphabet[static_cast<std::size_t>(rng.index(static_cast<int>(alphabet.size())))]; break;
        case 2: s.erase(pos, 1 + static_cast<std::size_t>(rng.index(8))); break;
        case 3: s.insert(pos, 1, alphabet[static_cast<std::size_t>(rng.index(static_cast<int>(alphabet.size())))]); break;
        case 4: s.resize(pos); break;
        default: s[static_cast<std::size_t>(rng.index(4)) % s.size()] = static_cast<char>(rng.bits() & 0xff); break;
        }
    }
    return s;
}

CriterionResult wire_equivalence(const SuiteOptions& o)
{
    const std::array<Family, 4> families{Family::AgreeAbstract, Family::AgreeTyped, Family::GameAbstract,
                                         Family::GameTyped};
    int compared = 0;
    int mismatched = 0;
    std::vector<std::string> corpus;
    std::string detail;
    for (std::size_t f = 0; f < families.size(); ++f) {
        for (int sampled = 0; sampled < 2; ++sampled) {
            Scenario s;
            s.family = families[f];
            s.seed = derive_seed(o.seed, 110 + f);
            if (sampled != 0) {
                s.mode = Mode::sampled(20000, derive_seed(o.seed, 120 + f));
            }
            const SessionOutcome local = run_in_process(s);
            for (const auto& e : local.transcript.entries) {
                corpus.push_back(frame(e.bytes));
            }
            if (!o.two_process) {
                continue;
            }
            const std::string remote = two_process_transcript(s, sampled != 0 && f % 2 == 1);
            ++compared;
            if (remote != local.transcript.to_text() || local.error) {
                ++mismatched;
                detail += " mismatch in " + std::string(to_string(s.family)) + (sampled != 0 ? " (sampled);" : ";");
            }
        }
    }

    Rng rng(derive_seed(o.seed, 11));
    int crashes = 0;
    int rejected = 0;
    for (int i = 0; i < o.fuzz_frames; ++i) {
        const std::string bytes =
            mutate(corpus[static_cast<std::size_t>(rng.index(static_cast<int>(corpus.size())))], rng);
        try {
            std::size_t used = 0;
            if (auto payload = unframe(bytes, used)) {
                (void)decode(*payload);
            }
        }
        catch (const Error& e) {
            if (e.code() == ErrorCode::Malformed || e.code() == ErrorCode::VersionMismatch) {
                ++rejected;
            }
            else {
                ++crashes;
            }
        }
        catch (...) {
            ++crashes;
        }
    }
    CriterionResult r;
    r.measured = static_cast<double>(mismatched + crashes);
    r.threshold = 0.0;
    r.pass = mismatched == 0 && crashes == 0 && (compared > 0 || !o.two_process);
    r.detail = std::to_string(compared) + " two-process transcripts compared, " + std::to_string(mismatched)
               + " differ;" + detail + " " + std::to_string(o.fuzz_frames) + " mutated frames, "
               + std::to_string(rejected) + " rejected as Malformed, " + std::to_string(crashes) + " crashes";
    return r;
}

// ---------------------------------------------------------------- 12

CriterionResult conjugation_isomorphism(const SuiteOptions& o)
{
    Rng rng(derive_seed(o.seed, 12));
    const std::array<GLParityElement, 3> bijections{
        GLParityElement::make(haar_unitary(2, rng), 1),
        GLParityElement::make(haar_unitary(2, rng), -1),
        GLParityElement::make(bounded_gl(rng, 0.8), -1),
    };
    std::vector<GLParityElement> sample;
    for (int i = 0; i < 12; ++i) {
        sample.push_back(GLParityElement::make(bounded_gl(rng, 0.8), rng.index(2) == 0 ? 1 : -1));
    }
    std::vector<ComplexMatrix> probes;
    for (int i = 0; i < 3; ++i) {
        probes.push_back(random_hermitian(2, rng));
    }
    Worst defect;
    for (const auto& f : bijections) {
        const auto f_inv = glparity_inverse(f);
        auto conj = [&](const GLParityElement& g) { return glparity_compose(f, glparity_compose(g, f_inv)); };
        for (const auto& a : sample) {
            for (const auto& b : sample) {
                const auto image_of_product = conj(glparity_compose(a, b));
                const auto product_of_images = glparity_compose(conj(a), conj(b));
                if (image_of_product.kind() != product_of_images.kind()) {
                    defect.take(1.0);
                }
                for (const auto& m : probes) {
                    const ComplexMatrix x = act(image_of_product, m);
                    defect.take(relative(max_abs_diff(x, act(product_of_images, m)), max_abs(x)));
                }
            }
        }
    }
    CriterionResult r;
    r.measured = defect.value;
    r.threshold = 1e-10;
    r.pass = defect.value < 1e-10;
    r.detail = "3 bijections x 144 products, max table defect " + fmt(defect.value);
    return r;
}

using CriterionFn = CriterionResult (*)(const SuiteOptions&);

struct Entry {
    const char* name;
    CriterionFn fn;
};

constexpr std::array<Entry, criterion_count> criteria{{
    {"wigner-achievability", wigner},
    {"qubit-agreement", qubit_agreement},
    {"spin-one-lift", spin_one_lift},
    {"induced-representation", induced_representation},
    {"order-preservation", order_preservation},
    {"glparity-group", glparity_group},
    {"lorentz-bridge", lorentz_bridge},
    {"typed-agreement", typed_agreement},
    {"pseudo-state-normalisation", pseudo_state},
    {"stern-gerlach", stern_gerlach},
    {"wire-equivalence", wire_equivalence},
    {"conjugation-isomorphism", conjugation_isomorphism},
}};

}  // namespace

std::string criterion_name(int id)
{
    if (id < 1 || id > criterion_count) {
        fail(ErrorCode::InvalidArgument, "criterion id " + std::to_string(id) + " outside 1..12");
    }
    return criteria[static_cast<std::size_t>(id - 1)].name;
}

CriterionResult run_criterion(int id, const SuiteOptions& options)
{
    const std::string name = criterion_name(id);
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = criteria[static_cast<std::size_t>(id - 1)].fn(options);
    }
    catch (const Error& e) {
        r.pass = false;
        r.measured = std::numeric_limits<double>::infinity();
        r.detail = std::string("raised ") + e.what();
    }
    r.id = id;
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool SuiteReport::all_pass() const
{
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

SuiteReport run_suite(const SuiteOptions& options)
{
    SuiteReport report;
    for (int id = 1; id <= criterion_count; ++id) {
        report.results.push_back(run_criterion(id, options));
    }
    return report;
}

}  // namespace framegate

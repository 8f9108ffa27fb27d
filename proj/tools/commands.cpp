#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "framegate/codec.hpp"
#include "framegate/error.hpp"
#include "framegate/random.hpp"
#include "framegate/relsg.hpp"
#include "framegate/session.hpp"
#include "framegate/suite.hpp"
#include "framegate/tolerance.hpp"
#include "framegate/transport.hpp"
#include "framegate/umgraph.hpp"

namespace framegate::cli {
namespace {

constexpr std::string_view scenario_names[] = {"abstract-qubit", "typed-qubit", "graph-lift", "lorentz-bridge",
                                               "stern-gerlach"};

[[noreturn]] void config_fail(const std::string& msg) { fail(ErrorCode::ConfigError, msg); }

/// The [run] scenario, checked against what the subcommand can run.
std::string scenario_for(const Settings& s, std::initializer_list<std::string_view> allowed)
{
    const auto name = s.config.text("run", "scenario");
    if (!name) {
        return std::string(*allowed.begin());
    }
    if (std::find(std::begin(scenario_names), std::end(scenario_names), *name) == std::end(scenario_names)) {
        config_fail("unknown scenario '" + *name + "'");
    }
    if (std::find(allowed.begin(), allowed.end(), *name) == allowed.end()) {
        config_fail("scenario '" + *name + "' does not fit this subcommand");
    }
    return *name;
}

std::string mode_text(const Mode& m)
{
    return m.is_sampled() ? "sampled:" + std::to_string(m.copies) : "exact";
}

int parity_value(const Config& c, const std::string& section, int fallback)
{
    const auto v = c.text(section, "parity");
    if (!v) {
        return fallback;
    }
    if (*v == "1" || *v == "+1" || *v == "+") {
        return +1;
    }
    if (*v == "-1" || *v == "-") {
        return -1;
    }
    config_fail(section + ".parity must be +1 or -1");
}

Placement placement_value(const Config& c, const std::string& section)
{
    const auto v = c.text(section, "placement").value_or("pre");
    if (v == "pre") {
        return Placement::Pre;
    }
    if (v == "post") {
        return Placement::Post;
    }
    config_fail(section + ".placement must be pre or post");
}

std::array<double, 3> vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

std::array<double, 3> unit(std::array<double, 3> v, const std::string& what)
{
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n == 0.0) {
        config_fail(what + " must be a nonzero vector");
    }
    for (double& x : v) {
        x /= n;
    }
    return v;
}

std::array<double, 3> random_unit(Rng& rng)
{
    std::array<double, 3> v{rng.normal(), rng.normal(), rng.normal()};
    return unit(v, "axis");
}

GameOptions game_options(const Settings& s)
{
    GameOptions o;
    o.fidelity_threshold = s.config.number("tolerance", "fidelity_threshold", o.fidelity_threshold);
    o.significance = s.config.number("tolerance", "significance", o.significance);
    o.type_tolerance = s.config.number("tolerance", "type_tolerance", o.type_tolerance);
    return o;
}

Report lines_of(const std::string& text)
{
    Report out = Report::array();
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

Report outcome_json(const SessionOutcome& o)
{
    Report r = Report::object();
    r["ok"] = o.ok();
    r["success"] = o.transcript.outcome.success;
    r["fidelity"] = rounded(o.transcript.outcome.fidelity);
    r["residual"] = rounded(o.transcript.outcome.residual);
    if (o.transcript.outcome.recovered_T) {
        r["recovered"] = to_json(*o.transcript.outcome.recovered_T);
    }
    r["error"] = o.error ? Report(std::string(to_string(*o.error))) : Report(nullptr);
    r["messages"] = o.transcript.entries.size();
    return r;
}

std::vector<std::string> shortest_path(const UMGraph& g, const std::string& from, const std::string& to)
{
    std::map<std::string, std::string> parent{{from, from}};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        const std::string at = queue.front();
        queue.pop_front();
        if (at == to) {
            break;
        }
        for (const auto& e : g.edges()) {
            if (e.source().id == at && !parent.contains(e.target().id)) {
                parent[e.target().id] = at;
                queue.push_back(e.target().id);
            }
        }
    }
    if (!parent.contains(to)) {
        return {};
    }
    std::vector<std::string> path{to};
    while (path.back() != from) {
        path.push_back(parent[path.back()]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (const auto& p : parts) {
        out += (out.empty() ? "" : sep) + p;
    }
    return out;
}

/// Scenario for the wire subcommands, from [session].
Scenario session_scenario(const Settings& s)
{
    Scenario sc;
    const auto family = s.config.text("session", "family").value_or("agree-abstract");
    const auto f = family_from_string(family);
    if (!f) {
        config_fail("unknown session family '" + family + "'");
    }
    sc.family = *f;
    sc.seed = s.seed;
    sc.mode = s.mode;
    sc.drift = s.config.flag("session", "drift", false);
    sc.abort_after = static_cast<int>(s.config.integer("session", "abort_after", 0));
    sc.placement = placement_value(s.config, "session");
    sc.apply_correction = s.config.flag("session", "correction", true);
    return sc;
}

void reject_wire_flags(const Settings& s, const std::string& command)
{
    if (s.listen || s.connect) {
        config_fail(command + " does not take --listen or --connect");
    }
}

/// Random symmetry of a root: spin rotations on massive spins, Haar unitaries
/// otherwise. With a photon target, rotations about its axis, since other
/// rotations fall outside the stabilizer.
PUAElement sample_root_element(const SystemClass& root, const SystemClass& target, Rng& rng)
{
    if (const auto* spin = std::get_if<MassiveSpin>(&root.kind)) {
        if (const auto* photon = std::get_if<PhotonPolarization>(&target.kind)) {
            const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
            return PUAElement::make(spin_rotation(spin->spin, su2_rotation(photon->axis, angle)), 1);
        }
        return PUAElement::make(spin_rotation(spin->spin, haar_unitary(2, rng)), 1);
    }
    return PUAElement::make(haar_unitary(root.dim, rng), 1);
}

std::string sampler_name(const SystemClass& root, const SystemClass& target)
{
    if (!std::holds_alternative<MassiveSpin>(root.kind)) {
        return "haar";
    }
    return std::holds_alternative<PhotonPolarization>(target.kind) ? "axis-rotation" : "spin-rotation";
}

struct Planted {
    GLParityElement element;
    std::string label;
};

Planted planted_relation(const Settings& s, bool typed, Rng& rng)
{
    const Config& c = s.config;
    const std::string kind = c.text("agree", "planted").value_or("random");
    if (kind == "random") {
        const int parity = parity_value(c, "agree", rng.index(2) == 0 ? 1 : -1);
        if (typed) {
            return {GLParityElement::make(ginibre(2, rng) * Complex(std::sqrt(0.5)), parity), kind};
        }
        return {as_glparity(PUAElement::make(haar_unitary(2, rng), parity)), kind};
    }
    const int parity = parity_value(c, "agree", +1);
    if (kind == "identity") {
        return {GLParityElement::make(ComplexMatrix::identity(2), parity), kind};
    }
    if (kind == "rotation") {
        const auto axis = unit(vec3(c.numbers("agree", "axis", 3).value_or(std::vector<double>{0, 0, 1})), "agree.axis");
        const double angle = c.number("agree", "angle", 0.7);
        return {GLParityElement::make(su2_rotation(axis, angle), parity), kind};
    }
    if (!typed) {
        config_fail("planted = " + kind + " needs scenario typed-qubit");
    }
    if (kind == "boost") {
        const auto r = vec3(c.numbers("agree", "rapidity", 3).value_or(std::vector<double>{0, 0, std::log(2.0)}));
        const double eta = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        ComplexMatrix y = ComplexMatrix::identity(2) * Complex(std::cosh(eta / 2));
        if (eta > 0.0) {
            const double sh = std::sinh(eta / 2) / eta;
            y += (pauli_x() * Complex(r[0] * sh)) + (pauli_y() * Complex(r[1] * sh)) + (pauli_z() * Complex(r[2] * sh));
        }
        return {GLParityElement::make(y, parity), kind};
    }
    if (kind == "scale") {
        const double k = c.number("agree", "scale", 2.0);
        if (!(k > 0.0)) {
            config_fail("agree.scale must be positive");
        }
        return {GLParityElement::make(ComplexMatrix::identity(2) * Complex(k), parity), kind};
    }
    config_fail("agree.planted must be random, identity, rotation, boost or scale");
}

}  // namespace

Settings resolve(const CommonFlags& flags)
{
    Settings s;
    if (!flags.config_path.empty()) {
        s.config = Config::load(flags.config_path);
    }
    s.seed = flags.seed.value_or(s.config.integer("run", "seed", 1));
    s.mode = parse_mode(flags.mode.value_or(s.config.text("run", "mode").value_or("exact")), s.seed);
    s.out = flags.out.value_or(s.config.text("run", "output").value_or(""));
    s.json = flags.json || s.config.flag("run", "json", false);
    s.listen = flags.listen;
    s.connect = flags.connect;
    if (flags.timeout_seconds) {
        if (!(*flags.timeout_seconds > 0.0)) {
            config_fail("--timeout must be positive");
        }
        s.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(*flags.timeout_seconds * 1000.0)));
    }
    if (s.config.has("tolerance", "scale")) {
        const double scale = s.config.number("tolerance", "scale", 1.0);
        if (!(scale > 0.0)) {
            config_fail("tolerance.scale must be positive");
        }
        set_tolerance_scale(scale);
    }
    return s;
}

CommandResult cmd_agree(const Settings& s)
{
    reject_wire_flags(s, "agree");
    const std::string scenario = scenario_for(s, {"abstract-qubit", "typed-qubit"});
    const bool typed = scenario == "typed-qubit";
    Rng rng(derive_seed(s.seed, 1));
    const Encoding alice = typed ? Encoding::make(ginibre(2, rng) * Complex(std::sqrt(0.5)), 1)
                                 : Encoding::make(haar_unitary(2, rng), 1);
    const Planted planted = planted_relation(s, typed, rng);
    const Encoding bob = as_encoding(glparity_compose(planted.element, as_glparity(alice)));
    BobOptions bob_options{typed ? ScenarioKind::Typed : ScenarioKind::Abstract, std::nullopt, 0};
    if (s.config.flag("agree", "drift", false)) {
        bob_options.drift = su2_rotation(random_unit(rng), 0.4);
    }
    const State wanted = typed ? apply_encoding(alice, State::make(random_density(2, rng)))
                               : State::make(random_density(2, rng));

    CommandResult out{make_report("agree"), exit_ok};
    Report& r = out.report;
    r["scenario"] = scenario;
    r["seed"] = s.seed;
    r["mode"] = mode_text(s.mode);
    r["planted"] = planted.label;
    r["planted_element"] = to_json(planted.element);
    const ScaledLorentz planted_split = decompose_scaled_lorentz(planted.element);

    GLParityElement recovered = GLParityElement::identity(2);
    try {
        if (typed) {
            const TypedAgreement a = agree_typed_qubit(alice, bob, s.mode, bob_options);
            recovered = a.recovered;
            r["residual"] = rounded(a.residual);
            r["messages"] = a.transcript.entries.size();
        }
        else {
            const AbstractAgreement a = agree_abstract_qubit(alice, bob, s.mode, bob_options);
            recovered = as_glparity(a.recovered);
            r["residual"] = rounded(a.residual);
            r["messages"] = a.transcript.entries.size();
        }
    }
    catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) {
            throw;
        }
        r["status"] = "failed";
        r["error"] = std::string(to_string(e.code()));
        r["detail"] = e.detail();
        out.exit_code = exit_protocol;
        return out;
    }

    const ScaledLorentz split = decompose_scaled_lorentz(recovered);
    Report rec = Report::object();
    if (typed) {
        rec["kind"] = recovered.kind();
        rec["Y"] = to_json(recovered.Y());
    }
    else {
        const PUAElement pua = as_pua(recovered);
        rec["parity"] = pua.parity();
        rec["U"] = to_json(pua.U());
    }
    rec["lambda"] = rounded(split.lambda);
    rec["lorentz"] = to_json(split.lorentz);
    r["recovered"] = std::move(rec);

    Report err = Report::object();
    err["kind_matches"] = recovered.kind() == planted.element.kind();
    err["lambda_relative"] = rounded(std::abs(split.lambda - planted_split.lambda) / planted_split.lambda);
    err["lorentz_max_entry"] = rounded(max_abs_diff(split.lorentz, planted_split.lorentz));
    if (!typed) {
        err["projective_defect"] = rounded(projective_defect(recovered.Y(), planted.element.Y()));
    }
    r["planted_error"] = std::move(err);

    GameOptions options = game_options(s);
    options.kind = typed ? ScenarioKind::Typed : ScenarioKind::Abstract;
    if (s.mode.is_sampled() && !s.config.has("tolerance", "type_tolerance")) {
        // The recovered relation is only as good as the agreement fit.
        options.type_tolerance = 30.0 / std::sqrt(static_cast<double>(s.mode.copies));
    }
    try {
        const GameResult game = run_game(alice, bob, recovered, wanted, s.mode, options);
        Report g = Report::object();
        g["success"] = game.result.success;
        g["fidelity"] = rounded(game.result.fidelity);
        g["residual"] = rounded(game.result.residual);
        r["game"] = std::move(g);
        r["status"] = game.result.success ? "ok" : "game-failed";
        out.exit_code = game.result.success ? exit_ok : exit_protocol;
    }
    catch (const Error& e) {
        r["status"] = "game-failed";
        r["error"] = std::string(to_string(e.code()));
        r["detail"] = e.detail();
        out.exit_code = exit_protocol;
    }
    return out;
}

CommandResult cmd_game(const Settings& s)
{
    reject_wire_flags(s, "game");
    const std::string scenario = scenario_for(s, {"abstract-qubit", "typed-qubit"});
    Scenario sc;
    sc.family = scenario == "typed-qubit" ? Family::GameTyped : Family::GameAbstract;
    sc.seed = s.seed;
    sc.mode = s.mode;
    sc.placement = placement_value(s.config, "game");
    sc.apply_correction = s.config.flag("game", "correction", true);
    sc.drift = s.config.flag("game", "drift", false);
    sc.abort_after = static_cast<int>(s.config.integer("game", "abort_after", 0));

    const SessionOutcome o = run_in_process(sc);
    CommandResult out{make_report("game"), o.ok() ? exit_ok : exit_protocol};
    Report& r = out.report;
    r["scenario"] = scenario;
    r["family"] = std::string(to_string(sc.family));
    r["seed"] = s.seed;
    r["mode"] = mode_text(s.mode);
    r["placement"] = sc.placement == Placement::Pre ? "pre" : "post";
    r["correction"] = sc.apply_correction;
    r["planted_element"] = to_json(derive_setup(sc).planted);
    r["outcome"] = outcome_json(o);
    if (s.config.flag("game", "transcript", false)) {
        r["transcript"] = lines_of(o.transcript.to_text());
    }
    return out;
}

CommandResult cmd_graph(const Settings& s)
{
    reject_wire_flags(s, "graph");
    (void)scenario_for(s, {"graph-lift"});
    GraphDocument doc{standard_graph(), {}};
    std::string source = "builtin";
    if (const auto file = s.config.text("graph", "file")) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) {
            config_fail("cannot open graph file '" + *file + "'");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        doc = parse_graph(ss.str());
        source = *file;
    }
    else {
        const UMGraph& g = doc.graph;
        for (const auto& e : g.edges()) {
            if (g.find_edge(e.target().id, e.source().id) == nullptr) {
                doc.one_way.emplace_back(e.source().id, e.target().id);
            }
        }
    }
    const UMGraph& g = doc.graph;
    const auto pairs = static_cast<int>(s.config.integer("graph", "pairs", 500));

    CommandResult out{make_report("graph"), exit_ok};
    Report& r = out.report;
    r["graph"] = source;
    r["seed"] = s.seed;

    Report vertices = Report::array();
    for (const auto& v : g.vertices()) {
        Report row = Report::object();
        row["id"] = v.id;
        row["kind"] = describe(v.kind);
        row["dim"] = v.dim;
        vertices.push_back(std::move(row));
    }
    r["vertices"] = std::move(vertices);

    const auto roots = find_roots(g);
    Report root_ids = Report::array();
    for (const auto& v : roots) {
        root_ids.push_back(v.id);
    }
    r["roots"] = std::move(root_ids);

    Report edges = Report::array();
    for (const auto& e : g.edges()) {
        Report row = Report::object();
        row["from"] = e.source().id;
        row["to"] = e.target().id;
        row["completeness"] = std::string(to_string(e.completeness()));
        row["projector_rank"] = e.projector_rank();
        row["observable_rank"] = e.observable_rank();
        row["source_rank"] = e.source_rank();
        const bool one_way = std::any_of(doc.one_way.begin(), doc.one_way.end(), [&](const auto& p) {
            return p.first == e.source().id && p.second == e.target().id;
        });
        row["one_way"] = one_way;
        edges.push_back(std::move(row));
    }
    r["edges"] = std::move(edges);

    Report lifts = Report::array();
    std::uint64_t stream = 10;
    for (const auto& root : roots) {
        for (const auto& target : g.vertices()) {
            if (target.id == root.id) {
                continue;
            }
            const auto path = shortest_path(g, root.id, target.id);
            Report row = Report::object();
            row["root"] = root.id;
            row["target"] = target.id;
            row["path"] = join(path, "->");
            try {
                const Encoding lifted = lift_encoding(g, path, Encoding::identity(root.dim));
                row["lift"] = "ok";
                row["lift_dim"] = lifted.dim();
            }
            catch (const Error& e) {
                row["lift"] = std::string(to_string(e.code()));
                row["lift_dim"] = 0;
            }
            Rng rng(derive_seed(s.seed, stream++));
            double worst = 0.0;
            double total = 0.0;
            int measured = 0;
            int outside = 0;
            for (int i = 0; i < pairs; ++i) {
                const PUAElement w = sample_root_element(root, target, rng);
                const PUAElement v = sample_root_element(root, target, rng);
                try {
                    const PUAElement gw = induced_rep(g, path, w);
                    const PUAElement gv = induced_rep(g, path, v);
                    const PUAElement gwv = induced_rep(g, path, pua_compose(w, v));
                    const PUAElement product = pua_compose(gw, gv);
                    double d = std::max(0.0, projective_defect(gwv.U(), product.U()));
                    if (gwv.parity() != product.parity()) {
                        d = std::max(d, 1.0);
                    }
                    worst = std::max(worst, d);
                    total += d;
                    ++measured;
                }
                catch (const Error& e) {
                    if (e.code() != ErrorCode::NotInStabilizer) {
                        throw;
                    }
                    ++outside;
                }
            }
            row["sampler"] = sampler_name(root, target);
            row["pairs"] = pairs;
            row["measured"] = measured;
            row["not_in_stabilizer"] = outside;
            row["max_defect"] = rounded(worst);
            row["mean_defect"] = rounded(measured > 0 ? total / measured : 0.0);
            lifts.push_back(std::move(row));
        }
    }
    r["lifts"] = std::move(lifts);
    return out;
}

CommandResult cmd_lorentz(const Settings& s)
{
    reject_wire_flags(s, "lorentz");
    (void)scenario_for(s, {"lorentz-bridge"});
    const Config& c = s.config;
    ComplexMatrix x;
    std::string source;
    if (const auto v = c.numbers("lorentz", "x", 8)) {
        x = ComplexMatrix(2, {Complex((*v)[0], (*v)[1]), Complex((*v)[2], (*v)[3]), Complex((*v)[4], (*v)[5]),
                              Complex((*v)[6], (*v)[7])});
        source = "matrix";
    }
    else if (c.has("lorentz", "boost") || c.has("lorentz", "rotation")) {
        LorentzMatrix l;
        if (const auto b = c.numbers("lorentz", "boost", 3)) {
            l = boost(vec3(*b));
        }
        if (const auto rot = c.numbers("lorentz", "rotation", 4)) {
            const auto axis = unit(vec3(*rot), "lorentz.rotation axis");
            l = lorentz_compose(l, spatial_rotation(rotation_matrix(axis, (*rot)[3])));
        }
        x = lorentz_to_sl2c(l);
        source = "boost-rotation";
    }
    else {
        x = ComplexMatrix::diagonal({std::sqrt(2.0), std::sqrt(0.5)});
        source = "worked-boost";
    }

    const GLParityElement element = GLParityElement::make(x, +1);
    const ScaledLorentz split = decompose_scaled_lorentz(element);
    const ScalingSplit scaling = split_scaling(x);
    const LorentzMatrix lambda = sl2c_to_lorentz(scaling.Z);
    const LorentzMatrix negated = sl2c_to_lorentz(-scaling.Z);
    const ComplexMatrix back = lorentz_to_sl2c(lambda);

    CommandResult out{make_report("lorentz"), exit_ok};
    Report& r = out.report;
    r["source"] = source;
    r["seed"] = s.seed;
    r["X"] = to_json(x);
    r["lambda"] = rounded(split.lambda);
    r["lorentz"] = to_json(split.lorentz);
    Report d = Report::object();
    d["metric"] = rounded(lorentz_defect(split.lorentz));
    d["det"] = rounded(det(split.lorentz));
    d["proper_orthochronous"] = is_proper_orthochronous(split.lorentz, scaled(1e-9));
    d["sign_invariance"] = rounded(max_abs_diff(lambda.m, negated.m));
    d["roundtrip"] = rounded(std::min(max_abs_diff(back, scaling.Z), max_abs_diff(back, -scaling.Z)));
    r["defects"] = std::move(d);
    return out;
}

CommandResult cmd_sg(const Settings& s)
{
    reject_wire_flags(s, "sg");
    (void)scenario_for(s, {"stern-gerlach"});
    const Config& c = s.config;
    const auto g = vec3(c.numbers("sg", "g", 3).value_or(std::vector<double>{0, 0, 1}));
    const double mass = c.number("sg", "mass", 1.0);
    if (!(mass > 0.0)) {
        config_fail("sg.mass must be positive");
    }

    struct Observer {
        std::string label;
        LorentzMatrix lambda;
    };
    std::vector<Observer> observers;
    auto parse_observer = [&](const std::string& text, int line) {
        std::istringstream in(text);
        std::string word;
        in >> word;
        std::string rest;
        std::getline(in, rest);
        const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
        // Same shorthand as the default observer labels.
        std::istringstream tokens(rest);
        std::string numeric;
        for (std::string t; tokens >> t;) {
            numeric += ' ';
            numeric += t == "ln2" ? format_double(std::numbers::ln2) : t == "-ln2" ? format_double(-std::numbers::ln2) : t;
        }
        std::vector<double> v;
        try {
            v = parse_doubles(numeric, "sg.observer");
        }
        catch (const Error& e) {
            config_fail(where + e.detail());
        }
        if (word == "rest" && v.empty()) {
            observers.push_back({text, LorentzMatrix{}});
        }
        else if (word == "boost" && v.size() == 3) {
            observers.push_back({text, boost(vec3(v))});
        }
        else if (word == "rotation" && v.size() == 4) {
            observers.push_back({text, spatial_rotation(rotation_matrix(unit(vec3(v), "rotation axis"), v[3]))});
        }
        else {
            config_fail(where + "observer must be 'rest', 'boost x y z' or 'rotation ax ay az angle'");
        }
    };
    const auto entries = c.all("sg", "observer");
    if (entries.empty()) {
        constexpr double ln2 = std::numbers::ln2;
        observers.push_back({"rest", LorentzMatrix{}});
        observers.push_back({"boost 0 0 ln2", boost({0.0, 0.0, ln2})});
        observers.push_back({"boost ln2 0 0", boost({ln2, 0.0, 0.0})});
        observers.push_back({"boost 0.5 0 0.5", boost({0.5, 0.0, 0.5})});
        observers.push_back({"rotation 0 1 0 0.5", spatial_rotation(rotation_matrix({0.0, 1.0, 0.0}, 0.5))});
    }
    for (const auto& e : entries) {
        parse_observer(e.value, e.line);
    }

    CommandResult out{make_report("sg"), exit_ok};
    Report& r = out.report;
    r["seed"] = s.seed;
    r["g_rest"] = Report::array({rounded(g[0]), rounded(g[1]), rounded(g[2])});
    r["mass"] = rounded(mass);
    Report rows = Report::array();
    for (const auto& o : observers) {
        const BoostedAcceleration b = boost_scenario(g, o.lambda);
        const FourVector p = o.lambda.apply({mass, 0.0, 0.0, 0.0});
        Report row = Report::object();
        row["observer"] = o.label;
        row["energy"] = rounded(p[0]);
        row["G0"] = rounded(b.observed.G[0]);
        row["Gx"] = rounded(b.observed.G[1]);
        row["Gy"] = rounded(b.observed.G[2]);
        row["Gz"] = rounded(b.observed.G[3]);
        row["eig_plus"] = rounded(b.eigenvalues[0]);
        row["eig_minus"] = rounded(b.eigenvalues[1]);
        row["product"] = rounded(b.invariant);
        row["defect"] = rounded(b.consistency_defect);
        rows.push_back(std::move(row));
    }
    r["observers"] = std::move(rows);
    return out;
}

CommandResult cmd_verify_suite(const Settings& s)
{
    reject_wire_flags(s, "verify-suite");
    const Config& c = s.config;
    SuiteOptions o;
    o.seed = s.seed;
    o.sampled_bloch_bound = c.number("suite", "sampled_tolerance", o.sampled_bloch_bound);
    o.sampled_copies = c.integer("suite", "sampled_copies", o.sampled_copies);
    o.sampled_runs = static_cast<int>(c.integer("suite", "sampled_runs", static_cast<std::uint64_t>(o.sampled_runs)));
    o.sampled_pass_fraction = c.number("suite", "sampled_pass_fraction", o.sampled_pass_fraction);
    o.fuzz_frames = static_cast<int>(c.integer("suite", "fuzz_frames", static_cast<std::uint64_t>(o.fuzz_frames)));
    o.two_process = c.flag("suite", "two_process", o.two_process);
    if (o.sampled_copies == 0 || o.sampled_runs <= 0) {
        config_fail("suite.sampled_copies and suite.sampled_runs must be positive");
    }

    const SuiteReport suite = run_suite(o);
    CommandResult out{make_report("verify-suite"), suite.all_pass() ? exit_ok : exit_check_failed};
    Report& r = out.report;
    r["seed"] = s.seed;
    r["all_pass"] = suite.all_pass();
    Report rows = Report::array();
    for (const auto& cr : suite.results) {
        Report row = Report::object();
        row["id"] = cr.id;
        row["name"] = cr.name;
        row["pass"] = cr.pass;
        row["measured"] = rounded(cr.measured);
        row["threshold"] = rounded(cr.threshold);
        row["detail"] = cr.detail;
        rows.push_back(std::move(row));
    }
    r["criteria"] = std::move(rows);
    return out;
}

CommandResult cmd_serve(const Settings& s, std::ostream& diagnostics)
{
    if (!s.listen) {
        config_fail("serve needs --listen host:port or --listen stdio");
    }
    if (s.connect) {
        config_fail("serve does not take --connect");
    }
    const Scenario sc = session_scenario(s);
    CommandResult out{make_report("serve"), exit_ok};
    Report& r = out.report;
    r["family"] = std::string(to_string(sc.family));
    r["seed"] = s.seed;
    r["mode"] = mode_text(s.mode);
    if (*s.listen == "stdio") {
        FdTransport t = FdTransport::stdio(s.timeout);
        run_bob(t, sc);
        r["listen"] = "stdio";
    }
    else {
        TcpListener listener(*s.listen);
        diagnostics << "listening on port " << listener.port() << std::endl;
        FdTransport t = listener.accept(s.timeout);
        run_bob(t, sc);
        r["listen"] = *s.listen;
    }
    r["status"] = "served";
    return out;
}

CommandResult cmd_connect(const Settings& s)
{
    if (!s.connect) {
        config_fail("connect needs --connect host:port");
    }
    if (s.listen) {
        config_fail("connect does not take --listen");
    }
    const Scenario sc = session_scenario(s);
    FdTransport t = FdTransport::connect(*s.connect, s.timeout);
    TransportLink link(t);
    const SessionOutcome o = run_alice(link, sc);
    t.close();
    CommandResult out{make_report("connect"), o.ok() ? exit_ok : exit_protocol};
    Report& r = out.report;
    r["family"] = std::string(to_string(sc.family));
    r["seed"] = s.seed;
    r["mode"] = mode_text(s.mode);
    r["outcome"] = outcome_json(o);
    r["transcript"] = lines_of(o.transcript.to_text());
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& err)
{
    CLI::App app{"framegate: reference-frame agreement experiments", "framegate"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "framegate 0.1.0");

    CommonFlags flags;
    std::uint64_t seed = 0;
    std::string mode;
    std::string out_path;
    std::string listen;
    std::string connect;
    double timeout = 0.0;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"agree", "Run an agreement protocol against a planted relation"},
        {"game", "Play the communication game in process"},
        {"graph", "Analyse a universal measurability graph"},
        {"lorentz", "Map an SL(2,C) or GL(2,C) matrix to its scaled Lorentz transformation"},
        {"sg", "Stern-Gerlach acceleration table across observers"},
        {"verify-suite", "Run the acceptance criteria"},
        {"serve", "Run Bob over a transport"},
        {"connect", "Run Alice against a served Bob"},
    };
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto& o = opts[name];
        o["config"] = sub->add_option("--config", flags.config_path, "Config file (key = value with [sections])");
        o["seed"] = sub->add_option("--seed", seed, "Run seed");
        o["mode"] = sub->add_option("--mode", mode, "exact or sampled:N");
        o["out"] = sub->add_option("--out", out_path, "Write the report here instead of stdout");
        sub->add_flag("--json", flags.json, "Emit the canonical JSON report");
        o["listen"] = sub->add_option("--listen", listen, "host:port or stdio");
        o["connect"] = sub->add_option("--connect", connect, "host:port");
        o["timeout"] = sub->add_option("--timeout", timeout, "Per-read timeout in seconds");
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cout, err);
        return code == 0 ? exit_ok : exit_config;
    }

    std::string command;
    for (const auto& [name, help] : commands) {
        if (app.got_subcommand(name)) {
            command = name;
        }
    }
    auto& o = opts[command];
    if (o["seed"]->count() > 0) {
        flags.seed = seed;
    }
    if (o["mode"]->count() > 0) {
        flags.mode = mode;
    }
    if (o["out"]->count() > 0) {
        flags.out = out_path;
    }
    if (o["listen"]->count() > 0) {
        flags.listen = listen;
    }
    if (o["connect"]->count() > 0) {
        flags.connect = connect;
    }
    if (o["timeout"]->count() > 0) {
        flags.timeout_seconds = timeout;
    }

    const double saved_scale = tolerance_scale();
    struct RestoreScale {
        double value;
        ~RestoreScale() { set_tolerance_scale(value); }
    } restore{saved_scale};

    try {
        const Settings settings = resolve(flags);
        CommandResult result;
        if (command == "agree") {
            result = cmd_agree(settings);
        }
        else if (command == "game") {
            result = cmd_game(settings);
        }
        else if (command == "graph") {
            result = cmd_graph(settings);
        }
        else if (command == "lorentz") {
            result = cmd_lorentz(settings);
        }
        else if (command == "sg") {
            result = cmd_sg(settings);
        }
        else if (command == "verify-suite") {
            result = cmd_verify_suite(settings);
        }
        else if (command == "serve") {
            result = cmd_serve(settings, err);
        }
        else {
            result = cmd_connect(settings);
        }
        const std::string text = settings.json ? render_json(result.report) : render_text(result.report);
        const bool stdout_is_wire = command == "serve" && settings.listen == "stdio";
        if (!(stdout_is_wire && settings.out.empty())) {
            emit(text, settings.out);
        }
        if (result.report.contains("error") && result.report["error"].is_string()) {
            err << "error: " << result.report["error"].get<std::string>() << "\n";
        }
        return result.exit_code;
    }
    catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::GraphParseError ? exit_config
                                                                                              : exit_protocol;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_protocol;
    }
}

}  // namespace framegate::cli

#include "framegate/umgraph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "framegate/error.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {
namespace {

RealMatrix coordinate_columns(const std::vector<ComplexMatrix>& ms, int dim)
{
    RealMatrix out(dim * dim, static_cast<int>(ms.size()));
    for (std::size_t c = 0; c < ms.size(); ++c) {
        const auto coords = hermitian_coordinates(ms[c]);
        for (std::size_t r = 0; r < coords.size(); ++r) {
            out(static_cast<int>(r), static_cast<int>(c)) = coords[r];
        }
    }
    return out;
}

int span_rank(const std::vector<ComplexMatrix>& ms, int dim)
{
    if (ms.empty()) {
        return 0;
    }
    return rank(coordinate_columns(ms, dim));
}

ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b)
{
    const int n = static_cast<int>(a.size());
    ComplexMatrix out(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            out(r, c) = a[static_cast<std::size_t>(r)] * std::conj(b[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

const Spin& spin_of(const SystemClass& c, const char* role)
{
    const auto* s = std::get_if<MassiveSpin>(&c.kind);
    if (s == nullptr) {
        fail(ErrorCode::InvalidArgument, std::string(role) + " '" + c.id + "' is not a massive spin");
    }
    return s->spin;
}

// Probe states whose span is the full Hermitian space of dimension d.
std::vector<State> probe_states(int d)
{
    std::vector<State> out;
    std::vector<Complex> v(static_cast<std::size_t>(d));
    auto push = [&] { out.push_back(State::make(pure_state(v))); };
    for (int j = 0; j < d; ++j) {
        std::fill(v.begin(), v.end(), Complex{});
        v[static_cast<std::size_t>(j)] = 1.0;
        push();
    }
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            std::fill(v.begin(), v.end(), Complex{});
            v[static_cast<std::size_t>(j)] = 1.0;
            v[static_cast<std::size_t>(k)] = 1.0;
            push();
            v[static_cast<std::size_t>(k)] = Complex(0.0, 1.0);
            push();
        }
    }
    return out;
}

const ObservableMap& edge_on_path(const UMGraph& g, const std::string& from, const std::string& to)
{
    const auto* e = g.find_edge(from, to);
    if (e == nullptr) {
        fail(ErrorCode::IncompletePath, "no edge " + from + " -> " + to);
    }
    return *e;
}

Encoding lift_edge(const ObservableMap& edge, const Encoding& phi_source,
                   const std::optional<std::vector<ComplexMatrix>>& choice)
{
    const auto& pairs = edge.pairs();
    if (choice && choice->size() != pairs.size()) {
        fail(ErrorCode::IncompatibleChoice, "classical choice for " + edge.source().id + " -> " + edge.target().id
                                                + " has " + std::to_string(choice->size()) + " matrices, "
                                                + std::to_string(pairs.size()) + " needed");
    }
    try {
        // Physical target observables measured by the devices the agent
        // describes with the canonical source matrices.
        std::vector<Observable> physical;
        std::vector<Observable> described;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Observable source_desc = Observable::make(pairs[i].source);
            const ComplexMatrix p = apply_encoding_observable(phi_source, source_desc).matrix;
            physical.push_back(Observable::make(hermitian_part(edge.apply(p))));
            described.push_back(Observable::make(choice ? (*choice)[i] : pairs[i].target));
        }
        std::vector<std::pair<State, State>> relation;
        for (const auto& probe : probe_states(edge.target().dim)) {
            std::vector<Measurement> data;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                data.push_back({described[i], born(probe, physical[i])});
            }
            relation.emplace_back(probe, tomography(edge.target().dim, data).state);
        }
        return reconstruct_relation(relation).encoding;
    }
    catch (const Error& e) {
        if (e.code() == ErrorCode::IncompatibleChoice) {
            throw;
        }
        fail(ErrorCode::IncompatibleChoice,
             "lift along " + edge.source().id + " -> " + edge.target().id + " failed: " + e.what());
    }
}

PUAElement pua_of(const Encoding& phi) { return as_pua(phi); }

Encoding encoding_of(const PUAElement& w) { return as_encoding(as_glparity(w)); }

// Index of the first source observable whose image leaves the span, or -1.
int stabilizer_violation(const ObservableMap& edge, const PUAElement& w)
{
    if (w.dim() != edge.source().dim) {
        fail(ErrorCode::DimensionMismatch, "stabilizer element has dimension " + std::to_string(w.dim()) + ", edge source "
                                               + std::to_string(edge.source().dim));
    }
    const auto& pairs = edge.pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const ComplexMatrix moved = act(w, pairs[i].source);
        if (!edge.in_domain(moved, scaled(tol::recon))) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

}  // namespace

// ---------------------------------------------------------------- classes

SystemClass SystemClass::massive_spin(std::string id, Spin s)
{
    if (s.twice < 1 || s.twice > 6) {
        fail(ErrorCode::InvalidSpin, "spin must be a half-integer in [1/2, 3]");
    }
    return SystemClass{std::move(id), s.dim(), MassiveSpin{s}};
}

SystemClass SystemClass::photon(std::string id, const std::array<double, 3>& axis)
{
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(n - 1.0) > 1e-12) {
        fail(ErrorCode::NotUnit, "propagation axis must be a unit vector");
    }
    return SystemClass{std::move(id), 2, PhotonPolarization{axis}};
}

SystemClass SystemClass::abstract_system(std::string id, int dim)
{
    if (dim < 1 || dim > max_dim) {
        fail(ErrorCode::InvalidArgument, "abstract dimension outside 1..16");
    }
    return SystemClass{std::move(id), dim, AbstractSystem{dim}};
}

std::string describe(const SystemKind& kind)
{
    struct Visitor {
        std::string operator()(const MassiveSpin& s) const
        {
            return s.spin.twice % 2 == 0 ? "spin " + std::to_string(s.spin.twice / 2)
                                         : "spin " + std::to_string(s.spin.twice) + "/2";
        }
        std::string operator()(const PhotonPolarization& p) const
        {
            std::ostringstream os;
            os << "photon (" << p.axis[0] << ", " << p.axis[1] << ", " << p.axis[2] << ")";
            return os.str();
        }
        std::string operator()(const AbstractSystem& a) const { return "abstract " + std::to_string(a.dim); }
    };
    return std::visit(Visitor{}, kind);
}

std::string_view to_string(Completeness c) noexcept
{
    return c == Completeness::Complete ? "complete" : "partial";
}

// ---------------------------------------------------------------- maps

ObservableMap ObservableMap::make(SystemClass source, SystemClass target, std::vector<ObservablePair> pairs)
{
    if (pairs.empty()) {
        fail(ErrorCode::InvalidArgument, "observable map needs at least one pair");
    }
    for (const auto& p : pairs) {
        if (p.source.dim() != source.dim || p.target.dim() != target.dim) {
            fail(ErrorCode::DimensionMismatch, "observable pair does not match the vertex dimensions");
        }
        if (!is_hermitian(p.source, scaled(tol::herm)) || !is_hermitian(p.target, scaled(tol::herm))) {
            fail(ErrorCode::NotHermitian, "observable pair is not Hermitian");
        }
    }
    ObservableMap m;
    m.source_ = std::move(source);
    m.target_ = std::move(target);
    m.pairs_ = std::move(pairs);

    // Greedy maximal independent subset of the source side.
    std::vector<ComplexMatrix> chosen;
    for (std::size_t i = 0; i < m.pairs_.size(); ++i) {
        chosen.push_back(m.pairs_[i].source);
        if (span_rank(chosen, m.source_.dim) == static_cast<int>(chosen.size())) {
            m.independent_.push_back(static_cast<int>(i));
        }
        else {
            chosen.pop_back();
        }
    }
    // Dependent pairs must be mapped consistently.
    for (std::size_t i = 0; i < m.pairs_.size(); ++i) {
        double residual = 0.0;
        const auto coeffs = m.source_coefficients(m.pairs_[i].source, residual);
        ComplexMatrix image(m.target_.dim);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            image += m.pairs_[static_cast<std::size_t>(m.independent_[k])].target * coeffs[k];
        }
        const double scale = std::max(1.0, max_abs(m.pairs_[i].target));
        if (max_abs_diff(image, m.pairs_[i].target) > scaled(tol::recon) * scale) {
            fail(ErrorCode::InvalidArgument, "pair " + std::to_string(i) + " of " + m.source_.id + " -> " + m.target_.id
                                                 + " breaks the linear relations of the source observables");
        }
    }

    std::vector<ComplexMatrix> targets;
    std::vector<ComplexMatrix> projectors;
    for (const auto& p : m.pairs_) {
        targets.push_back(p.target);
        for (auto& sp : spectral_projectors(p.target)) {
            projectors.push_back(std::move(sp.projector));
        }
    }
    m.observable_rank_ = span_rank(targets, m.target_.dim);
    m.projector_rank_ = span_rank(projectors, m.target_.dim);
    m.completeness_ =
        m.projector_rank_ == m.target_.dim * m.target_.dim ? Completeness::Complete : Completeness::Partial;
    return m;
}

std::vector<double> ObservableMap::source_coefficients(const ComplexMatrix& m, double& residual) const
{
    std::vector<ComplexMatrix> basis;
    for (int i : independent_) {
        basis.push_back(pairs_[static_cast<std::size_t>(i)].source);
    }
    const RealMatrix design = coordinate_columns(basis, source_.dim);
    const auto coords = hermitian_coordinates(m);
    const auto fit = least_squares(design, coords);
    residual = fit.residual;
    return fit.solution;
}

bool ObservableMap::in_domain(const ComplexMatrix& m, double tolerance) const
{
    if (m.dim() != source_.dim) {
        return false;
    }
    double residual = 0.0;
    (void)source_coefficients(m, residual);
    return residual <= tolerance * std::max(1.0, frobenius_norm(m));
}

ComplexMatrix ObservableMap::apply(const ComplexMatrix& m) const
{
    if (m.dim() != source_.dim) {
        fail(ErrorCode::DimensionMismatch, "observable does not live on " + source_.id);
    }
    double residual = 0.0;
    const auto coeffs = source_coefficients(m, residual);
    if (residual > scaled(tol::recon) * std::max(1.0, frobenius_norm(m))) {
        fail(ErrorCode::IncompatibleChoice, "observable lies outside the universally measurable span of "
                                                + source_.id + " -> " + target_.id + " (residual "
                                                + std::to_string(residual) + ")");
    }
    ComplexMatrix image(target_.dim);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        image += pairs_[static_cast<std::size_t>(independent_[k])].target * coeffs[k];
    }
    return image;
}

// ---------------------------------------------------------------- graph

UMGraph UMGraph::make(std::vector<SystemClass> vertices, std::vector<ObservableMap> edges)
{
    std::set<std::string> ids;
    for (const auto& v : vertices) {
        if (!ids.insert(v.id).second) {
            fail(ErrorCode::InvalidGraph, "duplicate vertex '" + v.id + "'");
        }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : edges) {
        const auto& from = e.source().id;
        const auto& to = e.target().id;
        if (ids.count(from) == 0 || ids.count(to) == 0) {
            fail(ErrorCode::InvalidGraph, "edge " + from + " -> " + to + " has an unknown endpoint");
        }
        if (e.completeness() != Completeness::Complete) {
            fail(ErrorCode::InvalidGraph, "edge " + from + " -> " + to + " is not tomographically complete (projector rank "
                                              + std::to_string(e.projector_rank()) + ")");
        }
        if (!seen.insert({from, to}).second) {
            fail(ErrorCode::InvalidGraph, "parallel edge " + from + " -> " + to);
        }
        const auto same = [&](const SystemClass& c) {
            return std::find(vertices.begin(), vertices.end(), c) != vertices.end();
        };
        if (!same(e.source()) || !same(e.target())) {
            fail(ErrorCode::InvalidGraph, "edge " + from + " -> " + to + " disagrees with the vertex definitions");
        }
    }
    UMGraph g;
    g.vertices_ = std::move(vertices);
    g.edges_ = std::move(edges);
    return g;
}

const SystemClass* UMGraph::find_vertex(std::string_view id) const
{
    const auto it = std::find_if(vertices_.begin(), vertices_.end(), [&](const SystemClass& v) { return v.id == id; });
    return it == vertices_.end() ? nullptr : &*it;
}

const ObservableMap* UMGraph::find_edge(std::string_view from, std::string_view to) const
{
    const auto it = std::find_if(edges_.begin(), edges_.end(), [&](const ObservableMap& e) {
        return e.source().id == from && e.target().id == to;
    });
    return it == edges_.end() ? nullptr : &*it;
}

bool UMGraph::reachable(std::string_view from, std::string_view to) const
{
    if (find_vertex(from) == nullptr || find_vertex(to) == nullptr) {
        return false;
    }
    std::set<std::string, std::less<>> visited;
    std::vector<std::string> stack{std::string(from)};
    while (!stack.empty()) {
        const std::string v = stack.back();
        stack.pop_back();
        if (!visited.insert(v).second) {
            continue;
        }
        if (v == to) {
            return true;
        }
        for (const auto& e : edges_) {
            if (e.source().id == v) {
                stack.push_back(e.target().id);
            }
        }
    }
    return false;
}

std::vector<SystemClass> find_roots(const UMGraph& g)
{
    std::vector<SystemClass> roots;
    for (const auto& v : g.vertices()) {
        const bool all = std::all_of(g.vertices().begin(), g.vertices().end(),
                                     [&](const SystemClass& w) { return g.reachable(v.id, w.id); });
        if (all) {
            roots.push_back(v);
        }
    }
    std::sort(roots.begin(), roots.end(), [](const SystemClass& a, const SystemClass& b) {
        return a.dim != b.dim ? a.dim < b.dim : a.id < b.id;
    });
    return roots;
}

// ---------------------------------------------------------------- edges

const std::array<std::array<double, 3>, 5>& five_directions()
{
    static const double h = 1.0 / std::numbers::sqrt2;
    static const std::array<std::array<double, 3>, 5> dirs{{
        {1.0, 0.0, 0.0},
        {0.0, 1.0, 0.0},
        {h, h, 0.0},
        {0.0, h, h},
        {h, 0.0, h},
    }};
    return dirs;
}

ObservableMap spin_observable_map(const SystemClass& source, const SystemClass& target)
{
    const Spin s = spin_of(source, "source");
    const Spin t = spin_of(target, "target");
    std::vector<ObservablePair> pairs;
    for (const auto& n : five_directions()) {
        pairs.push_back({spin_along(s, n), spin_along(t, n)});
    }
    pairs.push_back({spin_matrices(s).Ihat, spin_matrices(t).Ihat});
    return ObservableMap::make(source, target, std::move(pairs));
}

std::array<std::array<Complex, 3>, 2> helicity_vectors(const std::array<double, 3>& axis)
{
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(n - 1.0) > 1e-12) {
        fail(ErrorCode::NotUnit, "propagation axis must be a unit vector");
    }
    // Rotation taking ẑ to the axis.
    ComplexMatrix d = ComplexMatrix::identity(3);
    const double sin_angle = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1]);
    if (sin_angle > 1e-15) {
        const std::array<double, 3> k{-axis[1] / sin_angle, axis[0] / sin_angle, 0.0};
        d = spin_rotation(Spin{2}, su2_rotation(k, std::atan2(sin_angle, axis[2])));
    }
    else if (axis[2] < 0.0) {
        d = spin_rotation(Spin{2}, su2_rotation({1.0, 0.0, 0.0}, std::numbers::pi));
    }
    std::array<std::array<Complex, 3>, 2> out{};
    for (int r = 0; r < 3; ++r) {
        out[0][static_cast<std::size_t>(r)] = d(r, 0);
        out[1][static_cast<std::size_t>(r)] = d(r, 2);
    }
    return out;
}

namespace {

std::vector<ObservablePair> helicity_pairs(const PhotonPolarization& p)
{
    const auto e = helicity_vectors(p.axis);
    const std::array<ComplexMatrix, 4> qubit{ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()};
    std::vector<ObservablePair> pairs;
    for (const auto& h : qubit) {
        ComplexMatrix lifted(3);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                lifted += outer(e[static_cast<std::size_t>(a)], e[static_cast<std::size_t>(b)]) * h(a, b);
            }
        }
        pairs.push_back({hermitian_part(lifted), h});
    }
    return pairs;
}

const PhotonPolarization& photon_of(const SystemClass& c)
{
    const auto* p = std::get_if<PhotonPolarization>(&c.kind);
    if (p == nullptr) {
        fail(ErrorCode::InvalidArgument, "'" + c.id + "' is not a photon polarization class");
    }
    return *p;
}

void require_spin_one(const SystemClass& c)
{
    if (spin_of(c, "photon partner").twice != 2) {
        fail(ErrorCode::InvalidArgument, "photon edges connect to spin 1 only");
    }
}

}  // namespace

ObservableMap photon_edge(const SystemClass& spin_one, const SystemClass& photon)
{
    require_spin_one(spin_one);
    return ObservableMap::make(spin_one, photon, helicity_pairs(photon_of(photon)));
}

ObservableMap photon_reverse_map(const SystemClass& photon, const SystemClass& spin_one)
{
    require_spin_one(spin_one);
    auto pairs = helicity_pairs(photon_of(photon));
    for (auto& p : pairs) {
        std::swap(p.source, p.target);
    }
    return ObservableMap::make(photon, spin_one, std::move(pairs));
}

ObservableMap default_edge(const SystemClass& source, const SystemClass& target)
{
    const bool src_spin = std::holds_alternative<MassiveSpin>(source.kind);
    const bool tgt_spin = std::holds_alternative<MassiveSpin>(target.kind);
    if (src_spin && tgt_spin) {
        return spin_observable_map(source, target);
    }
    if (src_spin && std::holds_alternative<PhotonPolarization>(target.kind)) {
        return photon_edge(source, target);
    }
    if (tgt_spin && std::holds_alternative<PhotonPolarization>(source.kind)) {
        return photon_reverse_map(source, target);
    }
    if (std::holds_alternative<AbstractSystem>(source.kind) && std::holds_alternative<AbstractSystem>(target.kind)
        && source.dim == target.dim) {
        std::vector<ObservablePair> pairs;
        for (const auto& b : hermitian_basis(source.dim)) {
            pairs.push_back({b, b});
        }
        return ObservableMap::make(source, target, std::move(pairs));
    }
    fail(ErrorCode::InvalidGraph, "no observable identification between " + describe(source.kind) + " and "
                                      + describe(target.kind));
}

// ---------------------------------------------------------------- lifts

Encoding lift_encoding(const UMGraph& g, const std::vector<std::string>& path, const Encoding& phi_root,
                       const ClassicalChoice& choice)
{
    if (path.empty()) {
        fail(ErrorCode::IncompletePath, "empty path");
    }
    const auto* root = g.find_vertex(path.front());
    if (root == nullptr) {
        fail(ErrorCode::IncompletePath, "unknown vertex '" + path.front() + "'");
    }
    if (root->dim != phi_root.dim()) {
        fail(ErrorCode::DimensionMismatch, "root encoding does not act on '" + root->id + "'");
    }
    if (!choice.empty() && choice.size() != path.size() - 1) {
        fail(ErrorCode::IncompatibleChoice, "classical choice must cover every edge of the path");
    }
    Encoding phi = phi_root;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto& edge = edge_on_path(g, path[k], path[k + 1]);
        phi = lift_edge(edge, phi, choice.empty() ? std::nullopt : choice[k]);
    }
    return phi;
}

bool stabilizer_check(const ObservableMap& edge, const PUAElement& w) { return stabilizer_violation(edge, w) < 0; }

PUAElement induced_rep(const UMGraph& g, const std::vector<std::string>& path, const PUAElement& w)
{
    if (path.empty()) {
        fail(ErrorCode::IncompletePath, "empty path");
    }
    if (g.find_vertex(path.front()) == nullptr || g.find_vertex(path.back()) == nullptr
        || !g.reachable(path.front(), path.back())) {
        fail(ErrorCode::Unreachable, "'" + path.back() + "' is not reachable from '" + path.front() + "'");
    }
    const auto* root = g.find_vertex(path.front());
    if (root->dim != w.dim()) {
        fail(ErrorCode::DimensionMismatch, "group element does not act on '" + root->id + "'");
    }
    Encoding phi_w = encoding_of(w);
    Encoding phi_1 = Encoding::identity(w.dim());
    PUAElement induced = w;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto& edge = edge_on_path(g, path[k], path[k + 1]);
        const int bad = stabilizer_violation(edge, induced);
        if (bad >= 0) {
            fail(ErrorCode::NotInStabilizer, "element moves source observable " + std::to_string(bad) + " of "
                                                 + edge.source().id + " -> " + edge.target().id
                                                 + " out of the universally measurable span");
        }
        phi_w = lift_edge(edge, phi_w, std::nullopt);
        phi_1 = lift_edge(edge, phi_1, std::nullopt);
        induced = pua_compose(pua_of(phi_w), pua_inverse(pua_of(phi_1)));
    }
    return induced;
}

UMGraph standard_graph()
{
    const auto s = SystemClass::massive_spin("S", Spin{1});
    const auto sp = SystemClass::massive_spin("S'", Spin{2});
    const auto spp = SystemClass::photon("S''", {0.0, 0.0, 1.0});
    return UMGraph::make({s, sp, spp},
                         {spin_observable_map(s, sp), spin_observable_map(sp, s), photon_edge(sp, spp)});
}

// ---------------------------------------------------------------- parser

namespace {

struct Token {
    std::string_view text;
    int column = 1;
};

[[noreturn]] void parse_error(int line, int column, const std::string& msg)
{
    fail(ErrorCode::GraphParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

std::vector<Token> tokenize(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') {
            break;
        }
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') {
            ++i;
        }
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

double parse_number(const Token& t, int line)
{
    double v = 0.0;
    const auto* end = t.text.data() + t.text.size();
    const auto res = std::from_chars(t.text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        parse_error(line, t.column, "expected a number, found '" + std::string(t.text) + "'");
    }
    return v;
}

Spin parse_spin(const Token& t, int line)
{
    const auto slash = t.text.find('/');
    double value = 0.0;
    if (slash == std::string_view::npos) {
        value = parse_number(t, line);
    }
    else {
        const Token num{t.text.substr(0, slash), t.column};
        const Token den{t.text.substr(slash + 1), t.column + static_cast<int>(slash) + 1};
        const double d = parse_number(den, line);
        if (d == 0.0) {
            parse_error(line, den.column, "zero denominator");
        }
        value = parse_number(num, line) / d;
    }
    try {
        return Spin::from_double(value);
    }
    catch (const Error&) {
        parse_error(line, t.column, "spin must be a half-integer in [1/2, 3]");
    }
}

}  // namespace

GraphDocument parse_graph(std::string_view text)
{
    std::vector<SystemClass> vertices;
    struct EdgeLine {
        std::string from;
        std::string to;
        int line = 0;
        int column = 0;
    };
    std::vector<EdgeLine> edge_lines;
    std::map<std::string, int> vertex_line;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        const auto tokens = tokenize(line);
        if (tokens.empty()) {
            continue;
        }
        const auto expect = [&](std::size_t n, const char* form) {
            if (tokens.size() != n) {
                const int col = tokens.size() > n ? tokens[n].column : static_cast<int>(line.size()) + 1;
                parse_error(line_no, col, std::string("expected '") + form + "'");
            }
        };
        if (tokens[0].text == "vertex") {
            if (tokens.size() < 3) {
                parse_error(line_no, static_cast<int>(line.size()) + 1, "expected 'vertex <id> <kind> ...'");
            }
            const std::string id(tokens[1].text);
            if (vertex_line.count(id) != 0) {
                parse_error(line_no, tokens[1].column, "vertex '" + id + "' already defined on line "
                                                           + std::to_string(vertex_line[id]));
            }
            const auto kind = tokens[2].text;
            if (kind == "spin") {
                expect(4, "vertex <id> spin <s>");
                vertices.push_back(SystemClass::massive_spin(id, parse_spin(tokens[3], line_no)));
            }
            else if (kind == "photon") {
                expect(6, "vertex <id> photon <x> <y> <z>");
                const std::array<double, 3> axis{parse_number(tokens[3], line_no), parse_number(tokens[4], line_no),
                                                 parse_number(tokens[5], line_no)};
                const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
                if (std::abs(n - 1.0) > 1e-12) {
                    parse_error(line_no, tokens[3].column, "photon axis must be a unit vector");
                }
                vertices.push_back(SystemClass::photon(id, axis));
            }
            else if (kind == "abstract") {
                expect(4, "vertex <id> abstract <dim>");
                const double d = parse_number(tokens[3], line_no);
                if (d != std::floor(d) || d < 1 || d > max_dim) {
                    parse_error(line_no, tokens[3].column, "dimension must be an integer in 1..16");
                }
                vertices.push_back(SystemClass::abstract_system(id, static_cast<int>(d)));
            }
            else {
                parse_error(line_no, tokens[2].column, "unknown vertex kind '" + std::string(kind) + "'");
            }
            vertex_line[id] = line_no;
        }
        else if (tokens[0].text == "edge") {
            expect(3, "edge <from> <to>");
            edge_lines.push_back({std::string(tokens[1].text), std::string(tokens[2].text), line_no, tokens[1].column});
        }
        else {
            parse_error(line_no, tokens[0].column, "expected 'vertex' or 'edge'");
        }
    }

    const auto lookup = [&](const std::string& id) -> const SystemClass* {
        const auto it = std::find_if(vertices.begin(), vertices.end(), [&](const SystemClass& v) { return v.id == id; });
        return it == vertices.end() ? nullptr : &*it;
    };
    std::vector<ObservableMap> edges;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& el : edge_lines) {
        const auto* from = lookup(el.from);
        const auto* to = lookup(el.to);
        if (from == nullptr || to == nullptr) {
            parse_error(el.line, el.column, "unknown vertex '" + (from == nullptr ? el.from : el.to) + "'");
        }
        if (!seen.insert({el.from, el.to}).second) {
            parse_error(el.line, el.column, "parallel edge " + el.from + " -> " + el.to);
        }
        try {
            auto map = default_edge(*from, *to);
            if (map.completeness() != Completeness::Complete) {
                parse_error(el.line, el.column, "edge " + el.from + " -> " + el.to
                                                    + " is not tomographically complete on the target (projector rank "
                                                    + std::to_string(map.projector_rank()) + " of "
                                                    + std::to_string(to->dim * to->dim) + ")");
            }
            edges.push_back(std::move(map));
        }
        catch (const Error& e) {
            if (e.code() == ErrorCode::GraphParseError) {
                throw;
            }
            parse_error(el.line, el.column, e.what());
        }
    }

    GraphDocument doc{UMGraph::make(vertices, edges), {}};
    for (const auto& e : doc.graph.edges()) {
        bool reverse_complete = false;
        try {
            reverse_complete = default_edge(e.target(), e.source()).completeness() == Completeness::Complete;
        }
        catch (const Error&) {
            reverse_complete = false;
        }
        if (!reverse_complete) {
            doc.one_way.emplace_back(e.source().id, e.target().id);
        }
    }
    return doc;
}

}  // namespace framegate

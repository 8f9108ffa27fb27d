#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "framegate/groups.hpp"
#include "framegate/quantum.hpp"

namespace framegate {

struct MassiveSpin {
    Spin spin;
    friend bool operator==(const MassiveSpin&, const MassiveSpin&) = default;
};

struct PhotonPolarization {
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    friend bool operator==(const PhotonPolarization&, const PhotonPolarization&) = default;
};

struct AbstractSystem {
    int dim = 2;
    friend bool operator==(const AbstractSystem&, const AbstractSystem&) = default;
};

using SystemKind = std::variant<MassiveSpin, PhotonPolarization, AbstractSystem>;

/// A vertex of the measurability graph.
struct SystemClass {
    std::string id;
    int dim = 2;
    SystemKind kind;

    static SystemClass massive_spin(std::string id, Spin s);
    /// NotUnit unless |axis| = 1 within 1e-12.
    static SystemClass photon(std::string id, const std::array<double, 3>& axis);
    static SystemClass abstract_system(std::string id, int dim);

    friend bool operator==(const SystemClass&, const SystemClass&) = default;
};

std::string describe(const SystemKind& kind);

/// Source observable and the observable it is identified with on the target,
/// both in the reference frame.
struct ObservablePair {
    ComplexMatrix source;
    ComplexMatrix target;
};

enum class Completeness { Complete, Partial };

std::string_view to_string(Completeness c) noexcept;

/// Edge payload: a finite set of observable identifications, extended
/// linearly. Dependent source observables are allowed as long as the target
/// side satisfies the same linear relations.
class ObservableMap {
  public:
    /// InvalidArgument if the identification is not a consistent linear map.
    static ObservableMap make(SystemClass source, SystemClass target, std::vector<ObservablePair> pairs);

    [[nodiscard]] const SystemClass& source() const noexcept { return source_; }
    [[nodiscard]] const SystemClass& target() const noexcept { return target_; }
    [[nodiscard]] const std::vector<ObservablePair>& pairs() const noexcept { return pairs_; }
    [[nodiscard]] Completeness completeness() const noexcept { return completeness_; }
    /// Rank of the target observables' eigenprojectors in the Hermitian space.
    [[nodiscard]] int projector_rank() const noexcept { return projector_rank_; }
    /// Rank of the target observables themselves.
    [[nodiscard]] int observable_rank() const noexcept { return observable_rank_; }
    /// Rank of the source observables.
    [[nodiscard]] int source_rank() const noexcept { return static_cast<int>(independent_.size()); }

    /// Whether `m` lies in the span of the source observables.
    [[nodiscard]] bool in_domain(const ComplexMatrix& m, double tolerance) const;
    /// Linear extension; IncompatibleChoice if `m` is outside the domain.
    [[nodiscard]] ComplexMatrix apply(const ComplexMatrix& m) const;

  private:
    ObservableMap() = default;

    [[nodiscard]] std::vector<double> source_coefficients(const ComplexMatrix& m, double& residual) const;

    SystemClass source_;
    SystemClass target_;
    std::vector<ObservablePair> pairs_;
    std::vector<int> independent_;
    Completeness completeness_ = Completeness::Partial;
    int projector_rank_ = 0;
    int observable_rank_ = 0;
};

/// Immutable directed graph; only tomographically complete edges, at most
/// one per ordered pair.
class UMGraph {
  public:
    /// InvalidGraph on duplicate ids, unknown endpoints, partial or parallel edges.
    static UMGraph make(std::vector<SystemClass> vertices, std::vector<ObservableMap> edges);

    [[nodiscard]] const std::vector<SystemClass>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<ObservableMap>& edges() const noexcept { return edges_; }
    [[nodiscard]] const SystemClass* find_vertex(std::string_view id) const;
    [[nodiscard]] const ObservableMap* find_edge(std::string_view from, std::string_view to) const;
    [[nodiscard]] bool reachable(std::string_view from, std::string_view to) const;

  private:
    UMGraph() = default;

    std::vector<SystemClass> vertices_;
    std::vector<ObservableMap> edges_;
};

/// Vertices from which every vertex is reachable, sorted by (dim, id).
std::vector<SystemClass> find_roots(const UMGraph& g);

/// n̂₁ … n̂₅ with the spin-1 observables S_n̂ᵢ tomographically complete.
const std::array<std::array<double, 3>, 5>& five_directions();

/// Pairs (n̂ᵢ·S, n̂ᵢ·S′) for the five directions plus (s·1, s′·1).
ObservableMap spin_observable_map(const SystemClass& source, const SystemClass& target);

/// Orthonormal eigenvectors of S_axis on spin 1 for eigenvalues +1 and −1,
/// as the two columns of a 3×2 block (returned as (e₊, e₋)).
std::array<std::array<Complex, 3>, 2> helicity_vectors(const std::array<double, 3>& axis);

/// Spin-1 observables supported on the ±1 eigenspaces of S_axis, identified
/// with the photon qubit observables.
ObservableMap photon_edge(const SystemClass& spin_one, const SystemClass& photon);
/// The opposite identification; always partial.
ObservableMap photon_reverse_map(const SystemClass& photon, const SystemClass& spin_one);

/// Builds the edge payload appropriate for the two vertex kinds.
ObservableMap default_edge(const SystemClass& source, const SystemClass& target);

/// Per-edge agreed matrix descriptions of the target observables, in the
/// order of the edge's pairs. nullopt selects the canonical choice.
using ClassicalChoice = std::vector<std::optional<std::vector<ComplexMatrix>>>;

/// Lifts an encoding of the path's first vertex to its last vertex.
/// IncompletePath if the path does not follow edges of `g`;
/// IncompatibleChoice if a classical choice or the encoding cannot be
/// matched with the edge's observables.
Encoding lift_encoding(const UMGraph& g, const std::vector<std::string>& path, const Encoding& phi_root,
                       const ClassicalChoice& choice = {});

/// Whether conjugation by `w` maps the span of the edge's source observables onto itself.
bool stabilizer_check(const ObservableMap& edge, const PUAElement& w);

/// G_W = φ_W ∘ φ_1⁻¹ on the path's last vertex, where φ_W is the lift of the
/// root encoding W. NotInStabilizer when some edge's source span is not
/// invariant; Unreachable when the path's end cannot be reached.
PUAElement induced_rep(const UMGraph& g, const std::vector<std::string>& path, const PUAElement& w);

/// The fig. S ↔ S′ → S″ instance: spin 1/2, spin 1 and a photon along ẑ.
UMGraph standard_graph();

struct GraphDocument {
    UMGraph graph;
    /// Edges whose reverse direction is partial, as (from, to).
    std::vector<std::pair<std::string, std::string>> one_way;
};

/// Line-oriented description:
///   vertex <id> spin <s>            (s as 1/2, 1, 3/2 ...)
///   vertex <id> photon <x> <y> <z>
///   vertex <id> abstract <dim>
///   edge <from> <to>
/// '#' starts a comment. GraphParseError reports line and column.
GraphDocument parse_graph(std::string_view text);

}  // namespace framegate

#ifndef TRANSITCLUST_TRANSIT_HPP
#define TRANSITCLUST_TRANSIT_HPP

#include <optional>
#include <string>

#include "transitclust/dag.hpp"

namespace transitclust {

/// Receivers, emitters and the external attachment of a candidate cluster T.
/// Receivers have a parent outside T, emitters a child outside T;
/// external_parents = Pa*(rec(T)) \ T and external_children = Ch*(emi(T)) \ T.
struct TransitSignature {
    VertexSet cluster;
    VertexSet receivers;
    VertexSet emitters;
    VertexSet external_parents;
    VertexSet external_children;
};

/// One vertex (b < 0) or an offending pair.
struct ConditionWitness {
    int a = -1;
    int b = -1;
};

/// Result of evaluating the five transit-cluster conditions:
///   1. all receivers share their parents outside T
///   2. all emitters share their children outside T
///   3. every member reaches a receiver or emitter by an undirected path in
///      the interior graph
///   4. if emitters exist, every receiver has an emitter descendant
///   5. if receivers exist, every emitter has a receiver ancestor
struct TransitVerdict {
    bool is_cluster = false;
    bool conditions[5] = {false, false, false, false, false};
    int failed_condition = 0; // 1..5, or 0 when is_cluster
    std::optional<ConditionWitness> witness;
};

/// Contraction result: `graph` is the input with the cluster replaced by one
/// vertex whose parents/children are the cluster's external attachment.
struct ClusteredGraph {
    Dag graph;
    int representative = -1;
    VertexSet original_members; // indices in the source graph
    std::string representative_label;

    /// Original label -> label in `graph` (members map to the representative).
    std::string map_label(const Dag& original, const std::string& label) const;
};

/// Pa(a) \ a over the whole set, i.e. the starred parent set.
VertexSet pa_star(const Dag& g, const VertexSet& a);
VertexSet ch_star(const Dag& g, const VertexSet& a);

TransitSignature signature(const Dag& g, const VertexSet& t);

/// Induced subgraph of t with incoming edges of receivers and outgoing edges
/// of emitters removed.
Dag interior_graph(const Dag& g, const VertexSet& t);

TransitVerdict check_transit_cluster(const Dag& g, const VertexSet& t);

struct NotATransitCluster : Error {
    NotATransitCluster(const std::string& what, TransitVerdict verdict)
        : Error(what), verdict(std::move(verdict)) {}
    TransitVerdict verdict;
};

ClusteredGraph apply_clustering(const Dag& g, const VertexSet& t, const std::string& label);

/// True iff t is a transit cluster whose induced subgraph is weakly connected.
bool is_transit_component(const Dag& g, const VertexSet& t);

/// Union test for disjoint verified transit clusters:
/// Pa*(rec(S)) = Pa*(rec(T)) and Ch*(emi(S)) = Ch*(emi(T)).
bool union_compatible(const Dag& g, const VertexSet& s, const VertexSet& t);

std::string describe_verdict(const Dag& g, const TransitVerdict& v);

} // namespace transitclust

#endif

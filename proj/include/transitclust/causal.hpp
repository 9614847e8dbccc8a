#ifndef TRANSITCLUST_CAUSAL_HPP
#define TRANSITCLUST_CAUSAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "transitclust/transit.hpp"

namespace transitclust {

/// A DAG split into observed vertices and latent background vertices.
/// Latents have no parents, at most two children, and only observed children.
struct CausalDiagram {
    Dag dag;
    VertexSet observed;
    VertexSet latent;
};

CausalDiagram validate_causal_diagram(const Dag& g);
CausalDiagram validate_causal_diagram(const Dag& g, const std::vector<std::string>& latent_labels);

/// outcome = A, treatment = B; both over the diagram's vertex indexing.
struct CausalQuery {
    VertexSet outcome;
    VertexSet treatment;
};

/// Partition of all vertices (observed and latent) into confounded
/// components: observed vertices linked when a latent parent is shared,
/// latents joined to their children's block.
std::vector<VertexSet> c_components(const CausalDiagram& d);

/// Latent projection: directed part over the observed vertices, one
/// bidirected pair per two-child latent. Single-child latents vanish.
struct Admg {
    Dag directed;
    std::vector<std::pair<int, int>> bidirected; // normalized, sorted
};

Admg latent_project(const CausalDiagram& d);

/// Plain d-separation over the full graph, latents as ordinary vertices.
bool d_separated(const CausalDiagram& d, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z);

struct ClusterClass {
    bool plain = false;
    bool congested = false;
};

/// plain: every external parent of a receiver and every emitter is observed.
/// congested: the cluster sits inside one c-component and emitters are observed.
ClusterClass classify_cluster(const CausalDiagram& d, const VertexSet& t);

/// Vertex sets over the diagram's observed vertices witnessing
/// non-identifiability: two nested confounded sets sharing a root set, the
/// larger one meeting the treatment.
struct HedgeWitness {
    VertexSet root_set;
    VertexSet larger_forest;
    VertexSet smaller_forest;
};

struct IdentifyResult {
    bool identifiable = false;
    std::optional<HedgeWitness> witness;
};

/// Decides identifiability of p(outcome | do(treatment)) from the
/// observational distribution via the recursive identification procedure on
/// the latent projection; returns a hedge witness on failure.
IdentifyResult identifiable(const CausalDiagram& d, const CausalQuery& q);

/// Contraction of a transit cluster inside a diagram: latent members vanish
/// into the (observed) representative.
CausalDiagram cluster_diagram(const CausalDiagram& d, const VertexSet& t,
                              const std::string& label);

struct PreservationReport {
    ClusterClass cluster_class;
    bool id_original = false;
    bool id_clustered = false;
    bool theorem_applies = false; // plain or congested
    bool consistent = false;      // !theorem_applies || id_original == id_clustered
};

PreservationReport preservation_report(const CausalDiagram& d, const VertexSet& t,
                                       const CausalQuery& q);

/// First label among "t", "t0", "t1", ... free in the contracted graph.
std::string choose_representative_label(const Dag& g, const VertexSet& t);

} // namespace transitclust

#endif

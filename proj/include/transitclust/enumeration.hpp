#ifndef TRANSITCLUST_ENUMERATION_HPP
#define TRANSITCLUST_ENUMERATION_HPP

#include <cstddef>
#include <optional>
#include <unordered_set>
#include <vector>

#include "transitclust/transit.hpp"

namespace transitclust {

/// Vertices allowed to participate in clusters.
struct Restriction {
    VertexSet allowed;
    static Restriction all_of(const Dag& g) { return {g.full_set()}; }
};

/// All restricted transit components of a graph, sorted by
/// (size, lexicographic member order), with cached signatures.
struct ComponentInventory {
    std::vector<VertexSet> components;
    std::vector<TransitSignature> signatures; // parallel to components
    std::size_t graph_fingerprint = 0;

    std::size_t size() const { return components.size(); }
};

/// Candidate-pair scan over unique child/parent sets: for each pair, restrict
/// to mutually ancestral sets, grow the connected closure with receiver
/// in-edges and emitter out-edges cut, then keep the weak components whose
/// receivers share parents and emitters share children.
///
/// `threads` > 1 splits the candidate scan; the output is deterministic
/// either way.
ComponentInventory find_transit_components(const Dag& g, const Restriction& r, int threads = 1);

/// Streams every restricted transit cluster exactly once: the inventory's
/// components first, then unions grown depth-first. A union of a cluster and
/// a disjoint component is taken exactly when their external attachments
/// (external parents of receivers, external children of emitters) coincide;
/// that test accepts precisely the disconnected unions behind the
/// decomposition of clusters into components. Single consumer; stop whenever.
class ClusterStream {
public:
    ClusterStream(const Dag& g, const ComponentInventory& inventory);

    std::optional<VertexSet> next();

private:
    struct Frame {
        VertexSet cluster;
        VertexSet ext_pa, ext_ch; // external attachment of the cluster
        std::vector<std::size_t> remaining;
        std::size_t pos = 0;
    };

    const Dag& g_;
    const ComponentInventory& inv_;
    std::size_t emit_components_ = 0;
    std::vector<Frame> stack_;
    std::size_t root_ = 0;
    std::unordered_set<VertexSet, VertexSetHash> seen_;
};

ClusterStream find_transit_clusters(const Dag& g, const ComponentInventory& inventory);

/// Drains the stream; `limit` = 0 means no limit.
std::vector<VertexSet> collect_transit_clusters(const Dag& g, const ComponentInventory& inventory,
                                                std::size_t limit = 0);

struct OracleEntry {
    VertexSet cluster;
    bool is_component = false;
};

/// Exhaustive verification oracle: every non-empty proper subset of the
/// allowed set is checked against the five conditions directly.
/// Guarded to |V| <= 20.
std::vector<OracleEntry> brute_force_transit_clusters(const Dag& g, const Restriction& r);

struct CensusResult {
    std::size_t component_count = 0;
    std::size_t bound = 0; // |V|(|V|+1)/2 - 1
};

CensusResult census(const Dag& g);

} // namespace transitclust

#endif

#ifndef TRANSITCLUST_DAG_HPP
#define TRANSITCLUST_DAG_HPP

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "transitclust/errors.hpp"
#include "transitclust/vertex_set.hpp"

namespace transitclust {

enum class Relation { Parents, Children, Ancestors, Descendants, Neighbors, Connected };

Relation relation_from_string(const std::string& name);

/// Immutable directed acyclic graph over labeled vertices with dense indices.
///
/// Vertices are addressed by index in [0, size()); labels map 1:1 to indices.
/// Parent/child sets and the reflexive-transitive ancestor/descendant closures
/// are built once at construction, so a Dag is safe to share across threads.
class Dag {
public:
    /// Validates labels, rejects self-loops and duplicate labels, checks
    /// acyclicity (CycleDetected names a witness cycle). Duplicate edges
    /// collapse; the edge relation is a set.
    Dag(std::vector<std::string> labels,
        std::vector<std::pair<int, int>> edges,
        VertexSet latent = VertexSet());

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool has_vertex(const std::string& label) const { return index_.count(label) > 0; }
    int index_of(const std::string& label) const;

    /// Edges sorted by (tail, head).
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool has_edge(int tail, int head) const { return children_[static_cast<std::size_t>(tail)].test(head); }

    const VertexSet& parents_of(int v) const { return parents_[static_cast<std::size_t>(v)]; }
    const VertexSet& children_of(int v) const { return children_[static_cast<std::size_t>(v)]; }
    const VertexSet& ancestors_of(int v) const { return ancestors_[static_cast<std::size_t>(v)]; }
    const VertexSet& descendants_of(int v) const { return descendants_[static_cast<std::size_t>(v)]; }

    /// Vertices flagged `latent` in the input file; interpreted by the causal
    /// layer, carried verbatim everywhere else.
    const VertexSet& latent_mask() const { return latent_; }

    /// A topological order (stable: ties broken by vertex index).
    const std::vector<int>& topological_order() const { return topo_; }

    /// Relative set of `a`. Ancestors/descendants are reflexive-transitive;
    /// `inclusive` keeps the members of `a` themselves in the result.
    /// Connected means reachable ignoring edge direction.
    VertexSet relatives(const VertexSet& a, Relation kind, bool inclusive) const;

    Dag induced_subgraph(const VertexSet& w) const;

    /// Same vertices; drops every edge whose head lies in `no_in` and every
    /// edge whose tail lies in `no_out`.
    Dag edge_cut_subgraph(const VertexSet& no_in, const VertexSet& no_out) const;

    /// Weakly connected components; each set sorted by construction, the list
    /// ordered by smallest member.
    std::vector<VertexSet> connected_components() const;
    bool is_weakly_connected() const;

    std::string serialize() const;

    VertexSet empty_set() const { return VertexSet(static_cast<std::size_t>(size())); }
    VertexSet full_set() const { return VertexSet::full(static_cast<std::size_t>(size())); }

    /// Set from labels; throws UnknownVertex.
    VertexSet set_of(const std::vector<std::string>& labels) const;
    /// Parses the comma-separated label list format, e.g. "e1,r1".
    VertexSet parse_vertex_set(const std::string& csv) const;
    /// Comma-joined labels, sorted lexicographically.
    std::string format_vertex_set(const VertexSet& s) const;

    void check_subset(const VertexSet& a) const;

    bool operator==(const Dag& o) const {
        return labels_ == o.labels_ && edges_ == o.edges_ && latent_ == o.latent_;
    }
    bool operator!=(const Dag& o) const { return !(*this == o); }

    /// Stable identity token for (labels, edges); used to detect inventories
    /// replayed against the wrong graph.
    std::size_t fingerprint() const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<VertexSet> parents_, children_;
    std::vector<VertexSet> ancestors_, descendants_;
    VertexSet latent_;
    std::vector<int> topo_;
};

/// Parses the edge-list text format: `# comment`, `node <label>`,
/// `latent <label>`, `<label> -> <label>`; blank lines ignored.
/// Vertex order is declaration order, then first-mention order.
Dag parse_graph(const std::string& text);

Dag load_graph_file(const std::string& path);

bool valid_label(const std::string& label);

} // namespace transitclust

#endif

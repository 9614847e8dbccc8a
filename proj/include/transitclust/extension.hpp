#ifndef TRANSITCLUST_EXTENSION_HPP
#define TRANSITCLUST_EXTENSION_HPP

#include <string>
#include <utility>
#include <vector>

#include "transitclust/transit.hpp"

namespace transitclust {

/// The ten rewriting operations that grow a transit cluster while preserving
/// its clustered image.
enum class ExtensionOpKind {
    AddInternalEdge = 1,     // t_i -> t_j, no cycle
    InsertMediator,          // replace t_i -> t_j by t_i -> new -> t_j
    DivideVertex,            // new vertex takes over t_i's children; t_i -> new
    AddParentLeaf,           // new -> t_i, t_i not a receiver
    AddChildLeaf,            // t_i -> new, t_i not an emitter
    AddReceiver,             // new copies Pa*(rec(T)); edge new -> t_j on a rec-emi path
    AddEmitter,              // new copies Ch*(emi(T)); edge t_j -> new on a rec-emi path
    AddReceiverEmitterPair,  // both copies plus edge new1 -> new2
    AddReceiverNoEmitters,   // new copies Pa*(rec(T)); requires emi(T) empty
    AddEmitterNoReceivers,   // new copies Ch*(emi(T)); requires rec(T) empty
};

const char* extension_op_name(ExtensionOpKind kind);
ExtensionOpKind extension_op_from_name(const std::string& name);

struct ExtensionOp {
    ExtensionOpKind kind;
    std::string a;      // existing cluster member (t_i), when the op takes one
    std::string b;      // second existing member (t_j)
    std::string fresh;  // first new label
    std::string fresh2; // second new label (AddReceiverEmitterPair only)

    static ExtensionOp add_internal_edge(std::string ti, std::string tj);
    static ExtensionOp insert_mediator(std::string ti, std::string tj, std::string fresh);
    static ExtensionOp divide_vertex(std::string ti, std::string fresh);
    static ExtensionOp add_parent_leaf(std::string ti, std::string fresh);
    static ExtensionOp add_child_leaf(std::string ti, std::string fresh);
    static ExtensionOp add_receiver(std::string fresh, std::string tj);
    static ExtensionOp add_emitter(std::string tj, std::string fresh);
    static ExtensionOp add_receiver_emitter_pair(std::string fresh1, std::string fresh2);
    static ExtensionOp add_receiver_no_emitters(std::string fresh);
    static ExtensionOp add_emitter_no_receivers(std::string fresh);

    /// `op=<name> args=<comma-joined labels>`
    std::string serialize() const;
    static ExtensionOp parse(const std::string& line);

    bool operator==(const ExtensionOp& o) const {
        return kind == o.kind && a == o.a && b == o.b && fresh == o.fresh && fresh2 == o.fresh2;
    }
};

/// Applies one operation to a verified transit cluster; returns the rewritten
/// graph and the extended cluster. Receivers and emitters are recomputed from
/// the current state, never cached across rewrites.
std::pair<Dag, VertexSet> apply_extension(const Dag& g, const VertexSet& t, const ExtensionOp& op);

struct ExtensionTrace {
    Dag start_graph;
    VertexSet start_cluster;
    std::vector<ExtensionOp> ops;

    std::string serialize_ops() const;
};

std::vector<ExtensionOp> parse_ops(const std::string& text);

/// Rebuilds (g, t) from its clustered form: the trace starts at
/// (apply_clustering(g, t), {representative}) and replays to a graph
/// label-isomorphic to g, with external labels preserved exactly.
///
/// A small family of transit clusters is not constructible by the ten
/// operations (more than one vertex that is both a receiver and an emitter,
/// or receivers only attachable through non-receiver parents of receivers);
/// those raise Error with an explanation.
ExtensionTrace derive_extension_sequence(const Dag& g, const VertexSet& t);

/// Folds apply_extension over the trace; failures carry the step index.
std::pair<Dag, VertexSet> replay(const ExtensionTrace& trace);

} // namespace transitclust

#endif

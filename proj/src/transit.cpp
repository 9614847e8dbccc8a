#include "transitclust/transit.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace transitclust {

VertexSet pa_star(const Dag& g, const VertexSet& a) {
    return g.relatives(a, Relation::Parents, true) - a;
}

VertexSet ch_star(const Dag& g, const VertexSet& a) {
    return g.relatives(a, Relation::Children, true) - a;
}

namespace {

void check_cluster_bounds(const Dag& g, const VertexSet& t) {
    g.check_subset(t);
    if (t.empty()) throw EmptyCluster("cluster is empty");
    if (t.count() == static_cast<std::size_t>(g.size()))
        throw ClusterIsWholeGraph("cluster covers the whole graph");
}

} // namespace

TransitSignature signature(const Dag& g, const VertexSet& t) {
    check_cluster_bounds(g, t);
    TransitSignature sig;
    sig.cluster = t;
    sig.receivers = g.empty_set();
    sig.emitters = g.empty_set();
    for (int v : t) {
        if ((g.parents_of(v) - t).any()) sig.receivers.set(v);
        if ((g.children_of(v) - t).any()) sig.emitters.set(v);
    }
    sig.external_parents = pa_star(g, sig.receivers) - t;
    sig.external_children = ch_star(g, sig.emitters) - t;
    return sig;
}

Dag interior_graph(const Dag& g, const VertexSet& t) {
    TransitSignature sig = signature(g, t);
    return g.edge_cut_subgraph(sig.receivers, sig.emitters).induced_subgraph(t);
}

TransitVerdict check_transit_cluster(const Dag& g, const VertexSet& t) {
    if (!g.is_weakly_connected())
        throw GraphNotConnected("transit clusters are defined on connected graphs");
    TransitSignature sig = signature(g, t);
    TransitVerdict v;
    for (bool& c : v.conditions) c = true;
    // The witness belongs to the first violated condition; conditions are
    // evaluated in order, so record it only once.
    auto fail = [&](int cond, int a, int b) {
        v.conditions[cond - 1] = false;
        if (!v.witness) {
            v.failed_condition = cond;
            v.witness = ConditionWitness{a, b};
        }
    };

    // 1: receivers share their external parents.
    if (int r0 = sig.receivers.first(); r0 >= 0) {
        VertexSet common = g.parents_of(r0) - t;
        for (int r : sig.receivers)
            if ((g.parents_of(r) - t) != common) {
                fail(1, r0, r);
                break;
            }
    }

    // 2: emitters share their external children.
    if (int e0 = sig.emitters.first(); e0 >= 0) {
        VertexSet common = g.children_of(e0) - t;
        for (int e : sig.emitters)
            if ((g.children_of(e) - t) != common) {
                fail(2, e0, e);
                break;
            }
    }

    // 3: undirected reachability from receivers/emitters in the interior
    // graph (incoming edges of receivers and outgoing edges of emitters cut).
    {
        VertexSet reached = sig.receivers | sig.emitters;
        std::deque<int> queue(reached.begin(), reached.end());
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            VertexSet nb = g.empty_set();
            if (!sig.emitters.test(x)) nb |= g.children_of(x) - sig.receivers;
            if (!sig.receivers.test(x)) nb |= g.parents_of(x) - sig.emitters;
            nb &= t;
            nb -= reached;
            for (int w : nb) queue.push_back(w);
            reached |= nb;
        }
        if (!reached.contains(t)) fail(3, (t - reached).first(), -1);
    }

    // 4: with emitters present, every receiver has an emitter descendant.
    if (sig.emitters.any()) {
        for (int r : sig.receivers)
            if (!g.descendants_of(r).intersects(sig.emitters)) {
                fail(4, r, -1);
                break;
            }
    }

    // 5: with receivers present, every emitter has a receiver ancestor.
    if (sig.receivers.any()) {
        for (int e : sig.emitters)
            if (!g.ancestors_of(e).intersects(sig.receivers)) {
                fail(5, e, -1);
                break;
            }
    }

    v.is_cluster = v.conditions[0] && v.conditions[1] && v.conditions[2] && v.conditions[3] &&
                   v.conditions[4];
    return v;
}

std::string describe_verdict(const Dag& g, const TransitVerdict& v) {
    if (v.is_cluster) return "transit cluster";
    std::ostringstream out;
    out << "condition " << v.failed_condition << " violated";
    if (v.witness) {
        out << " (witness: " << g.label(v.witness->a);
        if (v.witness->b >= 0) out << ", " << g.label(v.witness->b);
        out << ")";
    }
    return out.str();
}

std::string ClusteredGraph::map_label(const Dag& original, const std::string& label) const {
    int v = original.index_of(label);
    return original_members.test(v) ? representative_label : label;
}

ClusteredGraph apply_clustering(const Dag& g, const VertexSet& t, const std::string& label) {
    TransitVerdict v = check_transit_cluster(g, t);
    if (!v.is_cluster)
        throw NotATransitCluster("not a transit cluster: " + describe_verdict(g, v), v);
    if (!valid_label(label)) throw Error("invalid representative label: '" + label + "'");

    TransitSignature sig = signature(g, t);
    std::vector<std::string> labels;
    std::vector<int> remap(static_cast<std::size_t>(g.size()), -1);
    std::vector<bool> latent_flags;
    for (int u = 0; u < g.size(); ++u) {
        if (t.test(u)) continue;
        if (g.label(u) == label)
            throw LabelCollision("representative label already in use: " + label);
        remap[static_cast<std::size_t>(u)] = static_cast<int>(labels.size());
        labels.push_back(g.label(u));
        latent_flags.push_back(g.latent_mask().test(u));
    }
    const int rep = static_cast<int>(labels.size());
    labels.push_back(label);
    latent_flags.push_back(false); // the representative is an ordinary vertex

    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : g.edges()) {
        bool ta = t.test(a), tb = t.test(b);
        if (ta && tb) continue;
        if (!ta && !tb)
            edges.emplace_back(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    }
    for (int p : sig.external_parents) edges.emplace_back(remap[static_cast<std::size_t>(p)], rep);
    for (int c : sig.external_children) edges.emplace_back(rep, remap[static_cast<std::size_t>(c)]);

    VertexSet latent(labels.size());
    for (std::size_t i = 0; i < latent_flags.size(); ++i)
        if (latent_flags[i]) latent.set(static_cast<int>(i));

    ClusteredGraph out{Dag(std::move(labels), std::move(edges), std::move(latent)), rep, t, label};
    return out; // Dag construction asserts acyclicity
}

bool is_transit_component(const Dag& g, const VertexSet& t) {
    TransitVerdict v = check_transit_cluster(g, t);
    if (!v.is_cluster) return false;
    return g.induced_subgraph(t).is_weakly_connected();
}

bool union_compatible(const Dag& g, const VertexSet& s, const VertexSet& t) {
    if (s.intersects(t)) throw NotDisjoint("clusters overlap");
    TransitVerdict vs = check_transit_cluster(g, s);
    if (!vs.is_cluster)
        throw NotATransitCluster("first set is not a transit cluster", vs);
    TransitVerdict vt = check_transit_cluster(g, t);
    if (!vt.is_cluster)
        throw NotATransitCluster("second set is not a transit cluster", vt);
    TransitSignature as = signature(g, s), at = signature(g, t);
    return pa_star(g, as.receivers) == pa_star(g, at.receivers) &&
           ch_star(g, as.emitters) == ch_star(g, at.emitters);
}

} // namespace transitclust

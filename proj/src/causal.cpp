#include "transitclust/causal.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace transitclust {

CausalDiagram validate_causal_diagram(const Dag& g) {
    const VertexSet& latent = g.latent_mask();
    for (int u : latent) {
        if (g.parents_of(u).any())
            throw LatentHasParent("latent vertex '" + g.label(u) + "' has a parent");
        if (g.children_of(u).count() > 2)
            throw LatentTooManyChildren("latent vertex '" + g.label(u) +
                                        "' has more than two children");
        if (g.children_of(u).intersects(latent)) {
            int bad = (g.children_of(u) & latent).first();
            throw LatentChildLatent("latent vertex '" + g.label(u) + "' has latent child '" +
                                    g.label(bad) + "'");
        }
    }
    return CausalDiagram{g, latent.complement(), latent};
}

CausalDiagram validate_causal_diagram(const Dag& g, const std::vector<std::string>& latent_labels) {
    VertexSet latent = g.empty_set();
    for (const auto& l : latent_labels) latent.set(g.index_of(l));
    latent |= g.latent_mask();
    Dag relabeled(g.labels(), g.edges(), latent);
    return validate_causal_diagram(relabeled);
}

std::vector<VertexSet> c_components(const CausalDiagram& d) {
    const Dag& g = d.dag;
    const int n = g.size();
    std::vector<int> root(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) root[static_cast<std::size_t>(v)] = v;
    std::function<int(int)> find = [&](int v) {
        while (root[static_cast<std::size_t>(v)] != v) {
            root[static_cast<std::size_t>(v)] =
                root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
            v = root[static_cast<std::size_t>(v)];
        }
        return v;
    };
    auto unite = [&](int a, int b) { root[static_cast<std::size_t>(find(a))] = find(b); };

    // A latent and its children share a block; nothing else links blocks.
    for (int u : d.latent)
        for (int c : g.children_of(u)) unite(u, c);

    std::vector<VertexSet> blocks;
    std::vector<int> block_of(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        int r = find(v);
        if (block_of[static_cast<std::size_t>(r)] < 0) {
            block_of[static_cast<std::size_t>(r)] = static_cast<int>(blocks.size());
            blocks.push_back(g.empty_set());
        }
        blocks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(r)])].set(v);
    }
    return blocks; // first-member order: sorted by smallest member
}

Admg latent_project(const CausalDiagram& d) {
    Admg out{d.dag.induced_subgraph(d.observed), {}};
    std::vector<int> remap(static_cast<std::size_t>(d.dag.size()), -1);
    {
        int k = 0;
        for (int v : d.observed) remap[static_cast<std::size_t>(v)] = k++;
    }
    for (int u : d.latent) {
        const VertexSet& ch = d.dag.children_of(u);
        if (ch.count() != 2) continue;
        int a = remap[static_cast<std::size_t>(ch.first())];
        int b = remap[static_cast<std::size_t>(ch.next(ch.first()))];
        out.bidirected.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.bidirected.begin(), out.bidirected.end());
    out.bidirected.erase(std::unique(out.bidirected.begin(), out.bidirected.end()),
                         out.bidirected.end());
    return out;
}

bool d_separated(const CausalDiagram& d, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z) {
    const Dag& g = d.dag;
    g.check_subset(x);
    g.check_subset(y);
    g.check_subset(z);
    if (x.intersects(y) || x.intersects(z) || y.intersects(z))
        throw SetsOverlap("d-separation query sets overlap");
    if (x.empty() || y.empty()) return true;

    // Ball-passing reachability: states are (vertex, arrived-from-child?).
    const VertexSet anc_z = g.relatives(z, Relation::Ancestors, true);
    const int n = g.size();
    std::vector<bool> seen_up(static_cast<std::size_t>(n)), seen_down(static_cast<std::size_t>(n));
    std::deque<std::pair<int, bool>> queue; // bool up = entered against edge direction
    for (int v : x) queue.emplace_back(v, true);
    while (!queue.empty()) {
        auto [v, up] = queue.front();
        queue.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        if (!z.test(v) && y.test(v)) return false;
        if (up) {
            if (!z.test(v)) {
                for (int p : g.parents_of(v)) queue.emplace_back(p, true);
                for (int c : g.children_of(v)) queue.emplace_back(c, false);
            }
        } else {
            if (!z.test(v))
                for (int c : g.children_of(v)) queue.emplace_back(c, false);
            if (anc_z.test(v)) // collider opens when a descendant is conditioned on
                for (int p : g.parents_of(v)) queue.emplace_back(p, true);
        }
    }
    return true;
}

ClusterClass classify_cluster(const CausalDiagram& d, const VertexSet& t) {
    TransitVerdict verdict = check_transit_cluster(d.dag, t);
    if (!verdict.is_cluster)
        throw NotATransitCluster("classification requires a transit cluster: " +
                                     describe_verdict(d.dag, verdict),
                                 verdict);
    TransitSignature sig = signature(d.dag, t);
    ClusterClass out;
    out.plain = d.observed.contains(pa_star(d.dag, sig.receivers) | sig.emitters);
    out.congested = false;
    for (const VertexSet& block : c_components(d))
        if (block.contains(t)) {
            out.congested = d.observed.contains(sig.emitters);
            break;
        }
    return out;
}

namespace {

// Identification machinery on the latent projection. All sets are over the
// projection's indexing; `m` is the current vertex subset.

std::vector<VertexSet> districts_within(const Admg& a, const VertexSet& m) {
    std::vector<std::vector<int>> nb(m.universe());
    for (auto [p, q] : a.bidirected)
        if (m.test(p) && m.test(q)) {
            nb[static_cast<std::size_t>(p)].push_back(q);
            nb[static_cast<std::size_t>(q)].push_back(p);
        }
    std::vector<VertexSet> out;
    VertexSet todo = m;
    for (int v = todo.first(); v >= 0; v = todo.first()) {
        VertexSet comp(m.universe());
        comp.set(v);
        std::deque<int> queue{v};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (int w : nb[static_cast<std::size_t>(x)])
                if (!comp.test(w)) {
                    comp.set(w);
                    queue.push_back(w);
                }
        }
        todo -= comp;
        out.push_back(std::move(comp));
    }
    return out;
}

// Ancestors of y (inclusive) within the induced subgraph on m; when `cut` is
// given, incoming edges of its members are removed first.
VertexSet ancestors_within(const Admg& a, const VertexSet& m, const VertexSet& y,
                           const VertexSet* cut = nullptr) {
    VertexSet out = y & m;
    std::deque<int> queue(out.begin(), out.end());
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (cut && cut->test(v)) continue; // in-edges removed
        VertexSet ps = a.directed.parents_of(v) & m;
        ps -= out;
        for (int p : ps) queue.push_back(p);
        out |= ps;
    }
    return out;
}

bool id_rec(const Admg& a, VertexSet y, VertexSet x, VertexSet m) {
    y &= m;
    x &= m;
    if (x.empty()) return true;

    VertexSet anc = ancestors_within(a, m, y);
    if (anc != m) return id_rec(a, y, x & anc, anc);

    VertexSet w = (m - x) - ancestors_within(a, m, y, &x);
    if (w.any()) return id_rec(a, y, x | w, m);

    std::vector<VertexSet> ds = districts_within(a, m - x);
    if (ds.size() > 1) {
        for (const VertexSet& s : ds)
            if (!id_rec(a, s, m - s, m)) return false;
        return true;
    }
    const VertexSet& s = ds.front();
    std::vector<VertexSet> dg = districts_within(a, m);
    if (dg.size() == 1) return false; // hedge territory
    for (const VertexSet& sp : dg) {
        if (sp == s) return true;
        if (sp.contains(s)) return id_rec(a, y, x & sp, sp);
    }
    throw std::logic_error("district containing the sub-district was not found");
}

VertexSet district_sinks(const Admg& a, const VertexSet& s) {
    VertexSet out(s.universe());
    for (int v : s)
        if (!(a.directed.children_of(v) & s).any()) out.set(v);
    return out;
}

// Hedge hull of a district D of G[An_{G[V\B]}(A)]: alternately close D's
// district and its ancestors inside the shrinking vertex set. A fixpoint
// strictly larger than D is the hull; the hull equals D exactly when the
// district's interventional factor is identifiable.
struct HullResult {
    bool stuck = false;
    VertexSet hull;
};

HullResult hedge_hull(const Admg& a, const VertexSet& d_set) {
    VertexSet m = a.directed.full_set();
    for (;;) {
        VertexSet m1(m.universe());
        for (const VertexSet& dist : districts_within(a, m))
            if (dist.contains(d_set)) {
                m1 = dist;
                break;
            }
        if (m1 == d_set) return {false, m1};
        VertexSet m2 = ancestors_within(a, m1, d_set);
        if (m2 == m1) return {true, m1};
        if (m2 == d_set) return {false, m2};
        m = m2;
    }
}

} // namespace

IdentifyResult identifiable(const CausalDiagram& d, const CausalQuery& q) {
    d.dag.check_subset(q.outcome);
    d.dag.check_subset(q.treatment);
    if (q.outcome.empty() || q.treatment.empty())
        throw Error("identifiability query requires non-empty outcome and treatment sets");
    if (q.outcome.intersects(q.treatment)) throw SetsOverlap("outcome and treatment overlap");
    if (!d.observed.contains(q.outcome) || !d.observed.contains(q.treatment))
        throw QueryOutsideObserved("query contains latent vertices");

    Admg a = latent_project(d);
    std::vector<int> to_dag;
    to_dag.reserve(static_cast<std::size_t>(a.directed.size()));
    std::vector<int> to_admg(static_cast<std::size_t>(d.dag.size()), -1);
    for (int v : d.observed) {
        to_admg[static_cast<std::size_t>(v)] = static_cast<int>(to_dag.size());
        to_dag.push_back(v);
    }
    auto down = [&](const VertexSet& s) {
        VertexSet out(static_cast<std::size_t>(a.directed.size()));
        for (int v : s) out.set(to_admg[static_cast<std::size_t>(v)]);
        return out;
    };
    auto up = [&](const VertexSet& s) {
        VertexSet out = d.dag.empty_set();
        for (int v : s) out.set(to_dag[static_cast<std::size_t>(v)]);
        return out;
    };

    VertexSet y = down(q.outcome), x = down(q.treatment);
    IdentifyResult res;
    res.identifiable = id_rec(a, y, x, a.directed.full_set());
    if (!res.identifiable) {
        // Hedge extraction: the effect factorizes over the districts of
        // G[An_{G[V\B]}(A)]; a district whose hull sticks yields the witness.
        VertexSet ystar = ancestors_within(a, a.directed.full_set() - x, y);
        for (const VertexSet& dist : districts_within(a, ystar)) {
            HullResult hull = hedge_hull(a, dist);
            if (hull.stuck) {
                res.witness =
                    HedgeWitness{up(district_sinks(a, dist)), up(hull.hull), up(dist)};
                break;
            }
        }
        if (!res.witness)
            throw std::logic_error(
                "identification failed but no hedge hull was found; the two routes disagree");
    }
    return res;
}

CausalDiagram cluster_diagram(const CausalDiagram& d, const VertexSet& t,
                              const std::string& label) {
    ClusteredGraph cg = apply_clustering(d.dag, t, label);
    return validate_causal_diagram(cg.graph);
}

std::string choose_representative_label(const Dag& g, const VertexSet& t) {
    std::string rep = "t";
    for (int k = 0;; ++k) {
        bool clash = false;
        for (int v = 0; v < g.size(); ++v)
            if (!t.test(v) && g.label(v) == rep) {
                clash = true;
                break;
            }
        if (!clash) return rep;
        rep = "t" + std::to_string(k);
    }
}

PreservationReport preservation_report(const CausalDiagram& d, const VertexSet& t,
                                       const CausalQuery& q) {
    if (t.intersects(q.outcome) || t.intersects(q.treatment))
        throw ClusterIntersectsQuery("cluster overlaps the query sets");
    PreservationReport rep;
    rep.cluster_class = classify_cluster(d, t); // validates the cluster
    rep.id_original = identifiable(d, q).identifiable;

    const std::string label = choose_representative_label(d.dag, t);
    CausalDiagram clustered = cluster_diagram(d, t, label);
    CausalQuery q2{clustered.dag.empty_set(), clustered.dag.empty_set()};
    for (int v : q.outcome) q2.outcome.set(clustered.dag.index_of(d.dag.label(v)));
    for (int v : q.treatment) q2.treatment.set(clustered.dag.index_of(d.dag.label(v)));
    rep.id_clustered = identifiable(clustered, q2).identifiable;

    rep.theorem_applies = rep.cluster_class.plain || rep.cluster_class.congested;
    rep.consistent = !rep.theorem_applies || (rep.id_original == rep.id_clustered);
    return rep;
}

} // namespace transitclust

#include "transitclust/enumeration.hpp"

#include <algorithm>
#include <deque>
#include <thread>

namespace transitclust {

namespace {

// Connected closure of `seed` (inclusive) with incoming edges of `no_in` and
// outgoing edges of `no_out` removed, computed in place on the original
// indexing.
VertexSet cut_connected(const Dag& g, const VertexSet& seed, const VertexSet& no_in,
                        const VertexSet& no_out) {
    VertexSet reached = seed;
    std::deque<int> queue(seed.begin(), seed.end());
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        VertexSet nb = g.empty_set();
        if (!no_out.test(x)) nb |= g.children_of(x) - no_in;
        if (!no_in.test(x)) nb |= g.parents_of(x) - no_out;
        nb -= reached;
        for (int w : nb) queue.push_back(w);
        reached |= nb;
    }
    return reached;
}

// Weak components of the induced subgraph on `a`.
std::vector<VertexSet> components_within(const Dag& g, const VertexSet& a) {
    std::vector<VertexSet> out;
    VertexSet todo = a;
    for (int v = todo.first(); v >= 0; v = todo.first()) {
        VertexSet comp = g.empty_set();
        comp.set(v);
        std::deque<int> queue{v};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            VertexSet nb = (g.children_of(x) | g.parents_of(x)) & a;
            nb -= comp;
            for (int w : nb) queue.push_back(w);
            comp |= nb;
        }
        todo -= comp;
        out.push_back(std::move(comp));
    }
    return out;
}

std::vector<VertexSet> unique_sets(std::vector<VertexSet> sets) {
    std::vector<VertexSet> out;
    std::unordered_set<VertexSet, VertexSetHash> seen;
    for (auto& s : sets)
        if (seen.insert(s).second) out.push_back(std::move(s));
    return out;
}

// Scan one (V_i, V_j) candidate pair; append candidate components. Every
// candidate is re-verified later, so this only has to be exhaustive.
void scan_pair(const Dag& g, const Restriction& r, const VertexSet& vi, const VertexSet& vj,
               std::vector<VertexSet>& found) {
    const VertexSet whole = g.full_set();
    VertexSet z = vj.any() ? (vi & g.relatives(vj, Relation::Ancestors, true)) : vi;
    VertexSet w = vi.any() ? (vj & g.relatives(vi, Relation::Descendants, true)) : vj;

    for (int v : z)
        if (g.parents_of(v).empty()) return;
    for (int v : w)
        if (g.children_of(v).empty()) return;
    if (z.empty() && w.empty()) return;

    VertexSet a = cut_connected(g, z | w, z, w);

    for (const VertexSet& ak : components_within(g, a)) {
        // The restriction is tested per component: a closure component that
        // stays inside R is a valid candidate even when the closure as a
        // whole strays outside.
        if (!r.allowed.contains(ak)) continue;
        if (ak == whole) continue; // clusters are proper subsets
        VertexSet zk = z & ak;
        VertexSet wk = w & ak;
        VertexSet z_pa = g.empty_set();
        if (zk.any()) {
            z_pa = whole;
            for (int v : zk) z_pa &= g.parents_of(v);
            z_pa -= ak;
        }
        VertexSet w_ch = g.empty_set();
        if (wk.any()) {
            w_ch = whole;
            for (int v : wk) w_ch &= g.children_of(v);
            w_ch -= ak;
        }
        if (z_pa == (pa_star(g, zk) - ak) && w_ch == (ch_star(g, wk) - ak))
            found.push_back(ak);
    }

    // A transit component equals the connected closure of its receivers and
    // emitters with the receiver in-edges and emitter out-edges removed (all
    // its boundary edges are of those two kinds). Pieces of the closure of
    // (Z, W) propose exact receiver/emitter sets that no candidate pair hits
    // directly, e.g. a childless receiver whose candidate child sets all
    // carry extra siblings.
    VertexSet rest = a;
    for (int s = rest.first(); s >= 0; s = rest.first()) {
        VertexSet seed = g.empty_set();
        seed.set(s);
        VertexSet piece = cut_connected(g, seed, z, w);
        rest -= piece;
        VertexSet zp = z & piece;
        VertexSet wp = w & piece;
        if (zp.empty() && wp.empty()) continue;
        VertexSet cand = cut_connected(g, zp | wp, zp, wp);
        if (cand == whole || !r.allowed.contains(cand)) continue;
        found.push_back(std::move(cand));
    }
}

} // namespace

ComponentInventory find_transit_components(const Dag& g, const Restriction& r, int threads) {
    if (!g.is_weakly_connected())
        throw GraphNotConnected("transit components are defined on connected graphs");
    g.check_subset(r.allowed);

    std::vector<VertexSet> cand_ch, cand_pa;
    cand_ch.reserve(static_cast<std::size_t>(g.size()));
    cand_pa.reserve(static_cast<std::size_t>(g.size()));
    for (int v = 0; v < g.size(); ++v) {
        cand_ch.push_back(g.children_of(v) & r.allowed);
        cand_pa.push_back(g.parents_of(v) & r.allowed);
    }
    cand_ch = unique_sets(std::move(cand_ch));
    cand_pa = unique_sets(std::move(cand_pa));

    const std::size_t pairs = cand_ch.size() * cand_pa.size();
    std::vector<VertexSet> found;
    if (threads <= 1 || pairs < 64) {
        for (const auto& vi : cand_ch)
            for (const auto& vj : cand_pa) scan_pair(g, r, vi, vj, found);
    } else {
        const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), pairs);
        std::vector<std::vector<VertexSet>> local(nt);
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < nt; ++k)
            pool.emplace_back([&, k] {
                for (std::size_t p = k; p < pairs; p += nt)
                    scan_pair(g, r, cand_ch[p / cand_pa.size()], cand_pa[p % cand_pa.size()],
                              local[k]);
            });
        for (auto& th : pool) th.join();
        for (auto& l : local) found.insert(found.end(), l.begin(), l.end());
    }

    found = unique_sets(std::move(found));
    // Final screen: candidates must pass the five conditions and be connected
    // in their induced subgraph.
    std::erase_if(found, [&](const VertexSet& c) { return !is_transit_component(g, c); });
    std::sort(found.begin(), found.end(), [&](const VertexSet& a, const VertexSet& b) {
        if (a.count() != b.count()) return a.count() < b.count();
        return g.format_vertex_set(a) < g.format_vertex_set(b);
    });

    ComponentInventory inv;
    inv.graph_fingerprint = g.fingerprint();
    inv.components = std::move(found);
    inv.signatures.reserve(inv.components.size());
    for (const auto& c : inv.components) inv.signatures.push_back(signature(g, c));
    return inv;
}

ClusterStream::ClusterStream(const Dag& g, const ComponentInventory& inventory)
    : g_(g), inv_(inventory) {
    if (inventory.graph_fingerprint != g.fingerprint())
        throw InventoryGraphMismatch("component inventory was built for a different graph");
    for (const auto& c : inv_.components) seen_.insert(c);
}

std::optional<VertexSet> ClusterStream::next() {
    if (emit_components_ < inv_.size()) return inv_.components[emit_components_++];
    const VertexSet whole = g_.full_set();
    while (true) {
        if (stack_.empty()) {
            if (root_ >= inv_.size()) return std::nullopt;
            Frame f;
            f.cluster = inv_.components[root_];
            f.ext_pa = inv_.signatures[root_].external_parents;
            f.ext_ch = inv_.signatures[root_].external_children;
            for (std::size_t j = root_ + 1; j < inv_.size(); ++j) f.remaining.push_back(j);
            ++root_;
            stack_.push_back(std::move(f));
            continue;
        }
        Frame& f = stack_.back();
        if (f.pos >= f.remaining.size()) {
            stack_.pop_back();
            continue;
        }
        const std::size_t j = f.remaining[f.pos++];
        const VertexSet& s = inv_.components[j];
        if (f.cluster.intersects(s)) continue;
        if (f.ext_pa != inv_.signatures[j].external_parents ||
            f.ext_ch != inv_.signatures[j].external_children)
            continue;
        VertexSet u = f.cluster | s;
        if (u == whole) continue;
        if (!seen_.insert(u).second) continue;

        Frame child;
        child.cluster = u;
        TransitSignature usig = signature(g_, u);
        child.ext_pa = usig.external_parents;
        child.ext_ch = usig.external_children;
        child.remaining.assign(f.remaining.begin() + static_cast<std::ptrdiff_t>(f.pos),
                               f.remaining.end());
        stack_.push_back(std::move(child));
        return u;
    }
}

ClusterStream find_transit_clusters(const Dag& g, const ComponentInventory& inventory) {
    return ClusterStream(g, inventory);
}

std::vector<VertexSet> collect_transit_clusters(const Dag& g, const ComponentInventory& inventory,
                                                std::size_t limit) {
    ClusterStream stream(g, inventory);
    std::vector<VertexSet> out;
    while (auto c = stream.next()) {
        out.push_back(std::move(*c));
        if (limit && out.size() >= limit) break;
    }
    return out;
}

std::vector<OracleEntry> brute_force_transit_clusters(const Dag& g, const Restriction& r) {
    if (g.size() > 20)
        throw GraphTooLargeForOracle("brute-force enumeration is capped at 20 vertices");
    g.check_subset(r.allowed);
    std::vector<int> pool = r.allowed.to_vector();
    std::vector<OracleEntry> out;
    const std::uint64_t total = std::uint64_t{1} << pool.size();
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        VertexSet t = g.empty_set();
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (mask & (std::uint64_t{1} << i)) t.set(pool[i]);
        if (t.count() == static_cast<std::size_t>(g.size())) continue;
        if (check_transit_cluster(g, t).is_cluster) {
            bool comp = g.induced_subgraph(t).is_weakly_connected();
            out.push_back({std::move(t), comp});
        }
    }
    std::sort(out.begin(), out.end(), [&](const OracleEntry& a, const OracleEntry& b) {
        if (a.cluster.count() != b.cluster.count()) return a.cluster.count() < b.cluster.count();
        return g.format_vertex_set(a.cluster) < g.format_vertex_set(b.cluster);
    });
    return out;
}

CensusResult census(const Dag& g) {
    if (!g.is_weakly_connected()) throw GraphNotConnected("census requires a connected graph");
    if (g.size() == 0) return {};
    CensusResult res;
    res.component_count = find_transit_components(g, Restriction::all_of(g)).size();
    const std::size_t n = static_cast<std::size_t>(g.size());
    res.bound = n * (n + 1) / 2 - 1;
    if (res.component_count > res.bound)
        throw std::logic_error("transit component count exceeds the n(n+1)/2 - 1 bound");
    return res;
}

} // namespace transitclust

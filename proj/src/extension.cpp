#include "transitclust/extension.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace transitclust {

namespace {

struct OpName {
    ExtensionOpKind kind;
    const char* name;
};

constexpr OpName kOpNames[] = {
    {ExtensionOpKind::AddInternalEdge, "add_internal_edge"},
    {ExtensionOpKind::InsertMediator, "insert_mediator"},
    {ExtensionOpKind::DivideVertex, "divide_vertex"},
    {ExtensionOpKind::AddParentLeaf, "add_parent_leaf"},
    {ExtensionOpKind::AddChildLeaf, "add_child_leaf"},
    {ExtensionOpKind::AddReceiver, "add_receiver"},
    {ExtensionOpKind::AddEmitter, "add_emitter"},
    {ExtensionOpKind::AddReceiverEmitterPair, "add_receiver_emitter_pair"},
    {ExtensionOpKind::AddReceiverNoEmitters, "add_receiver_no_emitters"},
    {ExtensionOpKind::AddEmitterNoReceivers, "add_emitter_no_receivers"},
};

} // namespace

const char* extension_op_name(ExtensionOpKind kind) {
    for (const auto& e : kOpNames)
        if (e.kind == kind) return e.name;
    throw std::logic_error("unknown extension op kind");
}

ExtensionOpKind extension_op_from_name(const std::string& name) {
    for (const auto& e : kOpNames)
        if (name == e.name) return e.kind;
    throw Error("unknown extension op: " + name);
}

ExtensionOp ExtensionOp::add_internal_edge(std::string ti, std::string tj) {
    return {ExtensionOpKind::AddInternalEdge, std::move(ti), std::move(tj), "", ""};
}
ExtensionOp ExtensionOp::insert_mediator(std::string ti, std::string tj, std::string fresh) {
    return {ExtensionOpKind::InsertMediator, std::move(ti), std::move(tj), std::move(fresh), ""};
}
ExtensionOp ExtensionOp::divide_vertex(std::string ti, std::string fresh) {
    return {ExtensionOpKind::DivideVertex, std::move(ti), "", std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_parent_leaf(std::string ti, std::string fresh) {
    return {ExtensionOpKind::AddParentLeaf, std::move(ti), "", std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_child_leaf(std::string ti, std::string fresh) {
    return {ExtensionOpKind::AddChildLeaf, std::move(ti), "", std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_receiver(std::string fresh, std::string tj) {
    return {ExtensionOpKind::AddReceiver, "", std::move(tj), std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_emitter(std::string tj, std::string fresh) {
    return {ExtensionOpKind::AddEmitter, "", std::move(tj), std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_receiver_emitter_pair(std::string fresh1, std::string fresh2) {
    return {ExtensionOpKind::AddReceiverEmitterPair, "", "", std::move(fresh1), std::move(fresh2)};
}
ExtensionOp ExtensionOp::add_receiver_no_emitters(std::string fresh) {
    return {ExtensionOpKind::AddReceiverNoEmitters, "", "", std::move(fresh), ""};
}
ExtensionOp ExtensionOp::add_emitter_no_receivers(std::string fresh) {
    return {ExtensionOpKind::AddEmitterNoReceivers, "", "", std::move(fresh), ""};
}

std::string ExtensionOp::serialize() const {
    std::vector<std::string> args;
    switch (kind) {
    case ExtensionOpKind::AddInternalEdge: args = {a, b}; break;
    case ExtensionOpKind::InsertMediator: args = {a, b, fresh}; break;
    case ExtensionOpKind::DivideVertex:
    case ExtensionOpKind::AddParentLeaf:
    case ExtensionOpKind::AddChildLeaf: args = {a, fresh}; break;
    case ExtensionOpKind::AddReceiver: args = {fresh, b}; break;
    case ExtensionOpKind::AddEmitter: args = {b, fresh}; break;
    case ExtensionOpKind::AddReceiverEmitterPair: args = {fresh, fresh2}; break;
    case ExtensionOpKind::AddReceiverNoEmitters:
    case ExtensionOpKind::AddEmitterNoReceivers: args = {fresh}; break;
    }
    std::string out = "op=";
    out += extension_op_name(kind);
    out += " args=";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i];
    }
    return out;
}

ExtensionOp ExtensionOp::parse(const std::string& line) {
    auto op_pos = line.find("op=");
    auto args_pos = line.find(" args=");
    if (op_pos != 0 || args_pos == std::string::npos)
        throw Error("malformed op line: '" + line + "'");
    std::string name = line.substr(3, args_pos - 3);
    std::string rest = line.substr(args_pos + 6);
    std::vector<std::string> args;
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) args.push_back(item);
    ExtensionOpKind kind = extension_op_from_name(name);
    auto want = [&](std::size_t k) {
        if (args.size() != k)
            throw Error("op " + name + " expects " + std::to_string(k) + " arguments");
    };
    switch (kind) {
    case ExtensionOpKind::AddInternalEdge: want(2); return add_internal_edge(args[0], args[1]);
    case ExtensionOpKind::InsertMediator: want(3); return insert_mediator(args[0], args[1], args[2]);
    case ExtensionOpKind::DivideVertex: want(2); return divide_vertex(args[0], args[1]);
    case ExtensionOpKind::AddParentLeaf: want(2); return add_parent_leaf(args[0], args[1]);
    case ExtensionOpKind::AddChildLeaf: want(2); return add_child_leaf(args[0], args[1]);
    case ExtensionOpKind::AddReceiver: want(2); return add_receiver(args[0], args[1]);
    case ExtensionOpKind::AddEmitter: want(2); return add_emitter(args[0], args[1]);
    case ExtensionOpKind::AddReceiverEmitterPair:
        want(2);
        return add_receiver_emitter_pair(args[0], args[1]);
    case ExtensionOpKind::AddReceiverNoEmitters: want(1); return add_receiver_no_emitters(args[0]);
    case ExtensionOpKind::AddEmitterNoReceivers: want(1); return add_emitter_no_receivers(args[0]);
    }
    throw std::logic_error("unreachable");
}

std::string ExtensionTrace::serialize_ops() const {
    std::string out;
    for (const auto& op : ops) {
        out += op.serialize();
        out += '\n';
    }
    return out;
}

std::vector<ExtensionOp> parse_ops(const std::string& text) {
    std::vector<ExtensionOp> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string trimmed = line.substr(b, e - b + 1);
        if (trimmed.front() == '#') continue;
        out.push_back(ExtensionOp::parse(trimmed));
    }
    return out;
}

namespace {

// Mutable copy of a graph for a single rewrite.
struct Editor {
    std::vector<std::string> labels;
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> latent;

    explicit Editor(const Dag& g)
        : labels(g.labels()), edges(g.edges()), latent(static_cast<std::size_t>(g.size())) {
        for (int v : g.latent_mask()) latent[static_cast<std::size_t>(v)] = true;
    }

    int add_vertex(const std::string& label) {
        labels.push_back(label);
        latent.push_back(false);
        return static_cast<int>(labels.size()) - 1;
    }
    void add_edge(int a, int b) { edges.emplace_back(a, b); }
    void remove_edge(int a, int b) {
        edges.erase(std::remove(edges.begin(), edges.end(), std::make_pair(a, b)), edges.end());
    }
    void remove_out_edges(int a) {
        edges.erase(std::remove_if(edges.begin(), edges.end(),
                                   [&](const std::pair<int, int>& e) { return e.first == a; }),
                    edges.end());
    }

    Dag build() const {
        VertexSet lat(labels.size());
        for (std::size_t i = 0; i < latent.size(); ++i)
            if (latent[i]) lat.set(static_cast<int>(i));
        return Dag(labels, edges, std::move(lat));
    }
};

} // namespace

std::pair<Dag, VertexSet> apply_extension(const Dag& g, const VertexSet& t, const ExtensionOp& op) {
    TransitVerdict verdict = check_transit_cluster(g, t);
    if (!verdict.is_cluster)
        throw NotATransitCluster("extension requires a transit cluster: " + describe_verdict(g, verdict),
                                 verdict);
    TransitSignature sig = signature(g, t);
    const VertexSet pa_rec = pa_star(g, sig.receivers);
    const VertexSet ch_emi = ch_star(g, sig.emitters);

    auto member = [&](const std::string& label, const char* role) {
        if (!g.has_vertex(label))
            throw OpPreconditionViolated(std::string(role) + " '" + label + "' does not exist");
        int v = g.index_of(label);
        if (!t.test(v))
            throw OpPreconditionViolated(std::string(role) + " '" + label +
                                         "' is not a cluster member");
        return v;
    };
    auto fresh_ok = [&](const std::string& label) {
        if (!valid_label(label)) throw Error("invalid fresh label: '" + label + "'");
        if (g.has_vertex(label))
            throw FreshLabelCollision("fresh label already in use: " + label);
    };
    auto on_rec_emi_path = [&](int v) {
        // v lies on a directed path from a receiver to an emitter
        return g.ancestors_of(v).intersects(sig.receivers) &&
               g.descendants_of(v).intersects(sig.emitters);
    };

    Editor ed(g);
    VertexSet t_plus(static_cast<std::size_t>(g.size()) + 2);
    for (int v : t) t_plus.set(v);
    auto shrink = [&](std::size_t n) {
        VertexSet s(n);
        for (int v : t_plus)
            if (static_cast<std::size_t>(v) < n) s.set(v);
        return s;
    };

    switch (op.kind) {
    case ExtensionOpKind::AddInternalEdge: {
        int a = member(op.a, "edge tail");
        int b = member(op.b, "edge head");
        if (a == b) throw OpPreconditionViolated("edge endpoints coincide");
        if (g.has_edge(a, b)) throw OpPreconditionViolated("edge already present");
        if (g.descendants_of(b).test(a))
            throw WouldCreateCycle("edge " + op.a + " -> " + op.b + " would close a cycle");
        ed.add_edge(a, b);
        break;
    }
    case ExtensionOpKind::InsertMediator: {
        int a = member(op.a, "edge tail");
        int b = member(op.b, "edge head");
        if (!g.has_edge(a, b)) throw OpPreconditionViolated("edge to replace is absent");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        ed.remove_edge(a, b);
        ed.add_edge(a, m);
        ed.add_edge(m, b);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::DivideVertex: {
        int a = member(op.a, "vertex");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        for (int c : g.children_of(a)) ed.add_edge(m, c);
        ed.remove_out_edges(a);
        ed.add_edge(a, m);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddParentLeaf: {
        int a = member(op.a, "vertex");
        if (sig.receivers.test(a))
            throw OpPreconditionViolated("parent leaf target '" + op.a + "' is a receiver");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        ed.add_edge(m, a);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddChildLeaf: {
        int a = member(op.a, "vertex");
        if (sig.emitters.test(a))
            throw OpPreconditionViolated("child leaf target '" + op.a + "' is an emitter");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        ed.add_edge(a, m);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddReceiver: {
        if (sig.receivers.empty() || sig.emitters.empty())
            throw OpPreconditionViolated("add_receiver requires receivers and emitters");
        int b = member(op.b, "attachment");
        if (!on_rec_emi_path(b))
            throw OpPreconditionViolated("attachment '" + op.b +
                                         "' is not on a receiver-emitter path");
        fresh_ok(op.fresh);
        for (int p : pa_rec)
            if (g.descendants_of(b).test(p))
                throw WouldCreateCycle("copied parent '" + g.label(p) + "' descends from '" +
                                       op.b + "'");
        int m = ed.add_vertex(op.fresh);
        for (int p : pa_rec) ed.add_edge(p, m);
        ed.add_edge(m, b);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddEmitter: {
        if (sig.receivers.empty() || sig.emitters.empty())
            throw OpPreconditionViolated("add_emitter requires receivers and emitters");
        int b = member(op.b, "attachment");
        if (!on_rec_emi_path(b))
            throw OpPreconditionViolated("attachment '" + op.b +
                                         "' is not on a receiver-emitter path");
        fresh_ok(op.fresh);
        for (int c : ch_emi)
            if (g.descendants_of(c).test(b))
                throw WouldCreateCycle("attachment '" + op.b + "' descends from copied child '" +
                                       g.label(c) + "'");
        int m = ed.add_vertex(op.fresh);
        ed.add_edge(b, m);
        for (int c : ch_emi) ed.add_edge(m, c);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddReceiverEmitterPair: {
        if (sig.receivers.empty() || sig.emitters.empty())
            throw OpPreconditionViolated("add_receiver_emitter_pair requires receivers and emitters");
        fresh_ok(op.fresh);
        fresh_ok(op.fresh2);
        if (op.fresh == op.fresh2) throw Error("fresh labels coincide: " + op.fresh);
        for (int c : ch_emi)
            for (int p : pa_rec)
                if (g.descendants_of(c).test(p))
                    throw WouldCreateCycle("copied child '" + g.label(c) +
                                           "' reaches copied parent '" + g.label(p) + "'");
        int r = ed.add_vertex(op.fresh);
        int e = ed.add_vertex(op.fresh2);
        for (int p : pa_rec) ed.add_edge(p, r);
        ed.add_edge(r, e);
        for (int c : ch_emi) ed.add_edge(e, c);
        t_plus.set(r);
        t_plus.set(e);
        break;
    }
    case ExtensionOpKind::AddReceiverNoEmitters: {
        if (sig.receivers.empty() || sig.emitters.any())
            throw OpPreconditionViolated(
                "add_receiver_no_emitters requires receivers and no emitters");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        for (int p : pa_rec) ed.add_edge(p, m);
        t_plus.set(m);
        break;
    }
    case ExtensionOpKind::AddEmitterNoReceivers: {
        if (sig.receivers.any() || sig.emitters.empty())
            throw OpPreconditionViolated(
                "add_emitter_no_receivers requires emitters and no receivers");
        fresh_ok(op.fresh);
        int m = ed.add_vertex(op.fresh);
        for (int c : ch_emi) ed.add_edge(m, c);
        t_plus.set(m);
        break;
    }
    }

    Dag g_plus = ed.build();
    return {std::move(g_plus), shrink(static_cast<std::size_t>(static_cast<int>(ed.labels.size())))};
}

std::pair<Dag, VertexSet> replay(const ExtensionTrace& trace) {
    Dag g = trace.start_graph;
    VertexSet t = trace.start_cluster;
    for (std::size_t i = 0; i < trace.ops.size(); ++i) {
        try {
            auto [g2, t2] = apply_extension(g, t, trace.ops[i]);
            g = std::move(g2);
            t = std::move(t2);
        } catch (const Error& err) {
            throw Error("replay failed at step " + std::to_string(i) + " (" +
                        trace.ops[i].serialize() + "): " + err.what());
        }
    }
    return {std::move(g), std::move(t)};
}

namespace {

// Derivation walks the target cluster structure and emits ops against the
// evolving replayed graph. Target vertices are referenced by their index in
// the original graph; label_of maps them to labels in the replayed graph.
struct Deriver {
    const Dag& g;
    const VertexSet& t;
    TransitSignature sig;
    ExtensionTrace trace;
    Dag cur;
    VertexSet cur_cluster;
    std::vector<std::string> label_of; // by original index; empty = not created
    VertexSet created;
    VertexSet reserved; // intermediates promised to a deferred subdivision
    int fresh_counter = 0;
    std::string rep;

    struct Scaffold {
        int from, to;           // original indices; the scaffold edge in the replay
        std::vector<int> mids;  // target path interior, from->mids...->to
    };
    std::vector<Scaffold> deferred;

    Deriver(const Dag& graph, const VertexSet& cluster, ClusteredGraph&& clustered)
        : g(graph), t(cluster), sig(signature(graph, cluster)),
          trace{std::move(clustered.graph), VertexSet(), {}},
          cur(trace.start_graph), cur_cluster(), label_of(static_cast<std::size_t>(graph.size())),
          created(graph.empty_set()), reserved(graph.empty_set()),
          rep(std::move(clustered.representative_label)) {
        trace.start_cluster = VertexSet(static_cast<std::size_t>(trace.start_graph.size()));
        trace.start_cluster.set(trace.start_graph.index_of(rep));
        cur_cluster = trace.start_cluster;
    }

    std::string fresh_label() {
        for (;;) {
            std::string cand = rep + "_" + std::to_string(fresh_counter++);
            if (!cur.has_vertex(cand)) return cand;
        }
    }

    void emit(const ExtensionOp& op) {
        auto [g2, t2] = apply_extension(cur, cur_cluster, op);
        cur = std::move(g2);
        cur_cluster = std::move(t2);
        trace.ops.push_back(op);
    }

    void mark(int v, std::string label) {
        created.set(v);
        label_of[static_cast<std::size_t>(v)] = std::move(label);
    }

    // Directed BFS inside the target cluster from `sources`, passing only
    // through plain interior vertices (neither receivers nor emitters, not yet
    // created, not reserved), stopping at the first vertex satisfying `stop`.
    // `backward` walks edges tail-ward. Returns the path source..stop.
    template <typename StopFn>
    std::vector<int> find_path(const VertexSet& sources, StopFn stop, bool backward) const {
        std::vector<int> prev(static_cast<std::size_t>(g.size()), -2);
        std::deque<int> queue;
        for (int s : sources) {
            prev[static_cast<std::size_t>(s)] = -1;
            queue.push_back(s);
        }
        auto build = [&](int v) {
            std::vector<int> path{v};
            while (prev[static_cast<std::size_t>(path.back())] != -1)
                path.push_back(prev[static_cast<std::size_t>(path.back())]);
            std::reverse(path.begin(), path.end());
            return path;
        };
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            if (stop(v)) return build(v);
            bool plain = !sig.receivers.test(v) && !sig.emitters.test(v) && !created.test(v) &&
                         !reserved.test(v);
            if (!plain && prev[static_cast<std::size_t>(v)] != -1)
                continue; // stop-check only; cannot pass through
            VertexSet nexts = (backward ? g.parents_of(v) : g.children_of(v)) & t;
            for (int w : nexts) {
                if (prev[static_cast<std::size_t>(w)] != -2) continue;
                prev[static_cast<std::size_t>(w)] = v;
                queue.push_back(w);
            }
        }
        return {};
    }

    // Replaces the scaffold edge from->to in the replay by the target path;
    // every interior vertex becomes a mediator.
    void subdivide(int from, int to, const std::vector<int>& mids) {
        std::string tail = label_of[static_cast<std::size_t>(from)];
        const std::string& head = label_of[static_cast<std::size_t>(to)];
        for (int m : mids) {
            std::string lab = fresh_label();
            emit(ExtensionOp::insert_mediator(tail, head, lab));
            reserved.reset(m);
            mark(m, lab);
            tail = lab;
        }
    }

    void realize_scaffold(int from, int to, std::vector<int> mids, bool defer) {
        if (mids.empty()) return;
        if (defer) {
            for (int m : mids) reserved.set(m);
            deferred.push_back({from, to, std::move(mids)});
        } else {
            subdivide(from, to, mids);
        }
    }

    void flush_deferred() {
        for (const auto& s : deferred) subdivide(s.from, s.to, s.mids);
        deferred.clear();
    }

    void seed_both() {
        // Globally shortest receiver-to-emitter path inside the cluster; by
        // minimality its interior avoids all receivers and emitters, so a
        // divide plus mediators realizes it without polluting any copy set.
        std::vector<int> path =
            find_path(sig.receivers, [&](int v) { return sig.emitters.test(v); }, false);
        if (path.empty())
            throw std::logic_error("no internal receiver-emitter path in a transit cluster");
        mark(path.front(), rep);
        if (path.size() > 1) {
            std::string lab = fresh_label();
            emit(ExtensionOp::divide_vertex(rep, lab));
            mark(path.back(), lab);
            subdivide(path.front(), path.back(),
                      std::vector<int>(path.begin() + 1, path.end() - 1));
        }
    }

    void place_receivers() {
        VertexSet todo = sig.receivers - created;
        while (todo.any()) {
            // Candidate paths this round: per source, shortest walk through
            // plain interior vertices to something created or to an uncreated
            // emitter. Prefer attachments that can be subdivided immediately
            // (q=0 or a non-receiver stop).
            struct Cand {
                int src;
                std::vector<int> path;
                bool safe;
            };
            std::vector<Cand> cands;
            for (int r : todo) {
                VertexSet one = g.empty_set();
                one.set(r);
                auto path = find_path(
                    one,
                    [&](int v) {
                        return v != r && (created.test(v) ||
                                          (sig.emitters.test(v) && !reserved.test(v)));
                    },
                    false);
                if (path.empty()) continue;
                int stop = path.back();
                bool safe = path.size() == 2 || !sig.receivers.test(stop);
                cands.push_back({r, std::move(path), safe});
            }
            if (cands.empty())
                throw Error("cluster is not constructible by peripheral extension: "
                            "no admissible attachment for receiver '" +
                            g.label(todo.first()) + "'");
            std::stable_sort(cands.begin(), cands.end(),
                             [](const Cand& a, const Cand& b) { return a.safe && !b.safe; });
            const Cand& c = cands.front();
            int stop = c.path.back();
            std::vector<int> mids(c.path.begin() + 1, c.path.end() - 1);
            std::string lab = fresh_label();
            if (created.test(stop)) {
                emit(ExtensionOp::add_receiver(lab, label_of[static_cast<std::size_t>(stop)]));
                mark(c.src, lab);
                realize_scaffold(c.src, stop, std::move(mids), sig.receivers.test(stop));
            } else {
                // uncreated emitter: one pair op realizes both endpoints
                std::string lab2 = fresh_label();
                emit(ExtensionOp::add_receiver_emitter_pair(lab, lab2));
                mark(c.src, lab);
                mark(stop, lab2);
                realize_scaffold(c.src, stop, std::move(mids), false);
            }
            todo = sig.receivers - created;
        }
        flush_deferred(); // safe: every receiver copy has been taken
    }

    void place_emitters() {
        VertexSet todo = sig.emitters - created;
        while (todo.any()) {
            struct Cand {
                int src;
                std::vector<int> path; // stop..src in forward orientation
                bool safe;
            };
            std::vector<Cand> cands;
            for (int e : todo) {
                VertexSet one = g.empty_set();
                one.set(e);
                auto path = find_path(one, [&](int v) { return v != e && created.test(v); }, true);
                if (path.empty()) continue;
                std::reverse(path.begin(), path.end());
                int stop = path.front();
                bool safe = path.size() == 2 || !sig.emitters.test(stop);
                cands.push_back({e, std::move(path), safe});
            }
            if (cands.empty())
                throw Error("cluster is not constructible by peripheral extension: "
                            "no admissible attachment for emitter '" +
                            g.label(todo.first()) + "'");
            std::stable_sort(cands.begin(), cands.end(),
                             [](const Cand& a, const Cand& b) { return a.safe && !b.safe; });
            const Cand& c = cands.front();
            int stop = c.path.front();
            std::vector<int> mids(c.path.begin() + 1, c.path.end() - 1);
            std::string lab = fresh_label();
            emit(ExtensionOp::add_emitter(label_of[static_cast<std::size_t>(stop)], lab));
            mark(c.src, lab);
            realize_scaffold(stop, c.src, std::move(mids), sig.emitters.test(stop));
            todo = sig.emitters - created;
        }
        flush_deferred();
    }

    void place_stragglers() {
        VertexSet todo = t - created;
        while (todo.any()) {
            bool progress = false;
            for (int v : todo) {
                // attach through an interior edge to a created neighbor
                VertexSet hosts_out = g.parents_of(v) & created; // host -> v
                if (!sig.receivers.test(v)) {
                    hosts_out -= sig.emitters;
                    if (int u = hosts_out.first(); u >= 0) {
                        std::string lab = fresh_label();
                        emit(ExtensionOp::add_child_leaf(label_of[static_cast<std::size_t>(u)], lab));
                        mark(v, lab);
                        progress = true;
                        continue;
                    }
                }
                VertexSet hosts_in = g.children_of(v) & created; // v -> host
                if (!sig.emitters.test(v)) {
                    hosts_in -= sig.receivers;
                    if (int u = hosts_in.first(); u >= 0) {
                        std::string lab = fresh_label();
                        emit(ExtensionOp::add_parent_leaf(label_of[static_cast<std::size_t>(u)], lab));
                        mark(v, lab);
                        progress = true;
                        continue;
                    }
                }
            }
            if (!progress)
                throw std::logic_error("interior connectivity violated while deriving a trace");
            todo = t - created;
        }
    }

    void add_missing_edges() {
        for (auto [a, b] : g.edges()) {
            if (!t.test(a) || !t.test(b)) continue;
            const std::string& la = label_of[static_cast<std::size_t>(a)];
            const std::string& lb = label_of[static_cast<std::size_t>(b)];
            if (!cur.has_edge(cur.index_of(la), cur.index_of(lb)))
                emit(ExtensionOp::add_internal_edge(la, lb));
        }
    }

    ExtensionTrace run() {
        if (t.count() == 1) {
            mark(t.first(), rep);
            return std::move(trace);
        }
        VertexSet both = sig.receivers & sig.emitters;
        if (both.count() >= 2)
            throw Error("cluster is not constructible by peripheral extension: " +
                        std::to_string(both.count()) +
                        " vertices are both receivers and emitters; the operations can attach "
                        "external parents and children to at most one vertex");
        if (sig.receivers.any() && sig.emitters.any()) {
            seed_both();
            place_receivers();
            place_emitters();
        } else if (sig.emitters.any()) {
            mark(sig.emitters.first(), rep);
            const VertexSet rest = sig.emitters - created;
            for (int e : rest) {
                std::string lab = fresh_label();
                emit(ExtensionOp::add_emitter_no_receivers(lab));
                mark(e, lab);
            }
        } else if (sig.receivers.any()) {
            mark(sig.receivers.first(), rep);
            const VertexSet rest = sig.receivers - created;
            for (int r : rest) {
                std::string lab = fresh_label();
                emit(ExtensionOp::add_receiver_no_emitters(lab));
                mark(r, lab);
            }
        } else {
            throw std::logic_error("transit cluster with no receivers and no emitters");
        }
        place_stragglers();
        add_missing_edges();
        return std::move(trace);
    }
};

} // namespace

ExtensionTrace derive_extension_sequence(const Dag& g, const VertexSet& t) {
    TransitVerdict verdict = check_transit_cluster(g, t);
    if (!verdict.is_cluster)
        throw NotATransitCluster("derivation requires a transit cluster: " + describe_verdict(g, verdict),
                                 verdict);

    // representative label: "t", or the first free "t<k>" among the kept vertices
    std::string rep = "t";
    for (int k = 0; ; ++k) {
        bool clash = false;
        for (int v = 0; v < g.size(); ++v)
            if (!t.test(v) && g.label(v) == rep) {
                clash = true;
                break;
            }
        if (!clash) break;
        rep = "t" + std::to_string(k);
    }

    Deriver d(g, t, apply_clustering(g, t, rep));
    return d.run();
}

} // namespace transitclust

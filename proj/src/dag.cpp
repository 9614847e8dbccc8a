#include "transitclust/dag.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace transitclust {

Relation relation_from_string(const std::string& name) {
    if (name == "parents") return Relation::Parents;
    if (name == "children") return Relation::Children;
    if (name == "ancestors") return Relation::Ancestors;
    if (name == "descendants") return Relation::Descendants;
    if (name == "neighbors") return Relation::Neighbors;
    if (name == "connected") return Relation::Connected;
    throw Error("unknown relation: " + name);
}

bool valid_label(const std::string& label) {
    if (label.empty() || label.front() == '#') return false;
    if (label.find("->") != std::string::npos) return false;
    for (char c : label)
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') return false;
    return true;
}

Dag::Dag(std::vector<std::string> labels,
         std::vector<std::pair<int, int>> edges,
         VertexSet latent)
    : labels_(std::move(labels)) {
    const int n = size();
    index_.reserve(labels_.size());
    for (int v = 0; v < n; ++v) {
        if (!valid_label(labels_[static_cast<std::size_t>(v)]))
            throw Error("invalid vertex label: '" + labels_[static_cast<std::size_t>(v)] + "'");
        if (!index_.emplace(labels_[static_cast<std::size_t>(v)], v).second)
            throw DuplicateVertexLabel("duplicate vertex label: " + labels_[static_cast<std::size_t>(v)]);
    }

    if (latent.universe() == 0 && n > 0)
        latent = VertexSet(static_cast<std::size_t>(n));
    if (latent.universe() != static_cast<std::size_t>(n))
        throw std::logic_error("Dag: latent mask universe mismatch");
    latent_ = std::move(latent);

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    parents_.assign(static_cast<std::size_t>(n), VertexSet(static_cast<std::size_t>(n)));
    children_.assign(static_cast<std::size_t>(n), VertexSet(static_cast<std::size_t>(n)));
    for (auto [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw UnknownVertex("edge endpoint out of range");
        if (a == b)
            throw SelfLoop("self-loop at vertex: " + labels_[static_cast<std::size_t>(a)]);
        children_[static_cast<std::size_t>(a)].set(b);
        parents_[static_cast<std::size_t>(b)].set(a);
    }
    edges_ = std::move(edges);

    // Kahn's algorithm; leftovers witness a cycle.
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (auto [a, b] : edges_) {
        (void)a;
        ++indeg[static_cast<std::size_t>(b)];
    }
    std::deque<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    topo_.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        int v = ready.front();
        ready.pop_front();
        topo_.push_back(v);
        for (int c : children_[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (static_cast<int>(topo_.size()) != n) {
        // Walk parents inside the remainder until a vertex repeats.
        VertexSet rest = full_set();
        for (int v : topo_) rest.reset(v);
        int v = rest.first();
        std::vector<int> walk;
        std::vector<int> seen_at(static_cast<std::size_t>(n), -1);
        while (seen_at[static_cast<std::size_t>(v)] < 0) {
            seen_at[static_cast<std::size_t>(v)] = static_cast<int>(walk.size());
            walk.push_back(v);
            v = (parents_[static_cast<std::size_t>(v)] & rest).first();
        }
        std::vector<std::string> cycle;
        for (std::size_t i = static_cast<std::size_t>(seen_at[static_cast<std::size_t>(v)]);
             i < walk.size(); ++i)
            cycle.push_back(labels_[static_cast<std::size_t>(walk[i])]);
        std::reverse(cycle.begin(), cycle.end());
        std::string msg = "cycle detected: ";
        for (const auto& l : cycle) msg += l + " -> ";
        msg += cycle.front();
        throw CycleDetected(msg, std::move(cycle));
    }

    // Reflexive-transitive closures by sweeping the topological order.
    ancestors_.assign(static_cast<std::size_t>(n), VertexSet(static_cast<std::size_t>(n)));
    descendants_.assign(static_cast<std::size_t>(n), VertexSet(static_cast<std::size_t>(n)));
    for (int v : topo_) {
        auto& an = ancestors_[static_cast<std::size_t>(v)];
        an.set(v);
        for (int p : parents_[static_cast<std::size_t>(v)]) an |= ancestors_[static_cast<std::size_t>(p)];
    }
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        auto& de = descendants_[static_cast<std::size_t>(*it)];
        de.set(*it);
        for (int c : children_[static_cast<std::size_t>(*it)])
            de |= descendants_[static_cast<std::size_t>(c)];
    }
}

int Dag::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw UnknownVertex("unknown vertex: " + label);
    return it->second;
}

void Dag::check_subset(const VertexSet& a) const {
    if (a.universe() != static_cast<std::size_t>(size()))
        throw UnknownVertex("vertex set does not belong to this graph");
}

VertexSet Dag::relatives(const VertexSet& a, Relation kind, bool inclusive) const {
    check_subset(a);
    VertexSet out = empty_set();
    switch (kind) {
    case Relation::Parents:
        for (int v : a) out |= parents_[static_cast<std::size_t>(v)];
        if (inclusive) out |= a;
        break;
    case Relation::Children:
        for (int v : a) out |= children_[static_cast<std::size_t>(v)];
        if (inclusive) out |= a;
        break;
    case Relation::Ancestors:
        for (int v : a) out |= ancestors_[static_cast<std::size_t>(v)];
        break;
    case Relation::Descendants:
        for (int v : a) out |= descendants_[static_cast<std::size_t>(v)];
        break;
    case Relation::Neighbors:
        for (int v : a) {
            out |= parents_[static_cast<std::size_t>(v)];
            out |= children_[static_cast<std::size_t>(v)];
        }
        if (inclusive) out |= a;
        break;
    case Relation::Connected: {
        // BFS ignoring direction.
        out = a;
        std::deque<int> queue(a.begin(), a.end());
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            VertexSet nb = parents_[static_cast<std::size_t>(v)] | children_[static_cast<std::size_t>(v)];
            nb -= out;
            for (int w : nb) queue.push_back(w);
            out |= nb;
        }
        break;
    }
    }
    if (!inclusive) out -= a;
    return out;
}

Dag Dag::induced_subgraph(const VertexSet& w) const {
    check_subset(w);
    std::vector<std::string> labels;
    std::vector<int> remap(static_cast<std::size_t>(size()), -1);
    VertexSet latent(w.count());
    for (int v : w) {
        remap[static_cast<std::size_t>(v)] = static_cast<int>(labels.size());
        if (latent_.test(v)) latent.set(static_cast<int>(labels.size()));
        labels.push_back(labels_[static_cast<std::size_t>(v)]);
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : edges_)
        if (w.test(a) && w.test(b))
            edges.emplace_back(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    return Dag(std::move(labels), std::move(edges), std::move(latent));
}

Dag Dag::edge_cut_subgraph(const VertexSet& no_in, const VertexSet& no_out) const {
    check_subset(no_in);
    check_subset(no_out);
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : edges_)
        if (!no_in.test(b) && !no_out.test(a)) edges.emplace_back(a, b);
    return Dag(labels_, std::move(edges), latent_);
}

std::vector<VertexSet> Dag::connected_components() const {
    std::vector<VertexSet> out;
    VertexSet todo = full_set();
    for (int v = todo.first(); v >= 0; v = todo.first()) {
        VertexSet seed = empty_set();
        seed.set(v);
        VertexSet comp = relatives(seed, Relation::Connected, true);
        todo -= comp;
        out.push_back(std::move(comp));
    }
    return out; // seeds taken in increasing order, so the list is sorted by smallest member
}

bool Dag::is_weakly_connected() const {
    if (size() == 0) return true;
    VertexSet seed = empty_set();
    seed.set(0);
    return relatives(seed, Relation::Connected, true).count() == static_cast<std::size_t>(size());
}

std::string Dag::serialize() const {
    std::ostringstream out;
    for (int v = 0; v < size(); ++v)
        out << (latent_.test(v) ? "latent " : "node ") << labels_[static_cast<std::size_t>(v)] << "\n";
    for (auto [a, b] : edges_)
        out << labels_[static_cast<std::size_t>(a)] << " -> " << labels_[static_cast<std::size_t>(b)] << "\n";
    return out.str();
}

VertexSet Dag::set_of(const std::vector<std::string>& labels) const {
    VertexSet s = empty_set();
    for (const auto& l : labels) s.set(index_of(l));
    return s;
}

VertexSet Dag::parse_vertex_set(const std::string& csv) const {
    VertexSet s = empty_set();
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        s.set(index_of(item.substr(b, e - b + 1)));
    }
    return s;
}

std::string Dag::format_vertex_set(const VertexSet& s) const {
    check_subset(s);
    std::vector<std::string> names;
    for (int v : s) names.push_back(labels_[static_cast<std::size_t>(v)]);
    std::sort(names.begin(), names.end());
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += names[i];
    }
    return out;
}

std::size_t Dag::fingerprint() const {
    std::size_t h = static_cast<std::size_t>(size());
    for (const auto& l : labels_) h = h * 131 + std::hash<std::string>{}(l);
    for (auto [a, b] : edges_)
        h = h * 1099511628211ULL + (static_cast<std::size_t>(a) << 20) + static_cast<std::size_t>(b);
    return h ^ latent_.hash();
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

Dag parse_graph(const std::string& text) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> index;
    VertexSet latent_placeholder; // filled after labels are known
    std::vector<bool> latent_flags;
    std::vector<std::pair<int, int>> edges;

    auto declare = [&](const std::string& label, bool is_latent, bool explicit_decl, int line) {
        if (!valid_label(label))
            throw SyntaxError(line, "invalid label: '" + label + "'");
        auto it = index.find(label);
        if (it != index.end()) {
            if (explicit_decl)
                throw DuplicateVertexLabel("line " + std::to_string(line) +
                                           ": duplicate vertex label: " + label);
            return it->second;
        }
        int v = static_cast<int>(labels.size());
        labels.push_back(label);
        latent_flags.push_back(is_latent);
        index.emplace(label, v);
        return v;
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto arrow = line.find("->");
        if (arrow != std::string::npos) {
            std::string lhs = trim(line.substr(0, arrow));
            std::string rhs = trim(line.substr(arrow + 2));
            if (lhs.empty() || rhs.empty())
                throw SyntaxError(line_no, "malformed edge: '" + line + "'");
            if (!valid_label(lhs) || !valid_label(rhs))
                throw SyntaxError(line_no, "invalid label in edge: '" + line + "'");
            int a = declare(lhs, false, false, line_no);
            int b = declare(rhs, false, false, line_no);
            if (a == b)
                throw SelfLoop("line " + std::to_string(line_no) + ": self-loop at vertex: " + lhs);
            edges.emplace_back(a, b);
            continue;
        }
        auto toks = split_ws(line);
        if (toks.size() == 2 && (toks[0] == "node" || toks[0] == "latent")) {
            declare(toks[1], toks[0] == "latent", true, line_no);
            continue;
        }
        throw SyntaxError(line_no, "unrecognized line: '" + line + "'");
    }

    VertexSet latent(labels.size());
    for (std::size_t v = 0; v < latent_flags.size(); ++v)
        if (latent_flags[v]) latent.set(static_cast<int>(v));
    return Dag(std::move(labels), std::move(edges), std::move(latent));
}

Dag load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

} // namespace transitclust

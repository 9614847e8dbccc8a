#include "transitclust/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "transitclust/dot.hpp"
#include "transitclust/enumeration.hpp"
#include "transitclust/extension.hpp"

namespace transitclust::cli {

namespace {

using nlohmann::json;

struct Options {
    std::string graph_path;
    std::string cluster;
    std::string label;
    std::string restrict_spec;
    std::string treat;
    std::string outcome;
    std::string script;
    std::string emit_start;
    std::size_t limit = 0;
    int threads = 1;
    bool per_component = false;
    bool components_only = false;
    bool count_only = false;
    bool as_json = false;
};

Restriction parse_restriction(const Dag& g, const std::string& spec) {
    if (spec.empty()) return Restriction::all_of(g);
    std::ifstream in(spec);
    if (in) {
        VertexSet allowed = g.empty_set();
        std::string tok;
        while (in >> tok)
            if (tok.front() != '#') allowed.set(g.index_of(tok));
        return {allowed};
    }
    return {g.parse_vertex_set(spec)};
}

json set_to_json(const Dag& g, const VertexSet& s) {
    json arr = json::array();
    std::vector<std::string> names;
    for (int v : s) names.push_back(g.label(v));
    std::sort(names.begin(), names.end());
    for (auto& n : names) arr.push_back(n);
    return arr;
}

// Weak components as standalone graphs, or the whole graph when the flag is
// off. Labels survive the split, so results read back identically.
std::vector<Dag> component_views(const Dag& g, bool per_component) {
    if (!per_component) return {g};
    std::vector<Dag> out;
    for (const VertexSet& comp : g.connected_components()) out.push_back(g.induced_subgraph(comp));
    return out;
}

int run_components(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    json jcomponents = json::array();
    std::size_t total = 0;
    std::vector<std::string> lines;
    for (const Dag& view : component_views(g, opt.per_component)) {
        ComponentInventory inv =
            find_transit_components(view, parse_restriction(view, opt.restrict_spec), opt.threads);
        total += inv.size();
        for (const auto& c : inv.components) {
            lines.push_back(view.format_vertex_set(c));
            jcomponents.push_back(set_to_json(view, c));
        }
    }
    if (opt.as_json) {
        json j{{"count", total}};
        if (!opt.count_only) j["components"] = jcomponents;
        out << j.dump(2) << "\n";
    } else if (opt.count_only) {
        out << total << "\n";
    } else {
        for (const auto& l : lines) out << l << "\n";
    }
    return 0;
}

int run_clusters(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    json jclusters = json::array();
    std::size_t total = 0;
    std::vector<std::string> lines;
    for (const Dag& view : component_views(g, opt.per_component)) {
        ComponentInventory inv =
            find_transit_components(view, parse_restriction(view, opt.restrict_spec), opt.threads);
        if (opt.components_only) {
            for (const auto& c : inv.components) {
                ++total;
                lines.push_back(view.format_vertex_set(c));
                jclusters.push_back(set_to_json(view, c));
            }
            continue;
        }
        ClusterStream stream(view, inv);
        while (auto c = stream.next()) {
            ++total;
            lines.push_back(view.format_vertex_set(*c));
            jclusters.push_back(set_to_json(view, *c));
            if (opt.limit && total >= opt.limit) break;
        }
        if (opt.limit && total >= opt.limit) break;
    }
    if (opt.as_json) {
        json j{{"count", total}};
        if (!opt.count_only) j["clusters"] = jclusters;
        out << j.dump(2) << "\n";
    } else if (opt.count_only) {
        out << total << "\n";
    } else {
        for (const auto& l : lines) out << l << "\n";
    }
    return 0;
}

// With --per-component, checks inside the weak component holding the cluster.
std::pair<Dag, VertexSet> cluster_view(const Dag& g, const std::string& cluster_csv,
                                        bool per_component) {
    VertexSet t = g.parse_vertex_set(cluster_csv);
    if (!per_component) return {g, t};
    for (const VertexSet& comp : g.connected_components()) {
        if (comp.contains(t)) {
            Dag view = g.induced_subgraph(comp);
            return {view, view.set_of([&] {
                        std::vector<std::string> names;
                        for (int v : t) names.push_back(g.label(v));
                        return names;
                    }())};
        }
        if (comp.intersects(t))
            throw Error("cluster spans more than one weakly connected component");
    }
    throw Error("cluster not found in any component");
}

int run_check(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    auto [view, t] = cluster_view(g, opt.cluster, opt.per_component);
    TransitVerdict v = check_transit_cluster(view, t);
    if (opt.as_json) {
        TransitSignature sig = signature(view, t);
        json j{{"is_cluster", v.is_cluster},
               {"conditions",
                {v.conditions[0], v.conditions[1], v.conditions[2], v.conditions[3],
                 v.conditions[4]}},
               {"receivers", set_to_json(view, sig.receivers)},
               {"emitters", set_to_json(view, sig.emitters)},
               {"external_parents", set_to_json(view, sig.external_parents)},
               {"external_children", set_to_json(view, sig.external_children)}};
        if (!v.is_cluster) {
            j["failed_condition"] = v.failed_condition;
            if (v.witness) {
                json w = json::array();
                w.push_back(view.label(v.witness->a));
                if (v.witness->b >= 0) w.push_back(view.label(v.witness->b));
                j["witness"] = w;
            }
        }
        out << j.dump(2) << "\n";
    } else if (v.is_cluster) {
        out << "TRANSIT CLUSTER: yes\n";
    } else {
        out << "TRANSIT CLUSTER: no (" << describe_verdict(view, v) << ")\n";
    }
    return 0;
}

int run_contract(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    VertexSet t = g.parse_vertex_set(opt.cluster);
    std::string label = opt.label.empty() ? choose_representative_label(g, t) : opt.label;
    ClusteredGraph cg = apply_clustering(g, t, label);
    if (opt.as_json) {
        json mapping = json::object();
        for (int v = 0; v < g.size(); ++v) mapping[g.label(v)] = cg.map_label(g, g.label(v));
        out << json{{"graph", cg.graph.serialize()},
                    {"representative", cg.representative_label},
                    {"mapping", mapping}}
                   .dump(2)
            << "\n";
    } else {
        out << cg.graph.serialize();
    }
    return 0;
}

int run_classify(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    CausalDiagram d = validate_causal_diagram(g);
    ClusterClass cls = classify_cluster(d, g.parse_vertex_set(opt.cluster));
    if (opt.as_json)
        out << json{{"plain", cls.plain}, {"congested", cls.congested}}.dump(2) << "\n";
    else
        out << "plain=" << (cls.plain ? "true" : "false")
            << " congested=" << (cls.congested ? "true" : "false") << "\n";
    return 0;
}

CausalQuery parse_query(const Dag& g, const Options& opt) {
    if (opt.treat.empty() || opt.outcome.empty())
        throw Error("--treat and --outcome are required");
    return {g.parse_vertex_set(opt.outcome), g.parse_vertex_set(opt.treat)};
}

int run_identify(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    CausalDiagram d = validate_causal_diagram(g);
    IdentifyResult res = identifiable(d, parse_query(g, opt));
    if (opt.as_json) {
        json j{{"identifiable", res.identifiable}};
        if (res.witness) {
            j["hedge"] = {{"root_set", set_to_json(g, res.witness->root_set)},
                          {"forest", set_to_json(g, res.witness->larger_forest)},
                          {"subforest", set_to_json(g, res.witness->smaller_forest)}};
        }
        out << j.dump(2) << "\n";
    } else if (res.identifiable) {
        out << "IDENTIFIABLE\n";
    } else {
        out << "NOT IDENTIFIABLE\n";
        out << "hedge root set: " << g.format_vertex_set(res.witness->root_set) << "\n";
        out << "hedge forest: " << g.format_vertex_set(res.witness->larger_forest) << "\n";
        out << "hedge subforest: " << g.format_vertex_set(res.witness->smaller_forest) << "\n";
    }
    return 0;
}

int run_preserve(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    CausalDiagram d = validate_causal_diagram(g);
    PreservationReport rep =
        preservation_report(d, g.parse_vertex_set(opt.cluster), parse_query(g, opt));
    if (opt.as_json) {
        out << json{{"plain", rep.cluster_class.plain},
                    {"congested", rep.cluster_class.congested},
                    {"theorem_applies", rep.theorem_applies},
                    {"identifiable_original", rep.id_original},
                    {"identifiable_clustered", rep.id_clustered},
                    {"consistent", rep.consistent}}
                   .dump(2)
            << "\n";
    } else {
        auto b = [](bool x) { return x ? "true" : "false"; };
        out << "plain=" << b(rep.cluster_class.plain)
            << " congested=" << b(rep.cluster_class.congested) << "\n"
            << "theorem_applies=" << b(rep.theorem_applies) << "\n"
            << "identifiable_original=" << b(rep.id_original) << "\n"
            << "identifiable_clustered=" << b(rep.id_clustered) << "\n"
            << "consistent=" << b(rep.consistent) << "\n";
    }
    return 0;
}

int run_derive(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    VertexSet t = g.parse_vertex_set(opt.cluster);
    ExtensionTrace trace = derive_extension_sequence(g, t);
    const std::string rep =
        trace.start_graph.label(trace.start_cluster.first());
    if (!opt.emit_start.empty()) {
        std::ofstream f(opt.emit_start);
        if (!f) throw Error("cannot write start graph: " + opt.emit_start);
        f << trace.start_graph.serialize();
    }
    if (opt.as_json) {
        json ops = json::array();
        for (const auto& op : trace.ops) ops.push_back(op.serialize());
        out << json{{"start_graph", trace.start_graph.serialize()},
                    {"start_cluster", rep},
                    {"ops", ops}}
                   .dump(2)
            << "\n";
    } else {
        out << "# start cluster: " << rep << "\n";
        out << trace.serialize_ops();
    }
    return 0;
}

int run_extend(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    VertexSet t = g.parse_vertex_set(opt.cluster);
    std::ifstream in(opt.script);
    if (!in) throw Error("cannot open script: " + opt.script);
    std::ostringstream buf;
    buf << in.rdbuf();
    ExtensionTrace trace{g, t, parse_ops(buf.str())};
    auto [g2, t2] = replay(trace);
    if (opt.as_json) {
        out << json{{"graph", g2.serialize()}, {"cluster", set_to_json(g2, t2)}}.dump(2) << "\n";
    } else {
        out << "# cluster: " << g2.format_vertex_set(t2) << "\n";
        out << g2.serialize();
    }
    return 0;
}

int run_census(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    json jparts = json::array();
    std::vector<std::string> lines;
    for (const Dag& view : component_views(g, opt.per_component)) {
        CensusResult res = census(view);
        lines.push_back("components: " + std::to_string(res.component_count) +
                        "\nbound: " + std::to_string(res.bound));
        jparts.push_back({{"components", res.component_count}, {"bound", res.bound}});
    }
    if (opt.as_json) {
        out << (opt.per_component ? json{{"census", jparts}} : jparts.front()).dump(2) << "\n";
    } else {
        for (const auto& l : lines) out << l << "\n";
    }
    return 0;
}

int run_dot(const Options& opt, std::ostream& out) {
    Dag g = load_graph_file(opt.graph_path);
    if (!opt.cluster.empty()) {
        VertexSet t = g.parse_vertex_set(opt.cluster);
        std::string label = opt.label.empty() ? choose_representative_label(g, t) : opt.label;
        out << export_dot(apply_clustering(g, t, label));
    } else {
        out << export_dot(g);
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"transit cluster toolkit: find, verify, apply and extend transit clusters "
                 "in DAGs, and decide causal-effect identifiability"};
    app.require_subcommand(1);
    Options opt;

    auto add_graph = [&](CLI::App* sub) {
        sub->add_option("graph", opt.graph_path, "edge-list graph file")->required();
        sub->add_flag("--json", opt.as_json, "JSON output");
    };

    CLI::App* components = app.add_subcommand("components", "list all transit components");
    add_graph(components);
    components->add_option("--restrict", opt.restrict_spec, "allowed vertices (csv or file)");
    components->add_flag("--per-component", opt.per_component,
                         "run each weakly connected component separately");
    components->add_option("--threads", opt.threads, "parallel candidate scanning");
    components->add_flag("--count", opt.count_only, "print only the count");

    CLI::App* clusters = app.add_subcommand("clusters", "stream all transit clusters");
    add_graph(clusters);
    clusters->add_option("--restrict", opt.restrict_spec, "allowed vertices (csv or file)");
    clusters->add_flag("--components-only", opt.components_only, "list transit components only");
    clusters->add_option("--limit", opt.limit, "stop after N clusters");
    clusters->add_flag("--count", opt.count_only, "print only the count");
    clusters->add_flag("--per-component", opt.per_component,
                       "run each weakly connected component separately");
    clusters->add_option("--threads", opt.threads, "parallel candidate scanning");

    CLI::App* check = app.add_subcommand("check", "verify the five transit-cluster conditions");
    add_graph(check);
    check->add_option("--cluster", opt.cluster, "cluster as comma-separated labels")->required();
    check->add_flag("--per-component", opt.per_component,
                    "check inside the component holding the cluster");

    CLI::App* contract = app.add_subcommand("contract", "replace a transit cluster by one vertex");
    add_graph(contract);
    contract->add_option("--cluster", opt.cluster, "cluster as comma-separated labels")->required();
    contract->add_option("--label", opt.label, "representative label");

    CLI::App* classify = app.add_subcommand("classify", "plain/congested classification");
    add_graph(classify);
    classify->add_option("--cluster", opt.cluster, "cluster as comma-separated labels")->required();

    CLI::App* identify = app.add_subcommand("identify", "causal-effect identifiability");
    add_graph(identify);
    identify->add_option("--treat", opt.treat, "treatment vertices (csv)")->required();
    identify->add_option("--outcome", opt.outcome, "outcome vertices (csv)")->required();

    CLI::App* preserve =
        app.add_subcommand("preserve", "identifiability preservation report for a cluster");
    add_graph(preserve);
    preserve->add_option("--cluster", opt.cluster, "cluster as comma-separated labels")->required();
    preserve->add_option("--treat", opt.treat, "treatment vertices (csv)")->required();
    preserve->add_option("--outcome", opt.outcome, "outcome vertices (csv)")->required();

    CLI::App* derive = app.add_subcommand("derive", "derive a peripheral-extension trace");
    add_graph(derive);
    derive->add_option("--cluster", opt.cluster, "cluster as comma-separated labels")->required();
    derive->add_option("--emit-start", opt.emit_start, "write the contracted start graph here");

    CLI::App* extend = app.add_subcommand("extend", "replay a peripheral-extension script");
    add_graph(extend);
    extend->add_option("--cluster", opt.cluster, "start cluster (csv)")->required();
    extend->add_option("--script", opt.script, "op script file")->required();

    CLI::App* census_cmd = app.add_subcommand("census", "transit component count and bound");
    add_graph(census_cmd);
    census_cmd->add_flag("--per-component", opt.per_component,
                         "run each weakly connected component separately");

    CLI::App* dot = app.add_subcommand("dot", "DOT export");
    add_graph(dot);
    dot->add_option("--cluster", opt.cluster, "contract this cluster first (csv)");
    dot->add_option("--label", opt.label, "representative label");

    std::vector<const char*> argv;
    argv.push_back("transitclust");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::stringstream ign;
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (components->parsed()) return run_components(opt, out);
        if (clusters->parsed()) return run_clusters(opt, out);
        if (check->parsed()) return run_check(opt, out);
        if (contract->parsed()) return run_contract(opt, out);
        if (classify->parsed()) return run_classify(opt, out);
        if (identify->parsed()) return run_identify(opt, out);
        if (preserve->parsed()) return run_preserve(opt, out);
        if (derive->parsed()) return run_derive(opt, out);
        if (extend->parsed()) return run_extend(opt, out);
        if (census_cmd->parsed()) return run_census(opt, out);
        if (dot->parsed()) return run_dot(opt, out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace transitclust::cli

#include "transitclust/dot.hpp"

#include <sstream>

namespace transitclust {

std::string export_dot(const Dag& g) {
    std::ostringstream out;
    out << "digraph {\n";
    for (int v = 0; v < g.size(); ++v)
        out << "  \"" << g.label(v) << "\" [shape="
            << (g.latent_mask().test(v) ? "box" : "ellipse") << "];\n";
    for (auto [a, b] : g.edges())
        out << "  \"" << g.label(a) << "\" -> \"" << g.label(b) << "\";\n";
    out << "}\n";
    return out.str();
}

std::string export_dot(const CausalDiagram& d) { return export_dot(d.dag); }

std::string export_dot(const ClusteredGraph& cg) { return export_dot(cg.graph); }

} // namespace transitclust

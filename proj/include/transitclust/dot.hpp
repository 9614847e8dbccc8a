#ifndef TRANSITCLUST_DOT_HPP
#define TRANSITCLUST_DOT_HPP

#include <string>

#include "transitclust/causal.hpp"

namespace transitclust {

/// Latent vertices render as boxes, observed ones as ellipses.
std::string export_dot(const Dag& g);
std::string export_dot(const CausalDiagram& d);
std::string export_dot(const ClusteredGraph& cg);

} // namespace transitclust

#endif

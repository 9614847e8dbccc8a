#ifndef TRANSITCLUST_CLI_HPP
#define TRANSITCLUST_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace transitclust::cli {

/// Runs one CLI invocation. Exit code 0 on success, 1 on domain errors
/// (reported on `err`), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace transitclust::cli

#endif

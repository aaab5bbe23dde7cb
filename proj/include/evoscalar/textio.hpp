#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace evo::textio {

// Rows of a two-column comma-separated table with the given header (blank
// lines and `#` comments skipped). InputError(format) on malformed input;
// `what` prefixes the messages.
std::vector<std::pair<double, double>> read_two_columns(std::istream& in, const std::string& header,
                                                        const std::string& what);

}  // namespace evo::textio

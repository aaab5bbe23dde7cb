#include "evoscalar/textio.hpp"

#include <istream>
#include <stdexcept>

#include "evoscalar/error.hpp"

namespace evo::textio {

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r') out += c;
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> read_two_columns(std::istream& in, const std::string& header,
                                                        const std::string& what) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    if (!seen_header) {
      if (body != header) {
        throw InputError(reason::kFormat, what + ": expected header `" + header + "` on line " + std::to_string(lineno));
      }
      seen_header = true;
      continue;
    }
    auto comma = body.find(',');
    if (comma == std::string::npos) throw InputError(reason::kFormat, what + ": missing comma on line " + std::to_string(lineno));
    try {
      std::size_t p1 = 0, p2 = 0;
      std::string a = body.substr(0, comma), b = body.substr(comma + 1);
      double x = std::stod(a, &p1);
      double y = std::stod(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
      rows.emplace_back(x, y);
    } catch (const std::logic_error&) {
      throw InputError(reason::kFormat, what + ": unparsable number on line " + std::to_string(lineno));
    }
  }
  if (!seen_header) throw InputError(reason::kFormat, what + ": empty input");
  return rows;
}

}  // namespace evo::textio

#include "wsfit/zeros.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wsfit/errors.hpp"

namespace wsfit {

ZeroTable ZeroTable::prefix(std::size_t n) const {
  if (n > values.size())
    throw input_error("zero table holds " + std::to_string(values.size()) +
                      " values, " + std::to_string(n) + " requested");
  ZeroTable out;
  out.values.assign(values.begin(), values.begin() + static_cast<long>(n));
  out.source = source;
  return out;
}

ZeroTable load_zeros(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open zero table: " + path);

  ZeroTable table;
  table.source = path;
  table.values.reserve(n);

  std::string line;
  std::size_t lineno = 0;
  while (table.values.size() < n && std::getline(in, line)) {
    ++lineno;
    // strip comments and surrounding whitespace
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);

    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE)
      throw input_error(path + ": unparseable value at line " +
                        std::to_string(lineno) + ": '" + token + "'");
    if (!table.values.empty() && value <= table.values.back())
      throw input_error(path + ": non-monotone at line " + std::to_string(lineno));
    table.values.push_back(value);
  }

  if (table.values.size() < n)
    throw input_error(path + ": only " + std::to_string(table.values.size()) +
                      " values, " + std::to_string(n) + " requested");
  return table;
}

double sum_of_squares(const ZeroTable& table) {
  double total = 0.0;
  for (double t : table.values) total += t * t;
  return total;
}

}  // namespace wsfit

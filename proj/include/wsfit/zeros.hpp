#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wsfit {

// Ordered table of nontrivial Riemann zero ordinates t_k, used as fit targets.
// Immutable after load; safe to share across threads.
struct ZeroTable {
  std::vector<double> values;  // strictly increasing, all > 14
  std::string source;          // provenance (file path or description)

  std::size_t count() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }

  // Returns the table truncated to its first n entries.
  ZeroTable prefix(std::size_t n) const;
};

// Reads the first n zero ordinates from a text file (one decimal value per
// line, '#' comments ignored). Throws input_error with a line number on a
// missing file, too few values, an unparseable line, or a non-monotone
// sequence. n = 0 yields an empty table.
ZeroTable load_zeros(const std::string& path, std::size_t n);

// Sum of t_k^2 over the whole table.
double sum_of_squares(const ZeroTable& table);

}  // namespace wsfit

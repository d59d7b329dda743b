#pragma once

#include <vector>

namespace semfuzz {

// Probability that a draw from a exceeds a draw from b, ties counting one half.
// Throws ConfigError when either sample is empty.
double vargha_delaney_a12(const std::vector<double>& a, const std::vector<double>& b);

struct MannWhitney {
  double u = 0.0;   // U statistic of sample a: #{a > b} + 0.5 #{a = b}
  double p = 1.0;   // two-sided
  bool exact = false;
};

// Exact permutation distribution (midranks under ties) when |a|·|b| <= kExactLimit, otherwise the
// tie-corrected normal approximation with continuity correction. Throws ConfigError for samples below 3.
inline constexpr int kExactLimit = 400;
MannWhitney mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);
MannWhitney mann_whitney_u_normal(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> xs);
double mean(const std::vector<double>& xs);

}  // namespace semfuzz

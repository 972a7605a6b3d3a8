#pragma once

#include <cstdint>
#include <optional>

#include "nchardy/algebra.hpp"

namespace nchardy {

struct SzegoReport {
    double det_w = 0.0;
    double inf_estimate = 0.0;
    std::optional<double> oracle_value;
    double relative_gap = 0.0;   // (inf_estimate - det_w) / max(det_w, floor)
    double p = 0.0;
    int iterations = 0;
    Element minimizer;
    double constraint_residual = 0.0;  // | Delta(Phi(minimizer)) - 1 |
};

/// Projected gradient descent for inf{ tau(w |a|^p) : a in A,
/// Delta(Phi(a)) >= 1 }. The constraint is kept active by a log-parameterized
/// positive diagonal with zero log-sum; multi-start (8 starts by default).
SzegoReport szego_infimum(const Element& w, double p, int budget, std::uint64_t seed,
                          int starts = 8);

/// Analytic p = 2 oracle for the fully triangular flag: value (det w)^{1/n}
/// with minimizer delta * c^{-1} from the upper-triangular factor w = c c*.
std::pair<double, Element> closed_form_p2(const Element& w);

/// Monte-Carlo lower-envelope oracle: min over sampled a in A rescaled to
/// Delta(Phi(a)) = 1 of tau(w |a|^p). Nonincreasing in `samples` for a fixed
/// seed (single-stream seed extension).
double brute_force_infimum(const Element& w, double p, int samples, std::uint64_t seed);

}  // namespace nchardy

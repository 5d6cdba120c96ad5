#pragma once

#include <vector>

#include "ccdc/design.hpp"
#include "ccdc/rational.hpp"

namespace ccdc {

// Closed-form loads for a parameter set, all exact. Per-round figures are
// in units of T (bits divided by the intermediate-value size).
struct LoadFormulaResult {
    int computation_load = 0;                  // r = s
    Rational communication_load;               // L
    std::vector<Rational> per_round_pair_bits; // rounds 1..s-1, coded-pair exchange
    Rational final_round_bits;                 // round s, packet-combination exchange
    std::vector<Rational> per_round_combo_bits;// rounds 1..s, all-combination strategy
};

// r: every value is computed s times.
int computation_load(const DesignParams& params);

// L = (1/2X) * sum_{g=1}^{s-1} e_g(x-1) + s/(X(2s-1)) * e_s(x-1), where
// e_g is the elementary symmetric polynomial in (x_1-1, ..., x_s-1).
Rational communication_load_formula(const DesignParams& params);

// Round g < s under the coded-pair exchange: (eta1*eta2*X/2) * e_g(x-1)
// units of T.
Rational round_pair_bits(const DesignParams& params, int gamma);

// Final round: s*eta1*eta2*X*e_s(x-1) / (2s-1) units of T.
Rational round_final_bits(const DesignParams& params);

// Round g under the all-combination strategy:
// (g/(2g-1)) * eta1*eta2*X * e_g(x-1) units of T; equals
// round_final_bits at g = s.
Rational round_combo_bits(const DesignParams& params, int gamma);

LoadFormulaResult load_formula(const DesignParams& params);

}  // namespace ccdc

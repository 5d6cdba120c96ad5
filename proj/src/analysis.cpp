#include "ccdc/analysis.hpp"

#include <stdexcept>

namespace ccdc {

namespace {

// e_g(x_1-1, ..., x_s-1) for g = 0..s via the usual product recurrence.
std::vector<Rational> elementary_symmetric(const DesignParams& params) {
    std::vector<Rational> e(params.s + 1);
    e[0] = Rational(1);
    for (int i = 0; i < params.s; ++i) {
        Rational v(params.x[i] - 1);
        for (int g = i + 1; g >= 1; --g) e[g] = e[g] + e[g - 1] * v;
    }
    return e;
}

}  // namespace

int computation_load(const DesignParams& params) {
    params.validate();
    return params.s;
}

Rational communication_load_formula(const DesignParams& params) {
    params.validate();
    auto e = elementary_symmetric(params);
    Rational x_total((std::int64_t)params.num_cells());
    Rational pair_sum;
    for (int g = 1; g <= params.s - 1; ++g) pair_sum += e[g];
    Rational load = pair_sum / (Rational(2) * x_total);
    load += Rational(params.s) * e[params.s] / (x_total * Rational(2 * params.s - 1));
    return load;
}

Rational round_pair_bits(const DesignParams& params, int gamma) {
    params.validate();
    if (gamma < 1 || gamma > params.s - 1)
        throw std::out_of_range("round_pair_bits: round must be in 1..s-1");
    auto e = elementary_symmetric(params);
    Rational eta((std::int64_t)params.eta1 * params.eta2);
    return eta * Rational(params.num_cells()) * e[gamma] / Rational(2);
}

Rational round_final_bits(const DesignParams& params) {
    params.validate();
    auto e = elementary_symmetric(params);
    Rational eta((std::int64_t)params.eta1 * params.eta2);
    return Rational(params.s) * eta * Rational(params.num_cells()) * e[params.s] /
           Rational(2 * params.s - 1);
}

Rational round_combo_bits(const DesignParams& params, int gamma) {
    params.validate();
    if (gamma < 1 || gamma > params.s)
        throw std::out_of_range("round_combo_bits: round must be in 1..s");
    auto e = elementary_symmetric(params);
    Rational eta((std::int64_t)params.eta1 * params.eta2);
    return Rational(gamma) * eta * Rational(params.num_cells()) * e[gamma] /
           Rational(2 * gamma - 1);
}

LoadFormulaResult load_formula(const DesignParams& params) {
    LoadFormulaResult out;
    out.computation_load = computation_load(params);
    out.communication_load = communication_load_formula(params);
    for (int g = 1; g <= params.s - 1; ++g)
        out.per_round_pair_bits.push_back(round_pair_bits(params, g));
    out.final_round_bits = round_final_bits(params);
    for (int g = 1; g <= params.s; ++g)
        out.per_round_combo_bits.push_back(round_combo_bits(params, g));
    return out;
}

}  // namespace ccdc

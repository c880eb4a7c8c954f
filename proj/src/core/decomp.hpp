#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggdist.hpp"

namespace covert {

class Rng;

enum class Representation {
    closed_form_laplace,
    closed_form_gaussian,
    tabulated,
};

// Law of the covert input X = V_beta: X + Z ~ N_p(0, (beta * alpha)^p)
// for Z ~ N_p(0, alpha^p) independent of X.
struct DecompositionSpec {
    GGParams noise;
    double beta;
    Representation representation;

    double atom_at_zero; // point mass at 0

    // closed_form_gaussian: standard deviation of the continuous part.
    double gauss_sigma = 0.0;

    // tabulated: density values of the continuous part on a uniform grid;
    // weight j covers [grid_min + j*step, grid_min + (j+1)*step).
    double grid_min = 0.0;
    double grid_step = 0.0;
    std::vector<double> weights;
    double clipped_mass = 0.0;     // negative mass removed before renormalizing
    double min_cf_denominator = 0.0; // smallest |CF| met during deconvolution

    double continuous_mass() const { return 1.0 - atom_at_zero; }
};

// Construct P_X for noise shape p in (0, 1] or p = 2, beta >= 1.
DecompositionSpec decompose(const GGParams& noise, double beta);

// Always runs the CF-division / FFT branch (valid for p in (0, 1]); used to
// cross-check the p = 1 closed form.
DecompositionSpec decompose_tabulated(const GGParams& noise, double beta);

// i.i.d. draws from the spec; deterministic in (spec, count, seed).
GGSample sample_input(const DecompositionSpec& spec, std::size_t count,
                      std::uint64_t seed);
double sample_input_one(const DecompositionSpec& spec, Rng& rng);

// Real characteristic function E[cos(t Z)] by quadrature.
double cf_gg(const GGParams& params, double t);

// Serialized grid form for caching tabulated specs across CLI runs.
std::string decomposition_to_json(const DecompositionSpec& spec);
DecompositionSpec decomposition_from_json(const std::string& text);

} // namespace covert

#include "decomp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <json.hpp>

#include "rng.hpp"
#include "special.hpp"

namespace covert {

namespace {

constexpr std::size_t kFftSize = 1 << 16;

void check_supported(const GGParams& noise, double beta) {
    const double p = noise.p;
    if (!(p <= 1.0 || p == 2.0)) {
        throw std::invalid_argument(
            "decompose: shape p must be in (0,1] or equal to 2");
    }
    if (!std::isfinite(beta) || beta < 1.0) {
        throw std::invalid_argument("decompose: beta must be >= 1");
    }
}

DecompositionSpec atom_only(const GGParams& noise, double beta,
                            Representation rep) {
    DecompositionSpec spec{noise, beta, rep, 1.0};
    return spec;
}

} // namespace

DecompositionSpec decompose_tabulated(const GGParams& noise, double beta) {
    check_supported(noise, beta);
    if (noise.p > 1.0) {
        throw std::invalid_argument("decompose_tabulated: requires p in (0,1]");
    }
    if (beta == 1.0) return atom_only(noise, beta, Representation::tabulated);

    const std::size_t n = kFftSize;
    const GGParams out_law(noise.p, beta * noise.alpha);
    // Grid covers the (1e-10, 1 - 1e-10) quantile range of the output law,
    // which dominates both the noise and the input V_beta.
    const double extent = tail_radius(out_law, 2e-10);
    const double step = 2.0 * extent / static_cast<double>(n);
    const double grid_min = -extent;

    std::vector<std::complex<double>> fz(n), fbz(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double z = grid_min + step * static_cast<double>(j);
        fz[j] = pdf(noise, z);
        // beta * Z has density (1/beta) f_Z(z / beta).
        fbz[j] = pdf(noise, z / beta) / beta;
    }
    fft(fz, false);
    fft(fbz, false);

    const double den_scale = std::abs(fz[0]);
    double min_den = 1.0;
    std::vector<std::complex<double>> ratio(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double den = std::abs(fz[k]) / den_scale;
        min_den = std::min(min_den, den);
        if (den < 1e-12) {
            ratio[k] = 0.0; // filled with the atom below
        } else {
            ratio[k] = fbz[k] / fz[k];
        }
    }

    // The CF ratio tends to the atom mass at high frequency (1/beta^2 for
    // p = 1); read it off at Nyquist.
    double atom = ratio[n / 2].real();
    atom = std::clamp(atom, 0.0, 1.0);

    // Remove the atom, undo the half-grid circular shift, invert.
    std::vector<std::complex<double>> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        const std::complex<double> r =
            (std::abs(fz[k]) / den_scale < 1e-12)
                ? std::complex<double>(0.0, 0.0)
                : ratio[k] - atom;
        u[k] = r * sgn;
    }
    fft(u, true);

    DecompositionSpec spec{noise, beta, Representation::tabulated, atom};
    spec.grid_min = grid_min;
    spec.grid_step = step;
    spec.min_cf_denominator = min_den;
    spec.weights.resize(n);
    double clipped = 0.0;
    double total = 0.0;
    const double scale = 1.0 / (static_cast<double>(n) * step);
    for (std::size_t j = 0; j < n; ++j) {
        double v = u[j].real() * scale;
        if (v < 0.0) {
            clipped += -v * step;
            v = 0.0;
        }
        spec.weights[j] = v;
        total += v * step;
    }
    spec.clipped_mass = clipped;
    const double target = spec.continuous_mass();
    if (total > 0.0 && target > 0.0) {
        const double renorm = target / total;
        for (auto& w : spec.weights) w *= renorm;
    } else {
        spec.weights.assign(n, 0.0);
        spec.atom_at_zero = 1.0;
    }
    return spec;
}

DecompositionSpec decompose(const GGParams& noise, double beta) {
    check_supported(noise, beta);
    const double p = noise.p;

    if (p == 1.0) {
        // CF algebra: phi_V(t) = beta^{-2} + (1 - beta^{-2}) / (1 + (2 beta alpha t)^2),
        // i.e. an atom plus a Laplace at scale beta * alpha.
        DecompositionSpec spec = atom_only(noise, beta, Representation::closed_form_laplace);
        spec.atom_at_zero = 1.0 / (beta * beta);
        return spec;
    }
    if (p == 2.0) {
        DecompositionSpec spec = atom_only(noise, beta, Representation::closed_form_gaussian);
        spec.atom_at_zero = (beta == 1.0) ? 1.0 : 0.0;
        const double var = (beta * beta - 1.0) * second_moment(noise);
        spec.gauss_sigma = std::sqrt(var);
        return spec;
    }
    return decompose_tabulated(noise, beta);
}

double sample_input_one(const DecompositionSpec& spec, Rng& rng) {
    if (spec.atom_at_zero >= 1.0) return 0.0;
    if (spec.atom_at_zero > 0.0 && rng.uniform() < spec.atom_at_zero) return 0.0;
    switch (spec.representation) {
        case Representation::closed_form_laplace: {
            const GGParams cont(1.0, spec.beta * spec.noise.alpha);
            return draw_one(cont, rng);
        }
        case Representation::closed_form_gaussian:
            return spec.gauss_sigma * rng.normal();
        case Representation::tabulated: {
            // Inverse CDF over the cell grid; piecewise-uniform inside a cell.
            const double target = rng.uniform() * spec.continuous_mass();
            double acc = 0.0;
            std::size_t j = 0;
            for (; j + 1 < spec.weights.size(); ++j) {
                const double cell = spec.weights[j] * spec.grid_step;
                if (acc + cell > target) break;
                acc += cell;
            }
            const double cell = spec.weights[j] * spec.grid_step;
            const double frac = (cell > 0.0) ? (target - acc) / cell : 0.5;
            return spec.grid_min + (static_cast<double>(j) + frac) * spec.grid_step;
        }
    }
    return 0.0;
}

GGSample sample_input(const DecompositionSpec& spec, std::size_t count,
                      std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("sample_input: count must be >= 1");
    GGSample out;
    out.seed = seed;
    out.values.resize(count);
    Rng rng(derive_stream(seed, 0xdecaULL));

    if (spec.representation == Representation::tabulated &&
        spec.atom_at_zero < 1.0) {
        // Precompute the cell CDF once; the linear scan in sample_input_one is
        // too slow for bulk draws.
        std::vector<double> cdf(spec.weights.size() + 1, 0.0);
        for (std::size_t j = 0; j < spec.weights.size(); ++j) {
            cdf[j + 1] = cdf[j] + spec.weights[j] * spec.grid_step;
        }
        const double mass = cdf.back();
        for (std::size_t i = 0; i < count; ++i) {
            if (spec.atom_at_zero > 0.0 && rng.uniform() < spec.atom_at_zero) {
                out.values[i] = 0.0;
                continue;
            }
            const double target = rng.uniform() * mass;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
            std::size_t j = static_cast<std::size_t>(
                std::max<std::ptrdiff_t>(0, (it - cdf.begin()) - 1));
            if (j >= spec.weights.size()) j = spec.weights.size() - 1;
            const double cell = spec.weights[j] * spec.grid_step;
            const double frac = (cell > 0.0) ? (target - cdf[j]) / cell : 0.5;
            out.values[i] =
                spec.grid_min + (static_cast<double>(j) + frac) * spec.grid_step;
        }
        return out;
    }

    for (std::size_t i = 0; i < count; ++i) {
        out.values[i] = sample_input_one(spec, rng);
    }
    return out;
}

double cf_gg(const GGParams& params, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("cf_gg: t must be finite");
    if (t == 0.0) return 1.0;
    const double radius = tail_radius(params, 1e-14);
    auto g = [&](double z) { return pdf(params, z) * std::cos(t * z); };
    // Split at the cusp scale so the adaptive rule spends its budget there.
    const double cut = std::min(params.alpha, radius);
    double result = integrate(g, 0.0, cut, 2.5e-13) +
                    integrate(g, cut, radius, 2.5e-13);
    result *= 2.0;
    if (!std::isfinite(result)) {
        throw std::runtime_error("cf_gg: quadrature failed");
    }
    return result;
}

std::string decomposition_to_json(const DecompositionSpec& spec) {
    nlohmann::json j;
    j["p"] = spec.noise.p;
    j["alpha"] = spec.noise.alpha;
    j["beta"] = spec.beta;
    switch (spec.representation) {
        case Representation::closed_form_laplace: j["representation"] = "closed_form_laplace"; break;
        case Representation::closed_form_gaussian: j["representation"] = "closed_form_gaussian"; break;
        case Representation::tabulated: j["representation"] = "tabulated"; break;
    }
    j["atom_at_zero"] = spec.atom_at_zero;
    j["gauss_sigma"] = spec.gauss_sigma;
    j["grid_min"] = spec.grid_min;
    j["grid_step"] = spec.grid_step;
    j["weights"] = spec.weights;
    j["clipped_mass"] = spec.clipped_mass;
    return j.dump();
}

DecompositionSpec decomposition_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    GGParams noise(j.at("p").get<double>(), j.at("alpha").get<double>());
    const std::string rep = j.at("representation").get<std::string>();
    Representation r;
    if (rep == "closed_form_laplace") {
        r = Representation::closed_form_laplace;
    } else if (rep == "closed_form_gaussian") {
        r = Representation::closed_form_gaussian;
    } else if (rep == "tabulated") {
        r = Representation::tabulated;
    } else {
        throw std::invalid_argument("decomposition_from_json: unknown representation");
    }
    DecompositionSpec spec{noise, j.at("beta").get<double>(), r,
                           j.at("atom_at_zero").get<double>()};
    spec.gauss_sigma = j.value("gauss_sigma", 0.0);
    spec.grid_min = j.value("grid_min", 0.0);
    spec.grid_step = j.value("grid_step", 0.0);
    if (j.contains("weights")) spec.weights = j["weights"].get<std::vector<double>>();
    spec.clipped_mass = j.value("clipped_mass", 0.0);
    return spec;
}

} // namespace covert

// covertsim: batch experiment runner over the covert shared library.
// Every number printed here is produced by the library; this layer only
// parses arguments, persists results and formats output.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "covert/covert.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_ok(cov_status status, const std::string& context) {
    if (status == COV_OK) return;
    throw InputError(context + ": " + cov_status_name(status) + ": " + cov_last_error());
}

struct GgHandle {
    cov_gg* ptr = nullptr;
    GgHandle(double p, double alpha) {
        require_ok(cov_gg_create(p, alpha, &ptr), "noise parameters");
    }
    ~GgHandle() { cov_gg_destroy(ptr); }
    GgHandle(const GgHandle&) = delete;
    GgHandle& operator=(const GgHandle&) = delete;
};

struct TransportHandle {
    cov_transport* ptr = nullptr;
    ~TransportHandle() { cov_transport_destroy(ptr); }
};

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string run_id(const json& config, std::uint64_t seed) {
    std::ostringstream os;
    os << config.dump() << '#' << seed;
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(os.str());
    return hex.str();
}

double display(double nats, bool bits) { return bits ? nats / kLn2 : nats; }

fs::path output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("COVERTSIM_OUT")) return env;
    return "runs";
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

json load_config(const std::string& path, const char* schema) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON (see ") + schema +
                         "): " + e.what());
    }
}

void need_field(const json& j, const char* key, const char* schema) {
    if (!j.contains(key))
        throw InputError(std::string("config missing required field '") + key +
                         "' (see " + schema + ")");
}

// ---- dist ----

int cmd_dist(double p, double alpha, bool show_entropy, bool show_moment_p,
             bool show_second_moment, bool show_normalizer,
             const std::vector<double>& pdf_at, const std::vector<double>& cdf_at,
             std::int64_t sample_count, std::uint64_t seed) {
    GgHandle gg(p, alpha);
    std::cout << std::setprecision(8);
    double v;
    if (show_entropy) {
        require_ok(cov_gg_entropy(gg.ptr, &v), "entropy");
        std::cout << v << "\n";
    }
    if (show_moment_p) {
        require_ok(cov_gg_abs_moment_p(gg.ptr, &v), "moment");
        std::cout << v << "\n";
    }
    if (show_second_moment) {
        require_ok(cov_gg_second_moment(gg.ptr, &v), "second moment");
        std::cout << v << "\n";
    }
    if (show_normalizer) {
        require_ok(cov_gg_normalizer(gg.ptr, &v), "normalizer");
        std::cout << v << "\n";
    }
    for (double z : pdf_at) {
        require_ok(cov_gg_log_pdf(gg.ptr, z, &v), "pdf");
        std::cout << std::exp(v) << "\n";
    }
    for (double z : cdf_at) {
        require_ok(cov_gg_cdf(gg.ptr, z, &v), "cdf");
        std::cout << v << "\n";
    }
    if (sample_count > 0) {
        std::vector<double> values(static_cast<std::size_t>(sample_count));
        require_ok(cov_gg_sample(gg.ptr, seed, values.size(), values.data()), "sample");
        std::cout << std::setprecision(17);
        for (double z : values) std::cout << z << "\n";
    }
    return 0;
}

// ---- budget ----

int cmd_budget(double p, double alpha, double delta, double n, bool bits) {
    GgHandle gg(p, alpha);
    cov_budget_result r;
    require_ok(cov_budget_achievable(gg.ptr, delta, n, &r), "budget");
    double converse;
    require_ok(cov_budget_converse_max(gg.ptr, delta, n, &converse), "converse");
    double l_value;
    int l_exact;
    require_ok(cov_l_theoretical(gg.ptr, COV_CHANNEL_GG_MEMORYLESS, &l_value, &l_exact),
               "L");

    json out;
    out["gamma_n"] = r.gamma_n;
    out["gamma_converse_max"] = converse;
    out["per_symbol_kl"] = display(r.per_symbol_kl, bits);
    out["total_kl"] = display(r.total_kl, bits);
    out["rate_cap"] = display(r.rate_cap_nats, bits);
    out["normalized_rate"] = r.normalized_rate;
    out["units"] = bits ? "bits" : "nats";
    out["L"] = {{"value", l_value}, {"status", l_exact ? "exact" : "upper_bound"}};
    bool covert_ok = r.total_kl <= delta * (1.0 + 1e-12) && converse >= r.gamma_n;
    out["checks"] = {{"covert", covert_ok}};
    std::cout << out.dump(2) << "\n";
    return covert_ok ? 0 : 1;
}

// ---- decomp ----

int cmd_decomp(double p, double alpha, double beta, const std::string& spec_out,
               std::int64_t sample_count, std::uint64_t seed) {
    GgHandle gg(p, alpha);
    cov_decomp* d = nullptr;
    require_ok(cov_decomp_create(gg.ptr, beta, &d), "decomposition");
    std::unique_ptr<cov_decomp, void (*)(cov_decomp*)> guard(d, cov_decomp_destroy);

    json out;
    out["atom_at_zero"] = cov_decomp_atom_at_zero(d);
    out["clipped_mass"] = cov_decomp_clipped_mass(d);
    bool mass_ok = cov_decomp_clipped_mass(d) <= 1e-6;
    out["checks"] = {{"clipped_mass_small", mass_ok}};
    if (!spec_out.empty()) {
        char* text = nullptr;
        require_ok(cov_decomp_to_json(d, &text), "serialize");
        write_atomic(spec_out, text);
        cov_string_free(text);
        out["spec_file"] = spec_out;
    }
    if (sample_count > 0) {
        std::vector<double> values(static_cast<std::size_t>(sample_count));
        require_ok(cov_decomp_sample(d, seed, values.size(), values.data()), "sample");
        out["sample"] = values;
    }
    std::cout << out.dump(2) << "\n";
    return mass_ok ? 0 : 1;
}

// ---- whiten ----

TransportHandle load_transport(double ar1_rho, std::int64_t ar1_n,
                               const std::string& matrix_file) {
    TransportHandle t;
    if (!matrix_file.empty()) {
        json j = load_config(matrix_file, "schemas/matrix.schema.json");
        need_field(j, "sigma", "schemas/matrix.schema.json");
        const auto& rows = j["sigma"];
        if (!rows.is_array() || rows.empty())
            throw InputError("sigma must be a non-empty array of rows");
        std::size_t n = rows.size();
        std::vector<double> sigma(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!rows[i].is_array() || rows[i].size() != n)
                throw InputError("sigma row " + std::to_string(i + 1) +
                                 " must have " + std::to_string(n) + " entries");
            for (std::size_t k = 0; k < n; ++k) {
                if (!rows[i][k].is_number())
                    throw InputError("sigma entry (" + std::to_string(i + 1) + "," +
                                     std::to_string(k + 1) + ") is not a number");
                sigma[i * n + k] = rows[i][k].get<double>();
            }
        }
        std::vector<double> mu(n, 0.0);
        if (j.contains("mu")) {
            if (!j["mu"].is_array() || j["mu"].size() != n)
                throw InputError("mu must be an array of length " + std::to_string(n));
            for (std::size_t i = 0; i < n; ++i) mu[i] = j["mu"][i].get<double>();
        }
        require_ok(cov_transport_create(n, mu.data(), sigma.data(), &t.ptr),
                   "covariance model");
    } else {
        require_ok(cov_transport_create_ar1(static_cast<std::size_t>(ar1_n), ar1_rho,
                                            &t.ptr),
                   "ar1 model");
    }
    return t;
}

int cmd_whiten(double ar1_rho, std::int64_t ar1_n, const std::string& matrix_file,
               double input_var, double delta, std::int64_t messages,
               std::int64_t trials, std::uint64_t seed) {
    TransportHandle t = load_transport(ar1_rho, ar1_n, matrix_file);
    std::size_t n = cov_transport_dim(t.ptr);

    double kl_colored, kl_white;
    require_ok(cov_transport_kl_pair(t.ptr, nullptr, input_var, &kl_colored, &kl_white),
               "kl invariance");
    bool kl_ok = std::abs(kl_colored - kl_white) <= 1e-9;

    json out;
    out["dim"] = n;
    out["condition_estimate"] = cov_transport_condition(t.ptr);
    out["kl_colored"] = kl_colored;
    out["kl_white"] = kl_white;
    bool equiv_ok = true;
    if (trials > 0) {
        cov_experiment_config config{};
        config.p = 2.0;
        config.alpha = 1.0;
        config.delta = delta;
        config.n = static_cast<std::int64_t>(n);
        config.message_count = messages;
        config.trials = trials;
        config.seed = seed;
        config.threads = 1;
        std::int64_t mismatches = 0;
        double error_rate = 0.0;
        require_ok(cov_coupled_equivalence(t.ptr, &config, &mismatches, &error_rate),
                   "coupled equivalence");
        equiv_ok = mismatches == 0;
        out["equivalence"] = {{"trials", trials},
                              {"decision_mismatches", mismatches},
                              {"error_rate", error_rate}};
    }
    out["checks"] = {{"kl_invariant", kl_ok}, {"decisions_identical", equiv_ok}};
    std::cout << out.dump(2) << "\n";
    return (kl_ok && equiv_ok) ? 0 : 1;
}

// ---- warden ----

int cmd_warden(double p, double alpha, double delta, std::int64_t n,
               std::int64_t trials, std::uint64_t seed) {
    GgHandle gg(p, alpha);
    cov_budget_result budget;
    require_ok(cov_budget_achievable(gg.ptr, delta, static_cast<double>(n), &budget),
               "budget");
    cov_warden_result w;
    require_ok(cov_warden_test(gg.ptr, budget.gamma_n, n, trials, seed, &w), "warden");

    double pinsker = 1.0 - std::sqrt(delta / 2.0);
    bool pass = w.ci_hi >= pinsker;
    json out;
    out["gamma_n"] = budget.gamma_n;
    out["sum_errors"] = w.sum_errors;
    out["sum_ci"] = {w.ci_lo, w.ci_hi};
    out["p_false_alarm"] = w.p_false_alarm;
    out["p_missed_detection"] = w.p_missed_detection;
    out["pinsker_lower_bound"] = pinsker;
    out["checks"] = {{"pinsker", pass}};
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
}

// ---- sweep ----

constexpr const char* kSweepSchema = "schemas/sweep.schema.json";

int cmd_sweep(const std::string& config_path, const std::string& out_flag,
              std::int64_t seed_override) {
    json config = load_config(config_path, kSweepSchema);
    for (const char* key : {"p", "alpha", "delta", "n_list", "eps_target", "trials",
                            "m_max"})
        need_field(config, key, kSweepSchema);
    if (!config["n_list"].is_array() || config["n_list"].empty())
        throw InputError(std::string("n_list must be a non-empty array (see ") +
                         kSweepSchema + ")");
    for (const char* key : {"p", "alpha", "delta", "eps_target"})
        if (!config[key].is_number() || config[key].get<double>() <= 0.0)
            throw InputError(std::string("field '") + key +
                             "' must be a positive number (see " + kSweepSchema + ")");

    std::uint64_t seed = seed_override >= 0
                             ? static_cast<std::uint64_t>(seed_override)
                             : config.value("seed", 1ULL);
    const double p = config["p"].get<double>();
    const double alpha = config["alpha"].get<double>();
    const double delta = config["delta"].get<double>();
    const std::int64_t warden_trials = config.value("warden_trials", 0LL);

    fs::path dir = output_dir(out_flag);
    fs::create_directories(dir);
    const std::string id = run_id(config, seed);
    fs::path result_path = dir / (id + ".json");
    if (fs::exists(result_path)) {
        std::cout << "run " << id << " already recorded at " << result_path.string()
                  << "\n";
        return 0;
    }

    GgHandle gg(p, alpha);
    json rows = json::array();
    json result;
    result["run_id"] = id;
    result["config"] = config;
    result["seed"] = seed;
    bool all_ok = true;

    std::ostringstream plot;
    plot << "# n k_hat_norm theory_norm\n";

    for (const auto& n_entry : config["n_list"]) {
        const std::int64_t n = n_entry.get<std::int64_t>();
        json row;
        row["n"] = n;
        try {
            cov_budget_result budget;
            require_ok(cov_budget_achievable(gg.ptr, delta, static_cast<double>(n),
                                             &budget),
                       "budget");
            json sweep_config = {
                {"p", p},
                {"alpha", alpha},
                {"delta", delta},
                {"n", n},
                {"eps_target", config["eps_target"].get<double>()},
                {"threshold_gamma", config.value("threshold_gamma", 0.0)},
                {"trials", config["trials"].get<std::int64_t>()},
                {"m_max", config["m_max"].get<std::int64_t>()},
                {"seed", seed},
                {"threads", config.value("threads", 1)},
            };
            char* text = nullptr;
            require_ok(cov_run_rate_sweep_json(sweep_config.dump().c_str(), &text),
                       "rate sweep");
            json sweep = json::parse(text);
            cov_string_free(text);

            double warden_sum = std::nan("");
            if (warden_trials > 0) {
                cov_warden_result w;
                require_ok(cov_warden_test(gg.ptr, budget.gamma_n, n, warden_trials,
                                           seed + 1, &w),
                           "warden");
                warden_sum = w.sum_errors;
            }
            row["k_hat"] = sweep["k_hat"];
            row["k_hat_normalized"] = sweep["k_hat_normalized"];
            row["normalized_rate_cap"] = budget.normalized_rate;
            row["points"] = sweep["points"];
            row["warden_sum"] = warden_sum;
            row["status"] = "ok";
            plot << n << ' ' << sweep["k_hat_normalized"].get<double>() << ' '
                 << budget.normalized_rate << "\n";
        } catch (const std::exception& e) {
            row["status"] = std::string("failed: ") + e.what();
            all_ok = false;
        }
        rows.push_back(row);
    }
    result["rows"] = rows;
    result["all_ok"] = all_ok;

    write_atomic(result_path, result.dump(2) + "\n");

    // CSV index: one line per measured (n, M) point, appended once per run.
    fs::path index_path = dir / "index.csv";
    bool fresh = !fs::exists(index_path);
    std::ofstream index(index_path, std::ios::app);
    if (fresh)
        index << "p,alpha,delta,n,M,eps_hat,eps_ci_lo,eps_ci_hi,K_hat_norm,"
                 "i_mean,i_var,warden_sum\n";
    for (const auto& row : rows) {
        if (row["status"] != "ok") continue;
        for (const auto& pt : row["points"]) {
            index << p << ',' << alpha << ',' << delta << ',' << row["n"] << ','
                  << pt["message_count"] << ',' << pt["error_rate"] << ','
                  << pt["error_ci_lo"] << ',' << pt["error_ci_hi"] << ','
                  << row["k_hat_normalized"] << ',' << pt["info_density_mean"] << ','
                  << pt["info_density_var"] << ',' << row["warden_sum"] << "\n";
        }
    }

    fs::path data_path = dir / (id + ".dat");
    write_atomic(data_path, plot.str());
    std::ostringstream script;
    script << "set xlabel 'n'\nset ylabel 'normalized rate'\n"
           << "plot '" << data_path.filename().string()
           << "' using 1:2 with linespoints title 'measured', '' using 1:3 "
              "with lines title 'formula cap'\n";
    write_atomic(dir / (id + ".gp"), script.str());

    std::cout << result.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"covert-communication budget and simulation toolkit"};
    app.require_subcommand(1);

    // dist
    double p = 1.0, alpha = 1.0;
    bool show_entropy = false, show_moment_p = false, show_second = false,
         show_norm = false;
    std::vector<double> pdf_at, cdf_at;
    std::int64_t sample_count = 0;
    std::uint64_t seed = 1;
    auto* dist = app.add_subcommand("dist", "distribution values and samples");
    dist->add_option("--p", p, "shape")->required()->check(CLI::PositiveNumber);
    dist->add_option("--alpha", alpha, "scale")->required()->check(CLI::PositiveNumber);
    dist->add_flag("--entropy", show_entropy, "differential entropy, nats");
    dist->add_flag("--moment-p", show_moment_p, "E|Z|^p");
    dist->add_flag("--second-moment", show_second, "E[Z^2]");
    dist->add_flag("--normalizer", show_norm, "c_p");
    dist->add_option("--pdf", pdf_at, "density at z");
    dist->add_option("--cdf", cdf_at, "distribution function at z");
    dist->add_option("--sample", sample_count, "number of draws");
    dist->add_option("--seed", seed, "sampling seed");

    // budget
    double delta = 0.01, n_real = 1e4;
    bool bits = false;
    auto* budget = app.add_subcommand("budget", "covertness budget arithmetic");
    budget->add_option("--p", p, "shape")->required()->check(CLI::PositiveNumber);
    budget->add_option("--alpha", alpha, "scale")->required()->check(CLI::PositiveNumber);
    budget->add_option("--delta", delta, "total KL budget")
        ->required()
        ->check(CLI::PositiveNumber);
    budget->add_option("--n", n_real, "blocklength")->required()->check(CLI::PositiveNumber);
    budget->add_flag("--bits", bits, "display rates in bits");

    // decomp
    double beta = 1.1;
    std::string spec_out;
    auto* decomp = app.add_subcommand("decomp", "covert input construction");
    decomp->add_option("--p", p, "shape")->required()->check(CLI::PositiveNumber);
    decomp->add_option("--alpha", alpha, "scale")->required()->check(CLI::PositiveNumber);
    decomp->add_option("--beta", beta, "scale ratio gamma/alpha")->required();
    decomp->add_option("--spec-out", spec_out, "write the serialized spec here");
    decomp->add_option("--sample", sample_count, "number of draws");
    decomp->add_option("--seed", seed, "sampling seed");

    // whiten
    double rho = 0.0, input_var = 0.01;
    std::int64_t wn = 8, messages = 4, trials = 0;
    std::string matrix_file;
    auto* whiten = app.add_subcommand("whiten", "noise-with-memory transport");
    whiten->add_option("--ar1", rho, "AR(1) correlation");
    whiten->add_option("--n", wn, "dimension")->check(CLI::PositiveNumber);
    whiten->add_option("--matrix", matrix_file, "JSON file with mu and sigma");
    whiten->add_option("--input-var", input_var, "white input variance for the KL check");
    whiten->add_option("--delta", delta, "budget for the equivalence experiment");
    whiten->add_option("--messages", messages, "codebook size for the experiment");
    whiten->add_option("--equiv-trials", trials, "coupled trials, 0 skips");
    whiten->add_option("--seed", seed, "experiment seed");

    // warden
    std::int64_t warden_n = 1000, warden_trials = 2000;
    auto* warden = app.add_subcommand("warden", "likelihood-ratio detection test");
    warden->add_option("--p", p, "shape")->required()->check(CLI::PositiveNumber);
    warden->add_option("--alpha", alpha, "scale")->required()->check(CLI::PositiveNumber);
    warden->add_option("--delta", delta, "total KL budget")
        ->required()
        ->check(CLI::PositiveNumber);
    warden->add_option("--n", warden_n, "blocklength")->check(CLI::PositiveNumber);
    warden->add_option("--trials", warden_trials, "Monte Carlo trials");
    warden->add_option("--seed", seed, "seed");

    // sweep
    std::string config_path, out_dir;
    std::int64_t seed_override = -1;
    auto* sweep = app.add_subcommand("sweep", "rate estimation over a blocklength list");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--out", out_dir, "output directory (default $COVERTSIM_OUT or runs)");
    sweep->add_option("--seed", seed_override, "override the config seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dist)
            return cmd_dist(p, alpha, show_entropy, show_moment_p, show_second,
                            show_norm, pdf_at, cdf_at, sample_count, seed);
        if (*budget) return cmd_budget(p, alpha, delta, n_real, bits);
        if (*decomp) return cmd_decomp(p, alpha, beta, spec_out, sample_count, seed);
        if (*whiten)
            return cmd_whiten(rho, wn, matrix_file, input_var, delta, messages,
                              trials, seed);
        if (*warden) return cmd_warden(p, alpha, delta, warden_n, warden_trials, seed);
        if (*sweep) return cmd_sweep(config_path, out_dir, seed_override);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

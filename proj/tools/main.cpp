// aerocf: run | mc-validate | cdf
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "aerocf/error.hpp"
#include "aerocf/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw aerocf::ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct Flags {
    std::string config, out, sweep, values, scheme, optimize;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> drops, mc_trials;
    std::optional<unsigned> workers;
    bool timing = false, force_los = false, unit_tau = false;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "experiment config (JSON)");
    app->add_option("--seed", f.seed, "root seed");
    app->add_option("--out", f.out, "output file (CSV, or JSON for mc-validate); stdout if omitted");
    app->add_option("--sweep", f.sweep, "P_m_dbm | M | K | S | environment | none");
    app->add_option("--values", f.values, "comma-separated sweep values");
    app->add_option("--scheme", f.scheme, "comma-separated: aerial_cellfree, aerial_cellular, terrestrial_cellfree");
    app->add_option("--optimize", f.optimize, "none | power | placement | joint");
    app->add_option("--drops", f.drops, "random user drops per sweep value");
    app->add_option("--mc-trials", f.mc_trials, "Monte Carlo trials");
    app->add_option("--workers", f.workers, "worker threads (results do not depend on it)");
    app->add_flag("--timing", f.timing, "fill the runtime_ms column");
    app->add_flag("--force-los", f.force_los, "mc-validate: p_los = 1 on every access link");
    app->add_flag("--unit-transmittance", f.unit_tau, "mc-validate: tau = 1 on every backhaul link");
}

aerocf::ExperimentConfig build_config(const Flags& f) {
    using namespace aerocf;
    ExperimentConfig c;
    if (!f.config.empty()) c = ExperimentConfig::from_json(read_file(f.config));
    if (f.seed) c.seed = *f.seed;
    if (!f.sweep.empty()) c.sweep.param = sweep_param_from_string(f.sweep);
    if (!f.values.empty()) c.sweep.values = split(f.values);
    if (!f.scheme.empty()) {
        c.schemes.clear();
        for (const auto& s : split(f.scheme)) c.schemes.push_back(scheme_from_string(s));
    }
    if (!f.optimize.empty()) c.optimize = optimize_mode_from_string(f.optimize);
    if (f.drops) c.drops = *f.drops;
    if (f.mc_trials) c.mc.trials = *f.mc_trials;
    if (f.workers) c.workers = *f.workers;
    if (f.timing) c.timing = true;
    if (f.force_los) c.mc.force_los = true;
    if (f.unit_tau) c.mc.unit_transmittance = true;
    c.validate();
    return c;
}

template <class Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw aerocf::ConfigError("out", "cannot write '" + path + "'");
    fn(os);
}

// effective config (drop count, seed, sweep) next to the CSV
void write_metadata(const std::string& out, const aerocf::ExperimentConfig& c) {
    if (out.empty()) return;
    std::ofstream os(out + ".config.json", std::ios::binary);
    if (!os) throw aerocf::ConfigError("out", "cannot write '" + out + ".config.json'");
    os << c.to_json() << '\n';
}

void log_failures(const aerocf::ExperimentResult& r) {
    for (const auto& row : r.rows)
        if (!row.ok)
            std::cerr << "row aborted: sweep=" << row.sweep_value << " scheme=" << aerocf::to_string(row.scheme)
                      << " drop=" << row.drop << ": " << row.error << '\n';
}

void print_summary(const aerocf::ExperimentResult& r, const aerocf::ExperimentConfig& c) {
    std::cerr << "drops per point: " << c.drops << ", seed " << c.seed << '\n';
    for (const auto& s : r.summary)
        std::cerr << std::setw(12) << s.sweep_value << "  " << std::setw(22) << aerocf::to_string(s.scheme)
                  << "  mean min rate " << std::setprecision(5) << s.mean_min_rate << "  median "
                  << s.median_min_rate << "  (" << s.drops_ok << " ok)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aerial cell-free network simulator and optimizer"};
    app.require_subcommand(1);
    Flags f;
    auto* run = app.add_subcommand("run", "sweep and write per-drop CSV rows");
    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo chain against the closed form");
    auto* cdf = app.add_subcommand("cdf", "empirical CDF of the per-drop min rate");
    for (auto* sub : {run, mc, cdf}) add_common(sub, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        const auto c = build_config(f);
        if (run->parsed()) {
            const auto res = aerocf::run(c);
            emit(f.out, [&](std::ostream& os) { aerocf::write_csv(os, res); });
            write_metadata(f.out, c);
            log_failures(res);
            print_summary(res, c);
            return res.any_solver_failure() ? kSolverFailure : kOk;
        }
        if (cdf->parsed()) {
            aerocf::ExperimentResult raw;
            const auto rows = aerocf::cdf_experiment(c, &raw);
            emit(f.out, [&](std::ostream& os) { aerocf::write_cdf_csv(os, rows, c); });
            write_metadata(f.out, c);
            log_failures(raw);
            return raw.any_solver_failure() ? kSolverFailure : kOk;
        }
        auto mcc = c;
        mcc.mc.enabled = true;
        const auto rep = aerocf::mc_validate(mcc);
        emit(f.out, [&](std::ostream& os) { os << rep.to_json() << '\n'; });
        for (std::size_t k = 0; k < rep.users.size(); ++k)
            if (rep.users[k].ci95_db > 0.5)
                std::cerr << "warning: user " << k << " CI half-width " << rep.users[k].ci95_db
                          << " dB at " << rep.trials << " trials\n";
        return kOk;
    } catch (const aerocf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const aerocf::SolverError& e) {
        std::cerr << "solver failure (outer iteration " << e.iteration() << "): " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

// Experiment runner. Writes CSV files into --out and a short summary to stdout.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ofdm_papr/experiment.hpp"

namespace {

using namespace ofdm_papr;

struct Overrides {
    std::string config;
    std::vector<std::string> solvers;
    std::optional<double> beta;
    std::optional<double> alpha_db;
    std::optional<double> rho;
    std::optional<double> rho_tilde;
    std::optional<int> iters;
    std::optional<std::size_t> symbols;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config, "key = value configuration file");
    sub->add_option("--solver", o.solvers, "direct, relax, rcf, none (repeat or comma-separate)")->delimiter(',');
    sub->add_option("--beta", o.beta, "free carrier power overhead bound");
    sub->add_option("--alpha-db", o.alpha_db, "PAPR target in dB");
    sub->add_option("--rho", o.rho, "ADMM penalty of the selected ADMM solvers");
    sub->add_option("--rho-tilde", o.rho_tilde, "relaxation penalty (relax)");
    sub->add_option("--iters", o.iters, "ADMM iterations per symbol");
    sub->add_option("--symbols", o.symbols, "number of OFDM symbols");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads (0: all cores)");
}

ExperimentConfig resolve(const Overrides& o)
{
    ExperimentConfig cfg;
    if (!o.config.empty()) load_config_file(cfg, o.config);
    if (!o.solvers.empty()) {
        cfg.solvers.clear();
        for (const auto& s : o.solvers) cfg.solvers.push_back(parse_solver(s));
    }
    if (o.beta) {
        cfg.beta = *o.beta;
        cfg.betas = {*o.beta};
    }
    if (o.alpha_db) cfg.alpha_db = *o.alpha_db;
    if (o.rho) {
        bool any = false;
        for (auto s : cfg.solvers) {
            if (s == SolverKind::direct) cfg.rho_direct = *o.rho, any = true;
            if (s == SolverKind::relax) cfg.rho_relax = *o.rho, any = true;
        }
        if (!any) cfg.rho_direct = cfg.rho_relax = *o.rho;
    }
    if (o.rho_tilde) cfg.rho_tilde = *o.rho_tilde;
    if (o.iters) {
        if (*o.iters < 0) throw config_error("--iters must be >= 0");
        cfg.admm_iters = *o.iters;
        cfg.conv_iters = *o.iters;
    }
    if (o.symbols) {
        cfg.n_symbols = *o.symbols;
        cfg.conv_symbols = *o.symbols;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out_dir = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    cfg.validate();
    return cfg;
}

void report_table2(const ExperimentConfig& cfg)
{
    const auto rows = run_table2(cfg);
    write_table2(cfg, rows);
    for (const auto& r : rows)
        std::printf("%-7s beta=%-5g EVM %s dB\n", std::string(to_string(r.solver)).c_str(), r.beta,
                    fmt_db(r.evm_db).c_str());
}

void report_ccdf(const ExperimentConfig& cfg)
{
    const auto series = run_ccdf(cfg);
    write_ccdf(cfg, series);
    const double probe[] = {cfg.alpha_db + 0.05, 8.0};
    for (const auto& s : series) {
        const auto pts = ccdf(s.papr_db, probe);
        std::printf("%-7s CCDF(%.2f dB)=%g  CCDF(8 dB)=%g\n", std::string(to_string(s.solver)).c_str(), probe[0],
                    pts[0].prob, pts[1].prob);
    }
}

void report_convergence(const ExperimentConfig& cfg)
{
    const auto r = run_convergence(cfg);
    write_convergence(cfg, r);
    for (const auto& c : r.curves)
        std::printf("%-7s median residual after %zu iterations: %g\n", std::string(to_string(c.solver)).c_str(),
                    c.median_residual.size(), c.median_residual.empty() ? 0.0 : c.median_residual.back());
    for (const auto& g : r.gaps)
        std::printf("rho_tilde=%-5g median gap %g (%zu symbols, %zu flagged, %zu bound violations)\n", g.rho_tilde,
                    g.median_gap, g.symbols, g.flagged, g.bound_violations);
}

void report_ber(const ExperimentConfig& cfg)
{
    const auto rows = run_ber(cfg);
    write_ber(cfg, rows);
    for (const auto& r : rows)
        std::printf("%-9s %-7s Eb/N0=%5.1f dB BER %g\n", r.channel.c_str(), r.solver.c_str(), r.ebn0_db, r.ber());
}

void report_psd(const ExperimentConfig& cfg)
{
    const auto series = run_psd(cfg);
    write_psd(cfg, series);
    for (const auto& s : series)
        std::printf("%-7s out-of-band %s dB\n", s.solver.c_str(), fmt_db(s.out_of_band_db).c_str());
}

void report_bench(const ExperimentConfig& cfg)
{
    const auto rows = run_bench(cfg);
    write_bench(cfg, rows);
    for (const auto& r : rows)
        std::printf("N=%-5zu lN=%-5zu direct %.2f us/iter  relax %.2f us/iter  fft pair %.2f us\n", r.n_carriers,
                    r.time_length, r.direct_iter_us, r.relax_iter_us, r.fft_pair_us);
    const auto fit = fit_nlogn(rows);
    std::printf("direct: slope %.3f, R^2 (free) %.4f, R^2 (unit slope) %.4f\n", fit.slope, fit.r2_free, fit.r2_unit);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OFDM PAPR reduction experiments"};
    app.require_subcommand(1, 1);

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const ExperimentConfig&);
    };
    const Command commands[] = {
        {"table2", "EVM per solver and beta", report_table2},
        {"ccdf", "PAPR CCDF per solver", report_ccdf},
        {"convergence", "residual curves and consensus gap versus rho_tilde", report_convergence},
        {"ber", "BER after SSPA over AWGN or multipath", report_ber},
        {"psd", "spectrum after SSPA", report_psd},
        {"bench", "per-iteration time versus lN", report_bench},
    };
    std::vector<Overrides> overrides(std::size(commands));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
        add_common(sub, overrides[i]);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            const auto cfg = resolve(overrides[i]);
            commands[i].run(cfg);
            return 0;
        } catch (const config_error& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const std::invalid_argument& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const numerical_failure& e) {
            std::cerr << "numerical failure: " << e.what() << '\n';
            return 3;
        } catch (const degenerate_input& e) {
            std::cerr << "numerical failure: " << e.what() << '\n';
            return 3;
        }
    }
    return 2;
}

#pragma once

// Monte Carlo drivers behind the CLI subcommands. Every symbol draws its bits
// and noise from streams keyed by (seed, symbol index), and reductions run in
// symbol order, so output does not depend on the worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "admm_direct.hpp"
#include "admm_relax.hpp"
#include "carrier_plan.hpp"
#include "channel.hpp"
#include "constellation.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "papr.hpp"
#include "parallel.hpp"
#include "rcf.hpp"
#include "rng.hpp"
#include "transform.hpp"

namespace ofdm_papr {

enum class SolverKind { none, direct, relax, rcf };

inline std::string_view to_string(SolverKind s)
{
    switch (s) {
    case SolverKind::none: return "none";
    case SolverKind::direct: return "direct";
    case SolverKind::relax: return "relax";
    case SolverKind::rcf: return "rcf";
    }
    return "?";
}

inline SolverKind parse_solver(std::string_view s)
{
    if (s == "none" || s == "original") return SolverKind::none;
    if (s == "direct") return SolverKind::direct;
    if (s == "relax") return SolverKind::relax;
    if (s == "rcf") return SolverKind::rcf;
    throw config_error("unknown solver '" + std::string(s) + "' (expected direct, relax, rcf, none)");
}

struct ExperimentConfig {
    std::size_t n_carriers = 64;
    std::size_t n_free = 12;
    std::size_t oversampling = 4;
    Modulation modulation = Modulation::qam16;
    std::size_t n_symbols = 5000;
    double alpha_db = 4.0;
    std::vector<double> betas{0.0, 0.15, 0.3}; // table2
    double beta = 0.15;                         // every other experiment
    std::vector<SolverKind> solvers{SolverKind::direct, SolverKind::relax, SolverKind::rcf};
    double rho_direct = 100.0;
    double rho_relax = 300.0;
    double rho_tilde = 100.0;
    int admm_iters = 5;
    int rcf_iters = 10;
    double rcf_target_db = std::numeric_limits<double>::quiet_NaN(); // defaults to alpha_db
    std::uint64_t seed = 1;
    std::vector<double> ebn0_db{0, 2, 4, 6, 8, 10, 12, 14};
    std::vector<std::string> channels{"awgn"};
    double ibo_db = 4.1;
    double sspa_p = 3.0;
    std::size_t cp_len = 64;
    int conv_iters = 30;
    std::size_t conv_symbols = 200;
    std::vector<double> rho_tilde_grid{10, 30, 100, 300};
    std::size_t psd_segment = 1024;
    std::vector<std::size_t> bench_sizes{64, 256, 1024};
    int bench_iters = 200;
    unsigned workers = 0; // 0: hardware concurrency
    std::string out_dir = ".";

    std::size_t n_data() const { return n_carriers - n_free; }
    double alpha() const { return db_to_linear(alpha_db); }
    double rcf_target() const { return std::isnan(rcf_target_db) ? alpha_db : rcf_target_db; }
    unsigned worker_count() const { return workers == 0 ? default_workers() : workers; }
    CarrierPlan plan() const { return CarrierPlan::with_free_count(n_carriers, n_free); }

    AdmmParams direct_params(double b) const
    {
        AdmmParams p;
        p.alpha = alpha();
        p.beta = b;
        p.rho = rho_direct;
        p.max_iters = admm_iters;
        p.oversampling = oversampling;
        return p;
    }
    AdmmParams relax_params(double b) const
    {
        AdmmParams p = direct_params(b);
        p.rho = rho_relax;
        p.rho_tilde = rho_tilde;
        return p;
    }

    void validate() const
    {
        if (n_carriers < 2) throw config_error("n_carriers must be >= 2");
        if (n_free >= n_carriers) throw config_error("n_free must be < n_carriers");
        if (oversampling < 1) throw config_error("oversampling must be >= 1");
        if (n_symbols < 1) throw config_error("symbols must be >= 1");
        if (!(alpha_db >= 0.0)) throw config_error("alpha_db must be >= 0");
        for (double b : betas)
            if (!(b >= 0.0)) throw config_error("beta must be >= 0");
        if (!(beta >= 0.0)) throw config_error("beta must be >= 0");
        if (!(rho_direct > 0.0)) throw config_error("rho must be > 0");
        if (!(rho_tilde > 0.0) || !(rho_relax > 2.0 * rho_tilde))
            throw config_error("relax requires rho > 2 rho_tilde > 0 (rho=" + std::to_string(rho_relax) +
                               ", rho_tilde=" + std::to_string(rho_tilde) + ")");
        if (admm_iters < 0) throw config_error("iters must be >= 0");
        if (rcf_iters < 1) throw config_error("rcf_iters must be >= 1");
        if (!(sspa_p > 0.0)) throw config_error("sspa_p must be > 0");
        for (const auto& c : channels)
            if (c != "awgn" && c != "multipath") throw config_error("unknown channel '" + c + "'");
        if (psd_segment < 2) throw config_error("psd_segment must be >= 2");
        for (double rt : rho_tilde_grid)
            if (!(rt > 0.0)) throw config_error("rho_tilde_grid entries must be > 0");
    }
};

// ---------------------------------------------------------------------------
// key = value configuration files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw config_error("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw config_error("config: '" + key + "' is out of range");
    }
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
    if (out.empty()) throw config_error("config: '" + key + "' needs at least one value");
    return out;
}

} // namespace detail

inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    using namespace detail;
    if (key == "n_carriers") cfg.n_carriers = parse_uint(key, value);
    else if (key == "n_free") cfg.n_free = parse_uint(key, value);
    else if (key == "oversampling") cfg.oversampling = parse_uint(key, value);
    else if (key == "modulation") {
        try {
            cfg.modulation = parse_modulation(value);
        } catch (const std::invalid_argument& e) {
            throw config_error(e.what());
        }
    }
    else if (key == "symbols") cfg.n_symbols = parse_uint(key, value);
    else if (key == "alpha_db") cfg.alpha_db = parse_double(key, value);
    else if (key == "betas") cfg.betas = parse_doubles(key, value);
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "solvers") {
        cfg.solvers.clear();
        for (const auto& s : split_list(value)) cfg.solvers.push_back(parse_solver(s));
        if (cfg.solvers.empty()) throw config_error("config: 'solvers' needs at least one value");
    }
    else if (key == "rho_direct") cfg.rho_direct = parse_double(key, value);
    else if (key == "rho_relax") cfg.rho_relax = parse_double(key, value);
    else if (key == "rho_tilde") cfg.rho_tilde = parse_double(key, value);
    else if (key == "iters") cfg.admm_iters = static_cast<int>(parse_uint(key, value));
    else if (key == "rcf_iters") cfg.rcf_iters = static_cast<int>(parse_uint(key, value));
    else if (key == "rcf_target_db") cfg.rcf_target_db = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "ebn0_db") cfg.ebn0_db = parse_doubles(key, value);
    else if (key == "channels") cfg.channels = split_list(value);
    else if (key == "ibo_db") cfg.ibo_db = parse_double(key, value);
    else if (key == "sspa_p") cfg.sspa_p = parse_double(key, value);
    else if (key == "cp_len") cfg.cp_len = parse_uint(key, value);
    else if (key == "conv_iters") cfg.conv_iters = static_cast<int>(parse_uint(key, value));
    else if (key == "conv_symbols") cfg.conv_symbols = parse_uint(key, value);
    else if (key == "rho_tilde_grid") cfg.rho_tilde_grid = parse_doubles(key, value);
    else if (key == "psd_segment") cfg.psd_segment = parse_uint(key, value);
    else if (key == "bench_sizes") {
        cfg.bench_sizes.clear();
        for (const auto& s : split_list(value)) cfg.bench_sizes.push_back(parse_uint(key, s));
    }
    else if (key == "bench_iters") cfg.bench_iters = static_cast<int>(parse_uint(key, value));
    else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_uint(key, value));
    else if (key == "out") cfg.out_dir = value;
    else throw config_error("config: unknown key '" + key + "'");
}

inline void load_config(ExperimentConfig& cfg, std::istream& in, const std::string& origin = "config")
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const config_error& e) {
            throw config_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    load_config(cfg, in, path);
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

inline FreqSymbol make_symbol(const ExperimentConfig& cfg, const CarrierPlan& plan, const Constellation& con,
                              std::size_t index)
{
    auto rng = symbol_stream(cfg.seed, stream::bits, index);
    const auto bits = random_bits(rng, plan.n_data() * con.bits_per_symbol());
    return map_bits(bits, con, plan);
}

inline std::vector<std::uint8_t> symbol_bits(const ExperimentConfig& cfg, const CarrierPlan& plan,
                                             const Constellation& con, std::size_t index)
{
    auto rng = symbol_stream(cfg.seed, stream::bits, index);
    return random_bits(rng, plan.n_data() * con.bits_per_symbol());
}

struct Processed {
    TimeSymbol x;
    FreqSymbol c;
};

inline Processed process_symbol(SolverKind solver, const FreqSymbol& c_o, const CarrierPlan& plan,
                                const ExperimentConfig& cfg, double beta)
{
    switch (solver) {
    case SolverKind::none: return {cached_transform(plan.n_carriers(), cfg.oversampling).ifft(c_o), c_o};
    case SolverKind::direct: {
        auto r = direct_solve(c_o, plan, cfg.direct_params(beta));
        return {std::move(r.x), std::move(r.c)};
    }
    case SolverKind::relax: {
        auto r = relax_solve(c_o, plan, cfg.relax_params(beta));
        return {std::move(r.x), std::move(r.c)};
    }
    case SolverKind::rcf: {
        auto r = rcf(c_o, plan, RcfParams{cfg.rcf_target(), cfg.rcf_iters}, cfg.oversampling);
        return {std::move(r.x), std::move(r.c)};
    }
    }
    throw std::logic_error("unhandled solver");
}

// Runs `solver` over every symbol and keeps the per-symbol outputs in order.
inline std::vector<Processed> process_batch(SolverKind solver, const ExperimentConfig& cfg, double beta,
                                            std::size_t n_symbols)
{
    const auto plan = cfg.plan();
    const Constellation con(cfg.modulation);
    std::vector<Processed> out(n_symbols);
    parallel_for(
        n_symbols,
        [&](std::size_t i) {
            try {
                out[i] = process_symbol(solver, make_symbol(cfg, plan, con, i), plan, cfg, beta);
            } catch (const numerical_failure& e) {
                throw numerical_failure(std::string(to_string(solver)) + ", symbol " + std::to_string(i) + ": " +
                                        e.what());
            }
        },
        cfg.worker_count());
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string fmt_db(double v)
{
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string fmt_num(double v)
{
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class CsvFile {
public:
    CsvFile(const std::string& dir, const std::string& name, const std::string& header)
        : path_((std::filesystem::path(dir) / name).string())
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        out_.open(path_);
        if (!out_) throw config_error("cannot write '" + path_ + "'");
        out_ << header << '\n';
    }
    template <typename... Fields>
    void row(const Fields&... f)
    {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << f), ...);
        out_ << '\n';
    }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// table2: EVM per (solver, beta)
// ---------------------------------------------------------------------------

struct Table2Row {
    SolverKind solver;
    double beta;
    double evm_db;
};

inline std::vector<Table2Row> run_table2(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto plan = cfg.plan();
    const Constellation con(cfg.modulation);
    std::vector<Table2Row> rows;
    for (auto solver : cfg.solvers) {
        for (double beta : cfg.betas) {
            const auto batch = process_batch(solver, cfg, beta, cfg.n_symbols);
            double acc = 0.0;
            for (std::size_t i = 0; i < batch.size(); ++i)
                acc += evm_ratio(batch[i].c, make_symbol(cfg, plan, con, i), plan);
            rows.push_back({solver, beta, evm_db_from_mean(acc / static_cast<double>(batch.size()))});
        }
    }
    return rows;
}

inline void write_table2(const ExperimentConfig& cfg, const std::vector<Table2Row>& rows)
{
    CsvFile f(cfg.out_dir, "table2.csv", "solver,beta,evm_db");
    for (const auto& r : rows) f.row(to_string(r.solver), fmt_num(r.beta), fmt_db(r.evm_db));
}

// ---------------------------------------------------------------------------
// ccdf: PAPR distribution of transmitted symbols
// ---------------------------------------------------------------------------

struct CcdfSeries {
    SolverKind solver;
    std::vector<double> papr_db;
};

inline std::vector<CcdfSeries> run_ccdf(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<SolverKind> order{SolverKind::none};
    for (auto s : cfg.solvers)
        if (s != SolverKind::none) order.push_back(s);
    std::vector<CcdfSeries> out;
    for (auto solver : order) {
        const auto batch = process_batch(solver, cfg, cfg.beta, cfg.n_symbols);
        CcdfSeries s{solver, {}};
        s.papr_db.reserve(batch.size());
        for (const auto& p : batch) s.papr_db.push_back(papr_db(p.x));
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<double> default_ccdf_thresholds() { return threshold_grid(0.0, 12.0, 0.05); }

inline void write_ccdf(const ExperimentConfig& cfg, const std::vector<CcdfSeries>& series)
{
    CsvFile f(cfg.out_dir, "ccdf.csv", "solver,threshold_db,prob");
    const auto grid = default_ccdf_thresholds();
    for (const auto& s : series)
        for (const auto& p : ccdf(s.papr_db, grid)) f.row(to_string(s.solver), fmt_db(p.threshold_db), fmt_num(p.prob));
}

// ---------------------------------------------------------------------------
// convergence: residual per iteration, consensus gap versus rho_tilde
// ---------------------------------------------------------------------------

struct ConvergenceCurve {
    SolverKind solver;
    std::vector<double> mean_residual;   // index k-1
    std::vector<double> median_residual;
};

struct GapRow {
    double rho_tilde;
    double median_gap;
    std::size_t symbols;
    std::size_t flagged;          // no feasible start could be built
    std::size_t bound_violations; // gap above (1/rho_tilde)(||S_D(c1-c_o)||^2 - ||S_D(c*-c_o)||^2)
};

struct ConvergenceResult {
    std::vector<ConvergenceCurve> curves;
    std::vector<GapRow> gaps;
};

inline double median_of(std::vector<double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

inline ConvergenceResult run_convergence(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto plan = cfg.plan();
    const Constellation con(cfg.modulation);
    const std::size_t n = cfg.conv_symbols;
    const auto iters = static_cast<std::size_t>(cfg.conv_iters);
    ConvergenceResult out;

    for (auto solver : {SolverKind::direct, SolverKind::relax}) {
        std::vector<std::vector<double>> res(n, std::vector<double>(iters, 0.0));
        parallel_for(
            n,
            [&](std::size_t i) {
                const auto c_o = make_symbol(cfg, plan, con, i);
                if (solver == SolverKind::direct) {
                    auto p = cfg.direct_params(cfg.beta);
                    p.bypass = false;
                    DirectSolver s(c_o, plan, p);
                    for (std::size_t k = 0; k < iters; ++k) res[i][k] = s.step().change_residual;
                } else {
                    auto p = cfg.relax_params(cfg.beta);
                    p.bypass = false;
                    RelaxSolver s(c_o, plan, p);
                    for (std::size_t k = 0; k < iters; ++k) res[i][k] = s.step().change_residual;
                }
            },
            cfg.worker_count());
        ConvergenceCurve curve{solver, {}, {}};
        for (std::size_t k = 0; k < iters; ++k) {
            std::vector<double> col(n);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = res[i][k];
                acc += col[i];
            }
            curve.mean_residual.push_back(acc / static_cast<double>(n));
            curve.median_residual.push_back(median_of(std::move(col)));
        }
        out.curves.push_back(std::move(curve));
    }

    for (double rt : cfg.rho_tilde_grid) {
        std::vector<double> gap(n, -1.0);
        std::vector<char> violation(n, 0);
        parallel_for(
            n,
            [&](std::size_t i) {
                const auto c_o = make_symbol(cfg, plan, con, i);
                auto p = cfg.relax_params(cfg.beta);
                p.rho = 3.0 * rt;
                p.rho_tilde = rt;
                const auto c1 = make_feasible_start(c_o, plan, p, 0.2, 100, cfg.rho_direct);
                if (!c1) return;
                const auto r = relax_solve_feasible(c_o, plan, p, *c1);
                gap[i] = r.report.consensus_gap;
                const double bound = (plan.data_distortion(*c1, c_o) - plan.data_distortion(r.c, c_o)) / rt;
                violation[i] = gap[i] > bound + 1e-12 * (1.0 + std::abs(bound));
            },
            cfg.worker_count());
        GapRow row{rt, 0.0, 0, 0, 0};
        std::vector<double> ok;
        for (std::size_t i = 0; i < n; ++i) {
            if (gap[i] < 0.0) {
                ++row.flagged;
                continue;
            }
            ok.push_back(gap[i]);
            row.bound_violations += violation[i] != 0;
        }
        row.symbols = ok.size();
        row.median_gap = median_of(std::move(ok));
        out.gaps.push_back(row);
    }
    return out;
}

inline void write_convergence(const ExperimentConfig& cfg, const ConvergenceResult& r)
{
    CsvFile f(cfg.out_dir, "convergence.csv", "solver,iteration,mean_residual,median_residual");
    for (const auto& c : r.curves)
        for (std::size_t k = 0; k < c.mean_residual.size(); ++k)
            f.row(to_string(c.solver), k + 1, fmt_num(c.mean_residual[k]), fmt_num(c.median_residual[k]));
    CsvFile g(cfg.out_dir, "consensus_gap.csv", "rho_tilde,median_gap,symbols,flagged,bound_violations");
    for (const auto& row : r.gaps)
        g.row(fmt_num(row.rho_tilde), fmt_num(row.median_gap), row.symbols, row.flagged, row.bound_violations);
}

// ---------------------------------------------------------------------------
// ber: SSPA + channel + ZF receiver
// ---------------------------------------------------------------------------

struct BerRow {
    std::string channel;
    std::string solver; // "ideal" is unprocessed through a linear PA
    double ebn0_db;
    std::size_t errors;
    std::size_t bits;
    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

struct LinkSetup {
    double a_sat = 0.0;   // 0: linear PA
    double eb = 0.0;
    cplx gain{1.0, 0.0};  // mean in-band gain from c_o to the PA output, known to the receiver
};

inline LinkSetup link_setup(const std::vector<Processed>& batch, const ExperimentConfig& cfg, const CarrierPlan& plan,
                            const Constellation& con, bool linear_pa)
{
    const auto& tf = cached_transform(plan.n_carriers(), cfg.oversampling);
    double power = 0.0, es = 0.0;
    std::size_t samples = 0;
    for (const auto& p : batch) {
        power += squared_norm(p.x);
        samples += p.x.size();
        es += squared_norm(tf.fft(p.x));
    }
    LinkSetup s;
    es /= static_cast<double>(batch.size());
    s.eb = energy_per_bit(es, plan.n_data(), con.bits_per_symbol());
    if (!linear_pa) {
        SspaParams sp{cfg.sspa_p, cfg.ibo_db};
        s.a_sat = sp.saturation_amplitude(power / static_cast<double>(samples));
    }
    cplx cross{0.0, 0.0};
    double ref = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto c_o = make_symbol(cfg, plan, con, i);
        const auto y = tf.fft(s.a_sat > 0.0 ? sspa(batch[i].x, s.a_sat, cfg.sspa_p) : batch[i].x);
        for (auto k : plan.data_indices()) {
            cross += y[k] * std::conj(c_o[k]);
            ref += std::norm(c_o[k]);
        }
    }
    if (ref > 0.0 && std::abs(cross) > 0.0) s.gain = cross / ref;
    return s;
}

inline std::vector<BerRow> run_ber(const ExperimentConfig& cfg, bool include_ideal = true)
{
    cfg.validate();
    const auto plan = cfg.plan();
    const Constellation con(cfg.modulation);
    const auto& tf = cached_transform(plan.n_carriers(), cfg.oversampling);

    struct Entry {
        std::string name;
        std::vector<Processed> batch;
        LinkSetup link;
    };
    std::vector<Entry> entries;
    {
        auto unprocessed = process_batch(SolverKind::none, cfg, cfg.beta, cfg.n_symbols);
        if (include_ideal) {
            const auto link = link_setup(unprocessed, cfg, plan, con, true);
            entries.push_back({"ideal", unprocessed, link});
        }
        const auto link = link_setup(unprocessed, cfg, plan, con, false);
        entries.push_back({"none", std::move(unprocessed), link});
    }
    for (auto s : cfg.solvers) {
        if (s == SolverKind::none) continue;
        auto batch = process_batch(s, cfg, cfg.beta, cfg.n_symbols);
        const auto link = link_setup(batch, cfg, plan, con, false);
        entries.push_back({std::string(to_string(s)), std::move(batch), link});
    }

    std::vector<BerRow> rows;
    for (const auto& channel : cfg.channels) {
        std::optional<MultipathChannel> mp;
        if (channel == "multipath") mp.emplace(MultipathProfile{}, plan.n_carriers(), cfg.oversampling, cfg.cp_len);
        for (const auto& e : entries) {
            for (std::size_t pi = 0; pi < cfg.ebn0_db.size(); ++pi) {
                const double ebn0 = cfg.ebn0_db[pi];
                const double var = noise_variance(ebn0, e.link.eb, tf.time_length());
                std::vector<std::size_t> errs(e.batch.size(), 0);
                parallel_for(
                    e.batch.size(),
                    [&](std::size_t i) {
                        auto y = e.link.a_sat > 0.0 ? sspa(e.batch[i].x, e.link.a_sat, cfg.sspa_p) : e.batch[i].x;
                        if (mp) y = mp->apply(y);
                        auto rng = symbol_stream(cfg.seed, stream::noise + (pi << 8), i);
                        y = add_noise(std::move(y), var, rng);
                        auto c = tf.fft(y);
                        if (mp) c = zf_equalize(std::move(c), mp->response());
                        for (auto& v : c) v /= e.link.gain;
                        const auto rx = demap_bits(c, con, plan);
                        errs[i] = bit_errors(symbol_bits(cfg, plan, con, i), rx);
                    },
                    cfg.worker_count());
                BerRow row{channel, e.name, ebn0, 0, 0};
                for (auto v : errs) row.errors += v;
                row.bits = e.batch.size() * plan.n_data() * con.bits_per_symbol();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline void write_ber(const ExperimentConfig& cfg, const std::vector<BerRow>& rows)
{
    CsvFile f(cfg.out_dir, "ber.csv", "channel,solver,ebn0_db,ber,errors,bits");
    for (const auto& r : rows) f.row(r.channel, r.solver, fmt_db(r.ebn0_db), fmt_num(r.ber()), r.errors, r.bits);
}

// ---------------------------------------------------------------------------
// psd: spectrum after the SSPA
// ---------------------------------------------------------------------------

struct PsdSeries {
    std::string solver;
    std::vector<double> power; // natural FFT order, linear density
    double out_of_band_db = 0.0;
};

inline std::vector<PsdSeries> run_psd(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto plan = cfg.plan();
    const Constellation con(cfg.modulation);
    std::vector<SolverKind> order{SolverKind::none};
    for (auto s : cfg.solvers)
        if (s != SolverKind::none) order.push_back(s);
    std::vector<PsdSeries> out;
    for (auto s : order) {
        const auto batch = process_batch(s, cfg, cfg.beta, cfg.n_symbols);
        const auto link = link_setup(batch, cfg, plan, con, false);
        std::vector<cplx> stream;
        stream.reserve(batch.size() * batch.front().x.size());
        for (const auto& p : batch) {
            const auto y = sspa(p.x, link.a_sat, cfg.sspa_p);
            stream.insert(stream.end(), y.begin(), y.end());
        }
        if (stream.size() < cfg.psd_segment) throw config_error("psd: not enough samples for one segment");
        PsdSeries series{std::string(to_string(s)), psd(stream, cfg.psd_segment, Window::hann), 0.0};
        series.out_of_band_db = out_of_band_db(series.power, cfg.oversampling);
        out.push_back(std::move(series));
    }
    return out;
}

inline void write_psd(const ExperimentConfig& cfg, const std::vector<PsdSeries>& series)
{
    CsvFile f(cfg.out_dir, "psd.csv", "solver,freq,psd_db");
    for (const auto& s : series) {
        const auto db = normalize_db(s.power);
        const std::size_t n = db.size();
        // Centred display: frequencies in [-0.5, 0.5) cycles per sample.
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = (j + n / 2) % n;
            const double f_norm = static_cast<double>(static_cast<std::ptrdiff_t>(k) -
                                                      (k >= (n + 1) / 2 ? static_cast<std::ptrdiff_t>(n) : 0)) /
                                  static_cast<double>(n);
            f.row(s.solver, fmt_num(f_norm), fmt_db(db[k]));
        }
    }
    CsvFile g(cfg.out_dir, "psd_summary.csv", "solver,out_of_band_db");
    for (const auto& s : series) g.row(s.solver, fmt_db(s.out_of_band_db));
}

// ---------------------------------------------------------------------------
// bench: per-iteration wall time versus lN
// ---------------------------------------------------------------------------

struct BenchRow {
    std::size_t n_carriers;
    std::size_t time_length;
    double direct_iter_us;
    double relax_iter_us;
    double fft_pair_us;
    double setup_us; // zero-iteration solve
};

struct BenchFit {
    double slope = 0.0;      // free log-log slope against lN log2 lN
    double r2_free = 0.0;    // R^2 of the free-slope fit
    double r2_unit = 0.0;    // R^2 with the slope pinned to 1 (time = c lN log2 lN)
};

inline BenchFit fit_nlogn(const std::vector<BenchRow>& rows, bool use_relax = false)
{
    BenchFit f;
    const std::size_t n = rows.size();
    if (n < 2) return f;
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        const double ln = static_cast<double>(r.time_length);
        xs.push_back(std::log(ln * std::log2(ln)));
        ys.push_back(std::log(use_relax ? r.relax_iter_us : r.direct_iter_us));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    f.slope = sxy / sxx;
    f.r2_free = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    const double c = my - mx; // intercept with unit slope
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (ys[i] - xs[i] - c) * (ys[i] - xs[i] - c);
    f.r2_unit = syy > 0.0 ? 1.0 - ss / syy : 1.0;
    return f;
}

inline std::vector<BenchRow> run_bench(const ExperimentConfig& cfg)
{
    cfg.validate();
    using clock = std::chrono::steady_clock;
    auto us = [](clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); };
    const Constellation con(cfg.modulation);
    std::vector<BenchRow> rows;
    for (std::size_t n : cfg.bench_sizes) {
        ExperimentConfig local = cfg;
        local.n_carriers = n;
        local.n_free = std::max<std::size_t>(1, n * cfg.n_free / cfg.n_carriers);
        const auto plan = local.plan();
        const auto c_o = make_symbol(local, plan, con, 0);
        const auto& tf = cached_transform(n, cfg.oversampling);
        const int iters = std::max(1, cfg.bench_iters);

        BenchRow row{n, tf.time_length(), 0, 0, 0, 0};
        auto pd = local.direct_params(cfg.beta);
        pd.bypass = false;
        auto pr = local.relax_params(cfg.beta);
        pr.bypass = false;

        // Warm caches and plans once.
        (void)DirectSolver(c_o, plan, pd).step();

        auto best_of = [&](auto&& body) {
            double best = std::numeric_limits<double>::infinity();
            for (int rep = 0; rep < 5; ++rep) best = std::min(best, body());
            return best;
        };
        row.direct_iter_us = best_of([&] {
            DirectSolver s(c_o, plan, pd);
            const auto t0 = clock::now();
            for (int i = 0; i < iters; ++i) (void)s.step();
            return us(clock::now() - t0) / iters;
        });
        row.relax_iter_us = best_of([&] {
            RelaxSolver s(c_o, plan, pr);
            const auto t0 = clock::now();
            for (int i = 0; i < iters; ++i) (void)s.step();
            return us(clock::now() - t0) / iters;
        });
        row.fft_pair_us = best_of([&] {
            auto x = tf.ifft(c_o);
            const auto t0 = clock::now();
            for (int i = 0; i < iters; ++i) x = tf.ifft(tf.fft(x));
            return us(clock::now() - t0) / iters;
        });
        row.setup_us = best_of([&] {
            auto p0 = pd;
            p0.max_iters = 0;
            const auto t0 = clock::now();
            (void)direct_solve(c_o, plan, p0);
            return us(clock::now() - t0);
        });
        rows.push_back(row);
    }
    return rows;
}

inline void write_bench(const ExperimentConfig& cfg, const std::vector<BenchRow>& rows)
{
    CsvFile f(cfg.out_dir, "bench.csv", "n_carriers,time_length,direct_iter_us,relax_iter_us,fft_pair_us,setup_us");
    for (const auto& r : rows)
        f.row(r.n_carriers, r.time_length, fmt_num(r.direct_iter_us), fmt_num(r.relax_iter_us), fmt_num(r.fft_pair_us),
              fmt_num(r.setup_us));
}

} // namespace ofdm_papr

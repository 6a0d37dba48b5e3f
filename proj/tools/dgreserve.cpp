#include <chrono>
#include <filesystem>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "dgr/concentration.hpp"
#include "dgr/odp.hpp"
#include "dgr/patterns.hpp"
#include "dgr/predictive.hpp"
#include "dgr/simlab.hpp"
#include "dgr/triangle.hpp"
#include "json_report.hpp"

#ifndef DGR_VERSION
#define DGR_VERSION "0.0.0"
#endif

namespace {

using dgr::cli::json;
using dgr::cli::to_json;

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream o;
    o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return o.str();
}

/// Everything needed to rerun a command: argv, resolved parameters, seed and
/// input digests. Outputs are identical on rerun except for the clock fields.
struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    json parameters = json::object();
    std::optional<std::uint64_t> seed;
    json inputs = json::object();
    std::string started = utc_now();
    std::chrono::steady_clock::time_point clock = std::chrono::steady_clock::now();

    void add_input(const std::string& path) { inputs[path] = {{"sha256", sha256_file(path)}}; }

    json to_json() const
    {
        json m{{"command", command},
               {"argv", argv},
               {"parameters", parameters},
               {"version", DGR_VERSION},
               {"inputs", inputs},
               {"started_utc", started},
               {"wall_clock_seconds",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - clock).count()}};
        m["seed"] = seed ? json(*seed) : json(nullptr);
        return m;
    }
};

struct TriangleArgs {
    std::string path;
    std::string layout = "long";
    std::string kind = "amounts";
    bool cumulative = false;
    std::string exposures;
    std::string exposure_proxy;
};

void add_triangle_options(CLI::App* cmd, TriangleArgs& a)
{
    cmd->add_option("triangle", a.path, "Triangle CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--layout", a.layout, "CSV layout")->check(CLI::IsMember({"long", "wide"}));
    cmd->add_option("--kind", a.kind, "Cell kind")->check(CLI::IsMember({"amounts", "counts"}));
    cmd->add_flag("--cumulative", a.cumulative, "Input holds cumulative values");
    cmd->add_option("--exposures", a.exposures, "Exposure sidecar CSV (accident,exposure)")->check(CLI::ExistingFile);
    cmd->add_option("--exposure-proxy", a.exposure_proxy, "Use a triangle column as exposure")
        ->check(CLI::IsMember({"first-lag"}));
}

dgr::Triangle read_triangle(const TriangleArgs& a, Manifest& manifest)
{
    manifest.add_input(a.path);
    manifest.parameters["layout"] = a.layout;
    manifest.parameters["kind"] = a.kind;
    manifest.parameters["cumulative"] = a.cumulative;
    const auto layout = a.layout == "wide" ? dgr::CsvLayout::wide : dgr::CsvLayout::long_format;
    const auto kind = a.kind == "counts" ? dgr::TriangleKind::counts : dgr::TriangleKind::amounts;
    dgr::Triangle t = dgr::load_triangle(a.path, layout, kind);
    if (a.cumulative) {
        t = dgr::decumulate(t);
    }
    if (!a.exposures.empty() && !a.exposure_proxy.empty()) {
        throw CLI::ValidationError("--exposures and --exposure-proxy are mutually exclusive");
    }
    if (!a.exposures.empty()) {
        manifest.add_input(a.exposures);
        manifest.parameters["exposures"] = a.exposures;
        t = t.with_exposures(dgr::load_exposures(a.exposures, t.accident_years()));
    } else if (a.exposure_proxy == "first-lag") {
        manifest.parameters["exposure_proxy"] = a.exposure_proxy;
        t = t.with_exposures(t.dense().col(0));
    }
    for (const auto& cell : dgr::negative_cells(t)) {
        std::cerr << "warning: negative increment at accident year " << cell.row + 1 << ", lag " << cell.lag << "\n";
    }
    return t;
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::runtime_error("cannot write " + out_path);
    }
    out << text;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed)
{
    if (seed) {
        return *seed;
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------

struct FitArgs {
    TriangleArgs tri;
    std::string divisor = "n-1";
    std::string row_rule = "through";
    std::optional<double> prior_q;
    std::vector<std::string> methods{"cl"};
    std::string out;
};

int run_fit(const FitArgs& a, Manifest& manifest)
{
    const auto t = read_triangle(a.tri, manifest);
    dgr::ConcentrationOptions opts;
    opts.divisor = a.divisor == "n" ? dgr::VarianceDivisor::n : dgr::VarianceDivisor::n_minus_1;
    opts.rows = a.row_rule == "beyond" ? dgr::RowRule::beyond_horizon : dgr::RowRule::through_horizon;
    manifest.parameters["divisor"] = a.divisor;
    manifest.parameters["row_rule"] = a.row_rule;
    manifest.parameters["methods"] = a.methods;
    if (a.prior_q) {
        manifest.parameters["prior_q"] = *a.prior_q;
    }

    const auto cl = dgr::chain_ladder(t);
    json report{{"triangle", {{"accident_years", t.accident_years()}, {"lags", t.lags()}}},
                {"link_ratios", to_json(cl.link_ratios)},
                {"pattern", to_json(cl.pattern)}};
    if (!cl.pattern.floored().empty()) {
        std::cerr << "warning: non-positive development proportions were floored and the pattern renormalised\n";
    }
    report["concentration"] = to_json(dgr::estimate_c(t, opts));

    json reserves = json::object();
    for (const auto& m : a.methods) {
        if (m == "cl") {
            reserves["cl"] = to_json(dgr::cl_ultimates(t, cl.pattern));
        } else if (m == "bf") {
            if (!t.exposures() || !a.prior_q) {
                throw CLI::ValidationError("BF reserves need exposures and --prior-q");
            }
            reserves["bf"] = to_json(dgr::bf_ultimates(t, cl.pattern, *t.exposures() * *a.prior_q));
        } else if (m == "cc") {
            reserves["cc"] = to_json(dgr::cape_cod_ultimates(t, cl.pattern));
        }
    }
    report["reserves"] = reserves;
    report["manifest"] = manifest.to_json();
    emit(a.out, report.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct BootstrapArgs {
    TriangleArgs tri;
    std::string anchor = "cl";
    std::string method = "multinomial";
    std::int64_t B = 5000;
    std::optional<std::uint64_t> seed;
    std::optional<double> q_bf;
    std::optional<double> c_hat;
    double inclusion_threshold = 5.0;
    int threads = 1;
    std::string format = "json";
    std::string draws;
    std::string out;
};

std::string bootstrap_csv(const dgr::ReserveDistribution& d)
{
    std::ostringstream o;
    o.precision(12);
    o << "accident_year,status,F,cF,point_reserve,mean,sd,q05,q25,q50,q75,q95\n";
    auto line = [&](const std::string& label, const std::string& status, double F, double cF, double point,
                    const dgr::Summary& s) {
        o << label << ',' << status << ',' << F << ',' << cF << ',' << point << ',';
        if (s.mean) {
            o << *s.mean;
        }
        o << ',' << s.sd << ',' << s.q05 << ',' << s.q25 << ',' << s.q50 << ',' << s.q75 << ',' << s.q95 << '\n';
    };
    for (const auto& r : d.rows) {
        const bool simulated = r.status != dgr::RowStatus::excluded && r.status != dgr::RowStatus::fully_developed;
        line(std::to_string(r.row + 1), to_string(r.status), r.F, r.cF, r.point_reserve,
             simulated ? d.row_summary(r.row) : dgr::Summary{});
    }
    line("total", "", 0.0, 0.0, d.point_reserve, d.summary);
    return o.str();
}

int run_bootstrap(const BootstrapArgs& a, Manifest& manifest)
{
    const auto t = read_triangle(a.tri, manifest);
    const std::uint64_t seed = resolve_seed(a.seed);
    manifest.seed = seed;
    manifest.parameters["anchor"] = a.anchor;
    manifest.parameters["method"] = a.method;
    manifest.parameters["B"] = a.B;
    manifest.parameters["inclusion_threshold"] = a.inclusion_threshold;
    manifest.parameters["threads"] = a.threads;

    dgr::BootstrapOptions opts;
    opts.B = a.B;
    opts.seed = seed;
    opts.inclusion_threshold = a.inclusion_threshold;
    opts.threads = a.threads;

    json report;
    dgr::ReserveDistribution dist;
    if (a.method == "odp") {
        if (a.anchor != "cl") {
            throw CLI::ValidationError("the ODP bootstrap is chain-ladder anchored only");
        }
        const auto fit = dgr::odp_fit(t);
        dist = dgr::odp_bootstrap(fit, opts);
        report["odp"] = {{"dispersion", fit.dispersion}, {"dof", fit.dof}, {"n", fit.n}, {"p", fit.p}};
    } else {
        const auto pattern = dgr::chain_ladder_pattern(t);
        double c_hat;
        if (a.c_hat) {
            c_hat = *a.c_hat;
            manifest.parameters["c_hat_override"] = c_hat;
            report["concentration"] = {{"c_hat", c_hat}, {"source", "override"}};
        } else {
            const auto est = dgr::estimate_c(t);
            c_hat = est.c_hat;
            report["concentration"] = {
                {"c_hat", c_hat}, {"source", "estimated"}, {"diagnostic", to_string(est.diagnostic)}};
        }
        const auto diag = dgr::latest_diagonal(t);
        if (a.anchor == "bf") {
            if (!a.q_bf) {
                throw CLI::ValidationError("--anchor bf requires --q-bf");
            }
            if (!t.exposures()) {
                throw CLI::ValidationError("--anchor bf requires --exposures or --exposure-proxy");
            }
            manifest.parameters["q_bf"] = *a.q_bf;
            dist = dgr::bf_bootstrap(diag, *t.exposures(), *a.q_bf, pattern, c_hat, opts);
        } else {
            dist = dgr::multinomial_bootstrap(diag, pattern, c_hat, opts);
        }
        report["pattern"] = to_json(pattern);
    }
    report["distribution"] = to_json(dist);

    if (!a.draws.empty()) {
        std::ofstream out(a.draws);
        if (!out) {
            throw std::runtime_error("cannot write " + a.draws);
        }
        out.precision(17);
        out << "replication,total";
        for (Eigen::Index i = 0; i < dist.per_year.cols(); ++i) {
            out << ",year" << i + 1;
        }
        out << '\n';
        for (Eigen::Index b = 0; b < dist.per_year.rows(); ++b) {
            out << b << ',' << dist.total[b];
            for (Eigen::Index i = 0; i < dist.per_year.cols(); ++i) {
                out << ',' << dist.per_year(b, i);
            }
            out << '\n';
        }
        manifest.parameters["draws"] = a.draws;
    }

    report["manifest"] = manifest.to_json();
    if (a.format == "csv") {
        emit(a.out, bootstrap_csv(dist) + "# manifest " + manifest.to_json().dump() + "\n");
    } else {
        emit(a.out, report.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string study;
    std::string config;
    std::optional<int> M;
    std::optional<int> B;
    std::optional<int> I;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    double nu = 1e4;
    double phi = 1.0;
    std::string format = "json";
    std::string out;
};

int run_simulate(const SimulateArgs& a, Manifest& manifest)
{
    // A config file replaces the study's built-in sweep with that single
    // configuration; its seed applies unless --seed is given.
    std::optional<dgr::SimConfig> from_file;
    std::optional<std::uint64_t> seed_arg = a.seed;
    if (!a.config.empty()) {
        if (a.study == "sigma-c" || a.study == "conservatism" || a.study == "grid") {
            throw CLI::ValidationError("--config applies to the coverage studies only");
        }
        manifest.add_input(a.config);
        manifest.parameters["config"] = a.config;
        from_file = dgr::load_sim_config(a.config);
        if (!seed_arg) {
            seed_arg = from_file->seed;
        }
    }
    const std::uint64_t seed = resolve_seed(seed_arg);
    manifest.seed = seed;
    manifest.parameters["study"] = a.study;
    manifest.parameters["threads"] = a.threads;

    auto configure = [&](dgr::SimConfig cfg) {
        if (a.M) {
            cfg.M = *a.M;
        }
        if (a.B) {
            cfg.B = *a.B;
        }
        if (a.I) {
            cfg.I = *a.I;
        }
        cfg.seed = seed;
        cfg.threads = a.threads;
        cfg.validate();
        return cfg;
    };

    json payload;
    std::string csv;
    int failures = 0;
    auto coverage_rows = [&](dgr::SimulationReport& report, const std::vector<std::pair<std::string, dgr::SimConfig>>& cfgs,
                             const std::vector<dgr::BootstrapMethod>& methods) {
        json configs = json::array();
        for (const auto& [label, base] : cfgs) {
            const auto cfg = configure(base);
            configs.push_back({{"label", label}, {"config", dgr::format_sim_config(cfg)}});
            for (auto m : methods) {
                report.rows.push_back(dgr::run_coverage_study(cfg, m, label));
                failures += report.rows.back().failures;
            }
        }
        manifest.parameters["configs"] = configs;
    };

    const auto mult = dgr::BootstrapMethod::multinomial;
    const auto odp = dgr::BootstrapMethod::odp;
    if (a.study == "sigma-c") {
        const int I = a.I.value_or(100);
        const int M = a.M.value_or(10000);
        manifest.parameters["I"] = I;
        manifest.parameters["M"] = M;
        manifest.parameters["c_values"] = {20, 50, 100};
        const auto rows = dgr::verify_sigma_c({20.0, 50.0, 100.0}, I, M, seed, a.threads);
        payload = to_json(rows);
        std::ostringstream o;
        dgr::write_csv(o, rows);
        csv = o.str();
    } else if (a.study == "conservatism") {
        const int M = a.M.value_or(2000);
        const int B = a.B.value_or(2000);
        manifest.parameters["M"] = M;
        manifest.parameters["B"] = B;
        manifest.parameters["nu"] = a.nu;
        manifest.parameters["phi"] = a.phi;
        manifest.parameters["F_values"] = {0.1, 0.2, 0.5, 0.8};
        const auto rows = dgr::verify_conservatism({0.1, 0.2, 0.5, 0.8}, a.nu, a.phi, M, B, seed, a.threads);
        payload = to_json(rows);
        std::ostringstream o;
        dgr::write_csv(o, rows);
        csv = o.str();
    } else if (a.study == "grid") {
        const int M = a.M.value_or(500);
        const int B = a.B.value_or(500);
        manifest.parameters["M"] = M;
        manifest.parameters["B"] = B;
        auto report = dgr::sensitivity_grid({10, 20, 30, 50, 100, 200}, {7, 10, 15}, {5, 10}, M, B, seed, a.threads);
        for (const auto& r : report.rows) {
            failures += r.failures;
        }
        payload = to_json(report);
        std::ostringstream o;
        dgr::write_csv(o, report);
        csv = o.str();
    } else {
        dgr::SimulationReport report;
        report.study = a.study;
        if (from_file) {
            const auto methods = a.study == "compare-odp" ? std::vector{mult, odp} : std::vector{mult};
            coverage_rows(report, {{std::filesystem::path(a.config).stem().string(), *from_file}}, methods);
        } else if (a.study == "correct") {
            coverage_rows(report, {{"correct", dgr::presets::correct()}}, {mult});
        } else if (a.study == "nonstat") {
            std::vector<std::pair<std::string, dgr::SimConfig>> cfgs;
            for (double s : {0.0, 0.02, 0.05, 0.10}) {
                std::ostringstream label;
                label << "sigma_delta=" << s;
                cfgs.emplace_back(label.str(), dgr::presets::nonstationary(s));
            }
            coverage_rows(report, cfgs, {mult});
        } else if (a.study == "tweedie") {
            std::vector<std::pair<std::string, dgr::SimConfig>> cfgs;
            for (double p : {1.3, 1.5, 1.8}) {
                std::ostringstream label;
                label << "p=" << p;
                cfgs.emplace_back(label.str(), dgr::presets::tweedie(p));
            }
            coverage_rows(report, cfgs, {mult});
        } else if (a.study == "compare-odp") {
            coverage_rows(report,
                          {{"dirichlet-gamma", dgr::presets::compare_odp(dgr::Dgp::dirichlet_gamma)},
                           {"nonstationary sigma_delta=0.05", dgr::presets::compare_odp(dgr::Dgp::nonstationary, 0.05)},
                           {"tweedie p=1.3", dgr::presets::compare_odp(dgr::Dgp::tweedie, 1.3)},
                           {"tweedie p=1.5", dgr::presets::compare_odp(dgr::Dgp::tweedie, 1.5)},
                           {"tweedie p=1.8", dgr::presets::compare_odp(dgr::Dgp::tweedie, 1.8)}},
                          {mult, odp});
        }
        payload = to_json(report);
        std::ostringstream o;
        dgr::write_csv(o, report);
        csv = o.str();
    }

    if (failures > 0) {
        std::cerr << "warning: " << failures << " replication(s) failed and were excluded; see the failures column\n";
    }
    if (a.format == "csv") {
        emit(a.out, csv + "# manifest " + manifest.to_json().dump() + "\n");
    } else {
        emit(a.out, json{{"study", a.study}, {"results", payload}, {"manifest", manifest.to_json()}}.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dirichlet-Gamma conditional predictive bootstrap for claims reserving"};
    app.set_version_flag("--version", DGR_VERSION);
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Estimate the development pattern, c and point reserves");
    add_triangle_options(fit_cmd, fit.tri);
    fit_cmd->add_option("--divisor", fit.divisor, "Sample variance divisor")->check(CLI::IsMember({"n-1", "n"}));
    fit_cmd->add_option("--row-rule", fit.row_rule, "Rows entering horizon k")
        ->check(CLI::IsMember({"through", "beyond"}));
    fit_cmd->add_option("--prior-q", fit.prior_q, "Prior loss ratio for BF (prior = exposure * q)")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--methods", fit.methods, "Point methods: cl, bf, cc")
        ->delimiter(',')
        ->check(CLI::IsMember({"cl", "bf", "cc"}));
    fit_cmd->add_option("-o,--out", fit.out, "Output file (default stdout)");

    BootstrapArgs boot;
    auto* boot_cmd = app.add_subcommand("bootstrap", "Predictive reserve distribution");
    add_triangle_options(boot_cmd, boot.tri);
    boot_cmd->add_option("--anchor", boot.anchor, "Point anchor")->check(CLI::IsMember({"cl", "bf"}));
    boot_cmd->add_option("--method", boot.method, "Bootstrap")->check(CLI::IsMember({"multinomial", "odp"}));
    boot_cmd->add_option("--B", boot.B, "Bootstrap replications")->check(CLI::PositiveNumber);
    boot_cmd->add_option("--seed", boot.seed, "Random seed (generated and recorded when absent)");
    boot_cmd->add_option("--q-bf", boot.q_bf, "BF prior loss ratio")->check(CLI::PositiveNumber);
    boot_cmd->add_option("--c-hat", boot.c_hat, "Use this concentration instead of estimating it")
        ->check(CLI::PositiveNumber);
    boot_cmd->add_option("--inclusion-threshold", boot.inclusion_threshold, "Exclude rows with c*F below this")
        ->check(CLI::NonNegativeNumber);
    boot_cmd->add_option("--threads", boot.threads, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    boot_cmd->add_option("--format", boot.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    boot_cmd->add_option("--draws", boot.draws, "Write every draw to this CSV");
    boot_cmd->add_option("-o,--out", boot.out, "Output file (default stdout)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo studies");
    sim_cmd->add_option("--study", sim.study, "Study")
        ->required()
        ->check(CLI::IsMember({"correct", "nonstat", "tweedie", "grid", "sigma-c", "conservatism", "compare-odp"}));
    sim_cmd->add_option("--config", sim.config, "Config file run in place of the built-in sweep")
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--M", sim.M, "Replications")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--B", sim.B, "Bootstrap size")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--I", sim.I, "Accident years")->check(CLI::Range(2, 100000));
    sim_cmd->add_option("--seed", sim.seed, "Random seed (generated and recorded when absent)");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--nu", sim.nu, "Conservatism study: row mean")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--phi", sim.phi, "Conservatism study: dispersion")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sim_cmd->add_option("-o,--out", sim.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    Manifest manifest;
    manifest.argv.assign(argv, argv + argc);
    try {
        if (fit_cmd->parsed()) {
            manifest.command = "fit";
            return run_fit(fit, manifest);
        }
        if (boot_cmd->parsed()) {
            manifest.command = "bootstrap";
            return run_bootstrap(boot, manifest);
        }
        manifest.command = "simulate";
        return run_simulate(sim, manifest);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

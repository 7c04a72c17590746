// Command-line front end: Monte Carlo runs, theory curves, freeness checks,
// measurement-vs-theory comparisons, and SVG plots.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure,
// 3 acceptance-comparison failure (compare).
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qsff/io.hpp"

namespace {

using namespace qsff;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::optional<int> workers;
    std::optional<std::string> out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--seed", seed, "override master seed");
        cmd->add_option("--samples", samples, "override n_samples");
        cmd->add_option("--workers", workers, "override worker count");
        cmd->add_option("--out", out, "override output directory");
    }

    RunConfig load() const {
        RunConfig cfg = parse_config(read_file(config_path));
        if (seed) cfg.model.master_seed = *seed;
        if (samples) cfg.model.n_samples = *samples;
        if (workers) cfg.workers = *workers;
        if (out) cfg.output_dir = *out;
        return cfg;
    }
};

Observable observable_at(const RunConfig& cfg, size_t idx) {
    if (cfg.observables.size() <= idx)
        throw ConfigError("config requires at least " + std::to_string(idx + 1) + " observable spec(s)");
    return build_observable(PauliString::parse(cfg.observables[idx]), cfg.model);
}

double run_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_sff(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    TimeSeriesEstimate est = sff_run(cfg.model, RunOptions{cfg.workers});
    TheoryCurve theory;
    if (cfg.model.ensemble == EnsembleKind::ancilla)
        theory = theory_curve(FormulaId::full_plateau, 0, cfg.model.t_max, cfg.model);
    else {
        // CUE reference min(t, dim)/dim^2
        theory.formula_id = FormulaId::full_plateau;
        const double d = static_cast<double>(cfg.model.dim());
        for (long t = 0; t <= cfg.model.t_max; ++t) {
            theory.t_grid.push_back(t);
            theory.values.push_back(std::min(static_cast<double>(t), d) / (d * d));
        }
        theory.values[0] = 1.0;  // K(0) = 1
    }
    write_series_csv(est, &theory, cfg.output_dir);
    write_meta_json(cfg, run_seconds(start), cfg.output_dir);
    std::cout << "sff: wrote " << (std::filesystem::path(cfg.output_dir) / "series.csv").string()
              << " (n=" << est.n << ")\n";
    return 0;
}

int cmd_two_point(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    Observable a = observable_at(cfg, 0);
    Observable b = cfg.observables.size() > 1 ? observable_at(cfg, 1) : a;
    TimeSeriesEstimate est = two_point_run(cfg.model, a, b, RunOptions{cfg.workers});
    TheoryCurve theory = theory_curve(FormulaId::two_point, 0, cfg.model.t_max, cfg.model, &a, &b);
    write_series_csv(est, &theory, cfg.output_dir);
    write_meta_json(cfg, run_seconds(start), cfg.output_dir);
    std::cout << "two-point: wrote "
              << (std::filesystem::path(cfg.output_dir) / "series.csv").string() << " (n=" << est.n
              << ")\n";
    return 0;
}

int cmd_theory(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / "theory.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    std::optional<Observable> a, b;
    if (!cfg.observables.empty()) {
        a = observable_at(cfg, 0);
        b = cfg.observables.size() > 1 ? observable_at(cfg, 1) : a;
    }
    out << "t,k_ramp,k_full" << (a ? ",delta,two_point" : "") << "\n";
    char buf[40];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (long t = 1; t <= cfg.model.t_max; ++t) {
        out << t << ',' << fmt(sff_ramp(t, cfg.model)) << ',' << fmt(sff_full(t, cfg.model));
        if (a)
            out << ',' << fmt(delta_theory(t, cfg.model, *a, *b)) << ','
                << fmt(two_point_theory(t, cfg.model, *a, *b));
        out << "\n";
    }
    write_meta_json(cfg, run_seconds(start), cfg.output_dir);
    std::cout << "theory: wrote " << path.string() << "\n";
    return 0;
}

int cmd_freeness(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    Observable a = observable_at(cfg, 0);
    Observable b = cfg.observables.size() > 1 ? observable_at(cfg, 1) : a;
    FreenessReport rep = freeness_check_k1(cfg.model, a, b, RunOptions{cfg.workers});
    write_freeness_json(rep, cfg.output_dir);
    write_meta_json(cfg, run_seconds(start), cfg.output_dir);
    if (rep.regime_warning)
        std::cerr << "warning: observables are not traceless; the identity holds only in the "
                     "traceless regime\n";
    std::cout << "freeness-check: pass=" << (rep.pass ? "true" : "false")
              << " chi2_dof=" << rep.chi2_dof << " fraction|z|<=4=" << rep.fraction_within_4
              << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    TimeSeriesEstimate est;
    std::vector<double> theory(static_cast<size_t>(cfg.model.t_max) + 1, 0.0);
    TheoryCurve curve;
    if (cfg.experiment == Experiment::two_point || !cfg.observables.empty()) {
        Observable a = observable_at(cfg, 0);
        Observable b = cfg.observables.size() > 1 ? observable_at(cfg, 1) : a;
        est = two_point_run(cfg.model, a, b, RunOptions{cfg.workers});
        curve = theory_curve(FormulaId::two_point, 0, cfg.model.t_max, cfg.model, &a, &b);
    } else {
        est = sff_run(cfg.model, RunOptions{cfg.workers});
        curve = theory_curve(FormulaId::full_plateau, 0, cfg.model.t_max, cfg.model);
    }
    for (long t = 1; t <= cfg.model.t_max; ++t)
        theory[static_cast<size_t>(t)] = curve.values[static_cast<size_t>(t)];
    // t in {0,1} carry discrete-time subtleties and are excluded
    ResidualReport rep = residuals(est, theory, /*t_min=*/2);
    const bool pass = rep.fraction_within_4 >= 0.95;
    write_series_csv(est, &curve, cfg.output_dir);
    write_residuals_csv(rep, pass, cfg.output_dir);
    write_meta_json(cfg, run_seconds(start), cfg.output_dir);
    std::cout << "compare: chi2_dof=" << rep.chi2_dof << " fraction|z|<=4=" << rep.fraction_within_4
              << " pass=" << (pass ? "true" : "false") << "\n";
    return pass ? 0 : 3;
}

int cmd_plot(const std::string& series_path, const std::string& out_path, bool loglog) {
    std::ifstream in(series_path);
    if (!in) throw std::runtime_error("plot: cannot open " + series_path);
    std::string header;
    std::getline(in, header);
    bool has_theory = header.find(",theory") != std::string::npos;
    if (header.rfind("t,mean_re,mean_im,stderr,n", 0) != 0)
        throw std::runtime_error("plot: unexpected columns in " + series_path + ": " + header);
    PlotSeries measured{"measured", {}, {}, {}, false, "#1f77b4", false};
    PlotSeries theory{"theory", {}, {}, {}, false, "#d62728", true};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() < 5) continue;
        double t = std::stod(f[0]);
        measured.t.push_back(t);
        measured.value.push_back(std::stod(f[1]));
        measured.err.push_back(std::stod(f[3]));
        if (has_theory && f.size() >= 6) {
            theory.t.push_back(t);
            theory.value.push_back(std::stod(f[5]));
        }
    }
    if (measured.t.empty()) throw std::runtime_error("plot: no data rows in " + series_path);
    std::vector<PlotSeries> all{measured};
    if (!theory.t.empty()) all.push_back(theory);
    emit_plot(all, loglog ? PlotStyle::log_log : PlotStyle::lin_lin,
              loglog ? "form factor" : "two-point function", out_path);
    std::cout << "plot: wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and analytic toolkit for the single-ancilla random Floquet model"};
    app.require_subcommand(1);

    CommonFlags sff_flags, tp_flags, th_flags, fr_flags, cmp_flags;
    auto* sff_cmd = app.add_subcommand("sff", "Monte Carlo spectral form factor");
    sff_flags.attach(sff_cmd);
    auto* tp_cmd = app.add_subcommand("two-point", "Monte Carlo two-point function <A B_t>");
    tp_flags.attach(tp_cmd);
    auto* th_cmd = app.add_subcommand("theory", "closed-form prediction curves");
    th_flags.attach(th_cmd);
    auto* fr_cmd = app.add_subcommand("freeness-check", "k=1 freeness identity check");
    fr_flags.attach(fr_cmd);
    auto* cmp_cmd = app.add_subcommand("compare", "measurement vs theory with residuals");
    cmp_flags.attach(cmp_cmd);

    std::string plot_in, plot_out = "plot.svg";
    bool plot_loglog = false;
    auto* plot_cmd = app.add_subcommand("plot", "render a series.csv to SVG");
    plot_cmd->add_option("--series", plot_in, "series.csv path")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG path");
    plot_cmd->add_flag("--loglog", plot_loglog, "log-log axes (form-factor style)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sff_cmd) return cmd_sff(sff_flags.load());
        if (*tp_cmd) return cmd_two_point(tp_flags.load());
        if (*th_cmd) return cmd_theory(th_flags.load());
        if (*fr_cmd) return cmd_freeness(fr_flags.load());
        if (*cmp_cmd) return cmd_compare(cmp_flags.load());
        if (*plot_cmd) return cmd_plot(plot_in, plot_out, plot_loglog);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

// Configuration parsing, result persistence (CSV/JSON), and SVG plot
// emission for the simulator CLI.
#ifndef QSFF_IO_HPP
#define QSFF_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsff/estimators.hpp"
#include "qsff/freeprob.hpp"
#include "qsff/theory.hpp"

namespace qsff {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class Experiment { sff, two_point, theory_only, freeness_check, compare };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::sff: return "sff";
        case Experiment::two_point: return "two_point";
        case Experiment::theory_only: return "theory_only";
        case Experiment::freeness_check: return "freeness_check";
        case Experiment::compare: return "compare";
    }
    return "?";
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams model;
    std::vector<std::string> observables;  // PauliString specs
    Experiment experiment = Experiment::sff;
    std::string output_dir = ".";
    int workers = 1;
};

namespace detail {

inline Experiment experiment_from_string(const std::string& s, std::vector<std::string>& errors) {
    if (s == "sff") return Experiment::sff;
    if (s == "two_point" || s == "two-point") return Experiment::two_point;
    if (s == "theory_only" || s == "theory") return Experiment::theory_only;
    if (s == "freeness_check" || s == "freeness-check") return Experiment::freeness_check;
    if (s == "compare") return Experiment::compare;
    errors.push_back("experiment: unknown value '" + s + "'");
    return Experiment::sff;
}

}  // namespace detail

// Parses and validates a JSON config. Every failed constraint is reported in
// one diagnostic; defaults are n_samples = 10^4, t_max = 4*dim, workers = 1.
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    std::vector<std::string> errors;
    static const std::vector<std::string> known = {
        "D0", "gamma", "seed", "n_samples", "t_max", "experiment", "observables",
        "workers", "output_dir", "ensemble", "zero_coupling", "freeze_coupling"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            errors.push_back("unknown key '" + it.key() + "'");

    auto get = [&](const char* key, auto& dst, const char* type_name) {
        if (!j.contains(key)) return;
        try {
            dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        } catch (const nlohmann::json::exception&) {
            errors.push_back(std::string(key) + ": expected " + type_name);
        }
    };

    long d0 = 32;
    get("D0", d0, "integer");
    if (d0 < 1) errors.push_back("D0 must be >= 1");
    cfg.model.d0 = d0;
    get("gamma", cfg.model.gamma, "number");
    if (cfg.model.gamma <= 0.0) errors.push_back("gamma must be > 0");
    get("seed", cfg.model.master_seed, "integer");
    get("n_samples", cfg.model.n_samples, "integer");
    if (cfg.model.n_samples < 1) errors.push_back("n_samples must be >= 1");
    get("t_max", cfg.model.t_max, "integer");
    if (j.contains("t_max") && cfg.model.t_max < 1) errors.push_back("t_max must be >= 1");
    get("workers", cfg.workers, "integer");
    if (cfg.workers < 1) errors.push_back("workers must be >= 1");
    get("output_dir", cfg.output_dir, "string");
    get("observables", cfg.observables, "array of strings");
    get("zero_coupling", cfg.model.zero_coupling, "boolean");
    get("freeze_coupling", cfg.model.freeze_coupling, "boolean");
    if (j.contains("ensemble")) {
        std::string e;
        get("ensemble", e, "string");
        if (e == "ancilla") cfg.model.ensemble = EnsembleKind::ancilla;
        else if (e == "pure_haar") cfg.model.ensemble = EnsembleKind::pure_haar;
        else errors.push_back("ensemble: must be 'ancilla' or 'pure_haar'");
    }
    if (j.contains("experiment")) {
        std::string e;
        get("experiment", e, "string");
        cfg.experiment = detail::experiment_from_string(e, errors);
    }
    for (const auto& spec : cfg.observables) {
        try {
            PauliString::parse(spec);
        } catch (const std::exception& ex) {
            errors.push_back(std::string("observables: ") + ex.what());
        }
    }
    if (cfg.model.t_max == 0) cfg.model.t_max = 4 * cfg.model.dim();

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    nlohmann::json j;
    j["D0"] = cfg.model.d0;
    j["gamma"] = cfg.model.gamma;
    j["seed"] = cfg.model.master_seed;
    j["n_samples"] = cfg.model.n_samples;
    j["t_max"] = cfg.model.t_max;
    j["experiment"] = to_string(cfg.experiment);
    j["observables"] = cfg.observables;
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir;
    j["ensemble"] = cfg.model.ensemble == EnsembleKind::pure_haar ? "pure_haar" : "ancilla";
    j["zero_coupling"] = cfg.model.zero_coupling;
    j["freeze_coupling"] = cfg.model.freeze_coupling;
    return j.dump(2);
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// series.csv: `t,mean_re,mean_im,stderr,n[,theory]`, LF line endings;
// byte-identical across reruns with the same inputs.
inline std::filesystem::path write_series_csv(const TimeSeriesEstimate& est,
                                              const TheoryCurve* theory,
                                              const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "series.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_series_csv: cannot open " + path.string());
    out << "t,mean_re,mean_im,stderr,n" << (theory ? ",theory" : "") << "\n";
    for (long t = 0; t <= est.t_max; ++t) {
        const auto i = static_cast<size_t>(t);
        out << t << ',' << detail::fmt_double(est.mean[i].real()) << ','
            << detail::fmt_double(est.mean[i].imag()) << ','
            << detail::fmt_double(est.n >= 2 ? est.stderr_at(t) : 0.0) << ',' << est.n;
        if (theory) out << ',' << detail::fmt_double(theory->values[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_series_csv: write failed for " + path.string());
    return path;
}

inline std::filesystem::path write_meta_json(const RunConfig& cfg, double wall_time_seconds,
                                             const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "meta.json";
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(serialize_config(cfg));
    j["master_seed"] = cfg.model.master_seed;
    j["code_version"] = kCodeVersion;
    j["wall_time_seconds"] = wall_time_seconds;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_meta_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
    return path;
}

// residuals.csv plus a `chi2_dof=<v> pass=<bool>` summary line.
inline std::filesystem::path write_residuals_csv(const ResidualReport& rep, bool pass,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "residuals.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_residuals_csv: cannot open " + path.string());
    out << "t,z,excluded\n";
    for (size_t i = 0; i < rep.t.size(); ++i)
        out << rep.t[i] << ',' << detail::fmt_double(rep.z[i]) << ',' << (rep.excluded[i] ? 1 : 0)
            << "\n";
    out << "chi2_dof=" << detail::fmt_double(rep.chi2_dof) << " pass=" << (pass ? "true" : "false")
        << "\n";
    return path;
}

inline std::filesystem::path write_freeness_json(const FreenessReport& rep,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "freeness.json";
    nlohmann::json j;
    j["t"] = rep.t;
    j["z"] = rep.z;
    j["chi2_dof"] = rep.chi2_dof;
    j["fraction_within_4"] = rep.fraction_within_4;
    j["pass"] = rep.pass;
    j["regime_warning"] = rep.regime_warning;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_freeness_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
    return path;
}

// ---------------------------------------------------------------------------
// SVG emission

enum class PlotStyle { log_log, lin_lin };

struct PlotSeries {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> err;  // empty -> no error bars
    bool dashed = false;
    std::string color = "#1f77b4";
    bool as_line = false;  // line instead of markers
};

namespace detail {

struct AxisMap {
    double lo, hi;
    double px0, px1;
    bool log;
    double operator()(double v) const {
        double x = log ? std::log10(std::max(v, 1e-300)) : v;
        double l = log ? std::log10(lo) : lo;
        double h = log ? std::log10(hi) : hi;
        return px0 + (x - l) / (h - l) * (px1 - px0);
    }
};

}  // namespace detail

// Minimal self-contained SVG plot: axes, ticks, series with optional error
// bars, no timestamps.
inline std::filesystem::path emit_plot(const std::vector<PlotSeries>& series, PlotStyle style,
                                       const std::string& title,
                                       const std::filesystem::path& path) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");
    for (const auto& s : series)
        if (s.t.empty()) throw std::invalid_argument("emit_plot: empty series '" + s.name + "'");

    const bool logplot = style == PlotStyle::log_log;
    double tmin = 1e300, tmax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const auto& s : series)
        for (size_t i = 0; i < s.t.size(); ++i) {
            double v = s.value[i];
            if (logplot && (v <= 0.0 || s.t[i] <= 0.0)) continue;
            tmin = std::min(tmin, s.t[i]);
            tmax = std::max(tmax, s.t[i]);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (tmax <= tmin || vmax < vmin) throw std::invalid_argument("emit_plot: degenerate data range");
    if (vmax == vmin) vmax = vmin + 1.0;
    if (!logplot) {
        double pad = 0.05 * (vmax - vmin);
        vmin -= pad;
        vmax += pad;
    } else {
        vmin *= 0.8;
        vmax *= 1.25;
    }

    const double width = 720, height = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    detail::AxisMap xm{tmin, tmax, ml, width - mr, logplot};
    detail::AxisMap ym{vmin, vmax, height - mb, mt, logplot};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    // ticks
    auto ticks = [&](double lo, double hi, bool log) {
        std::vector<double> tk;
        if (log) {
            for (int e = static_cast<int>(std::floor(std::log10(lo)));
                 e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
                double v = std::pow(10.0, e);
                if (v >= lo && v <= hi) tk.push_back(v);
            }
        } else {
            double span = hi - lo;
            double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
            if (span / step > 8) step *= 2;
            double start = std::ceil(lo / step) * step;
            for (double v = start; v <= hi + 1e-12 * span; v += step) tk.push_back(v);
        }
        return tk;
    };
    char buf[48];
    for (double v : ticks(tmin, tmax, logplot)) {
        double x = xm(v);
        svg << "<line x1=\"" << x << "\" y1=\"" << height - mb << "\" x2=\"" << x << "\" y2=\""
            << height - mb + 5 << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof(buf), "%g", v);
        svg << "<text x=\"" << x << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << buf << "</text>\n";
    }
    for (double v : ticks(vmin, vmax, logplot)) {
        double y = ym(v);
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof(buf), "%g", v);
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
    }
    // series
    int legend_row = 0;
    for (const auto& s : series) {
        if (s.as_line) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\""
                << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.t.size(); ++i) {
                if (logplot && (s.value[i] <= 0.0 || s.t[i] <= 0.0)) continue;
                svg << xm(s.t[i]) << ',' << ym(s.value[i]) << ' ';
            }
            svg << "\"/>\n";
        } else {
            for (size_t i = 0; i < s.t.size(); ++i) {
                if (logplot && (s.value[i] <= 0.0 || s.t[i] <= 0.0)) continue;
                double x = xm(s.t[i]), y = ym(s.value[i]);
                if (!s.err.empty() && s.err[i] > 0.0) {
                    double ylo = ym(logplot ? std::max(s.value[i] - s.err[i], vmin) : s.value[i] - s.err[i]);
                    double yhi = ym(s.value[i] + s.err[i]);
                    svg << "<line x1=\"" << x << "\" y1=\"" << ylo << "\" x2=\"" << x << "\" y2=\""
                        << yhi << "\" stroke=\"" << s.color << "\" stroke-width=\"1\"/>\n";
                }
                svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2\" fill=\"" << s.color
                    << "\"/>\n";
            }
        }
        svg << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 + 16 * legend_row
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">" << s.name
            << "</text>\n";
        ++legend_row;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + path.string());
    out << svg.str();
    return path;
}

}  // namespace qsff

#endif  // QSFF_IO_HPP

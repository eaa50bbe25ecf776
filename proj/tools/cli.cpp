#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>

#include <CLI11.hpp>

#include "cpd/checks.hpp"
#include "cpd/fields.hpp"
#include "cpd/harness.hpp"
#include "cpd/io.hpp"

namespace cpd::cli {

namespace {

const std::vector<std::string> kSchemeNames = {"s1-esav", "s2-esav", "s1-mesav",
                                               "s2-mesav", "s1-sav"};
const std::vector<SchemeId> kAllSchemes = {SchemeId::S1_ESAV, SchemeId::S2_ESAV,
                                           SchemeId::S1_MESAV, SchemeId::S2_MESAV,
                                           SchemeId::S1_SAV};

std::string eps_label(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    return buf;
}

/// energy.csv -> energy_s1-esav_eps0.25.csv
std::string with_suffix(const std::string& base, const std::string& suffix) {
    const std::filesystem::path p(base);
    std::filesystem::path out = p.parent_path();
    out /= p.stem().string() + "_" + suffix + p.extension().string();
    return out.string();
}

std::optional<double> c0_for(SchemeId id, double c0) {
    return id == SchemeId::S1_SAV ? std::optional<double>(c0) : std::nullopt;
}

std::vector<double> default_eps_sweep(const RunConfig& cfg, int k_max) {
    if (cfg.eps.has_value()) {
        return {*cfg.eps};
    }
    if (cfg.field != "experiment") {
        return {1.0};
    }
    std::vector<double> eps;
    for (int k = 0; k <= k_max; k += 2) {
        eps.push_back(std::ldexp(1.0, -k));
    }
    return eps;
}

int cmd_check() {
    const bool ok = print_self_checks(run_self_checks());
    return ok ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg) {
    if (!cfg.scheme.has_value()) {
        throw UsageError(
            "simulate requires --scheme (valid: s1-esav, s2-esav, s1-mesav, s2-mesav, "
            "s1-sav)");
    }
    const SchemeId id = *cfg.scheme;
    const auto model = make_field(cfg.field, {{"eps", cfg.eps.value_or(1.0)}});
    const auto rec = run_energy_experiment(id, *model, {cfg.x0, cfg.v0},
                                           cfg.h.value_or(1e-2), cfg.T.value_or(1.0),
                                           c0_for(id, cfg.c0));
    const bool csv = cfg.format == OutputFormat::Csv;
    const std::string path = cfg.out.value_or(csv ? "trajectory.csv" : "trajectory.json");
    if (csv) {
        write_trajectory_csv(rec, path);
    } else {
        write_trajectory_json(rec, path);
    }
    std::printf("wrote %s (%zu rows)\n", path.c_str(), rec.times.size());
    if (!rec.error.empty()) {
        std::fprintf(stderr, "run aborted: %s\n", rec.error.c_str());
        return 2;
    }
    return 0;
}

int cmd_energy(const RunConfig& cfg) {
    const std::vector<SchemeId> schemes =
        cfg.scheme.has_value() ? std::vector<SchemeId>{*cfg.scheme} : kAllSchemes;
    const std::vector<double> eps_values = default_eps_sweep(cfg, 4);
    const bool csv = cfg.format == OutputFormat::Csv;
    const std::string base = cfg.out.value_or(csv ? "energy.csv" : "energy.json");
    const bool multi = schemes.size() > 1 || eps_values.size() > 1;

    int rc = 0;
    for (const SchemeId id : schemes) {
        for (const double eps : eps_values) {
            const auto model = make_field(cfg.field, {{"eps", eps}});
            const auto rec = run_energy_experiment(id, *model, {cfg.x0, cfg.v0},
                                                   cfg.h.value_or(1e-2),
                                                   cfg.T.value_or(100.0),
                                                   c0_for(id, cfg.c0));
            std::string path = base;
            if (multi) {
                path = with_suffix(base, scheme_name(id) + "_eps" + eps_label(eps));
            }
            if (csv) {
                write_trajectory_csv(rec, path);
            } else {
                write_trajectory_json(rec, path);
            }
            std::printf("wrote %s (%zu rows)\n", path.c_str(), rec.times.size());
            if (!rec.error.empty()) {
                std::fprintf(stderr, "run aborted (%s, eps=%s): %s\n",
                             scheme_name(id).c_str(), eps_label(eps).c_str(),
                             rec.error.c_str());
                rc = 2;
            }
        }
    }
    return rc;
}

int cmd_converge(const RunConfig& cfg) {
    if (cfg.format_given && cfg.format == OutputFormat::Csv) {
        throw UsageError("--format csv is not valid for converge (reports are JSON)");
    }
    const std::vector<SchemeId> schemes =
        cfg.scheme.has_value() ? std::vector<SchemeId>{*cfg.scheme} : kAllSchemes;
    const std::vector<double> eps_values = default_eps_sweep(cfg, 4);
    AdaptiveConfig ref_cfg;
    ref_cfg.rtol = cfg.rtol;
    ref_cfg.atol = cfg.atol;

    std::vector<ConvergenceReport> reports;
    for (const double eps : eps_values) {
        const auto model = make_field(cfg.field, {{"eps", eps}});
        for (const SchemeId id : schemes) {
            reports.push_back(run_convergence_study(id, *model, {cfg.x0, cfg.v0},
                                                    cfg.t_end, cfg.k_min, cfg.k_max,
                                                    ref_cfg, c0_for(id, cfg.c0)));
            const ConvergenceReport& rep = reports.back();
            std::printf("%-9s eps=%-8s fitted order %s\n", scheme_name(id).c_str(),
                        eps_label(eps).c_str(),
                        rep.exact_regime ? "n/a (exact regime)"
                                         : eps_label(rep.fitted_order).c_str());
        }
    }
    const std::string path = cfg.out.value_or("converge.json");
    if (reports.size() == 1) {
        write_report_json(reports.front(), path);
    } else {
        write_report_json(reports, path);
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_timing(const RunConfig& cfg) {
    if (cfg.format_given && cfg.format == OutputFormat::Csv) {
        throw UsageError("--format csv is not valid for timing (reports are JSON)");
    }
    const std::array<SchemeId, 2> pair{SchemeId::S1_SAV,
                                       cfg.scheme.value_or(SchemeId::S1_ESAV)};
    std::vector<double> eps_values;
    if (cfg.eps.has_value()) {
        eps_values.push_back(*cfg.eps);
    } else {
        for (int k = 0; k <= 6; ++k) eps_values.push_back(std::ldexp(1.0, -k));
    }
    const std::vector<double> h_values =
        cfg.h.has_value() ? std::vector<double>{*cfg.h}
                          : std::vector<double>{0.01, 0.005, 0.0025};
    const std::string field = cfg.field;
    const auto factory = [&field](double eps) { return make_field(field, {{"eps", eps}}); };
    const auto rep =
        run_timing_study(pair, factory, {cfg.x0, cfg.v0}, cfg.T.value_or(100.0), h_values,
                         eps_values, cfg.repetitions, cfg.c0);
    for (const TimingCell& cell : rep.cells) {
        std::printf("%-9s eps=%-10s h=%-8s median %.4f s\n",
                    scheme_name(cell.scheme).c_str(), eps_label(cell.eps).c_str(),
                    eps_label(cell.h).c_str(), cell.median_seconds);
    }
    const std::string path = cfg.out.value_or("timing.json");
    write_report_json(rep, path);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

std::optional<RunConfig> parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"Energy-preserving splitting integrators for charged-particle dynamics"};
    app.fallthrough();
    app.require_subcommand(1);
    // --h is the stepsize flag, so help keeps only its long form.
    app.set_help_flag("--help", "print help and exit");
    app.set_config("--config", "", "flat key=value config file");

    std::string scheme_str, field = "experiment", format_str = "csv", out;
    std::vector<double> x0, v0;
    double eps = 0.0, c0 = 1.0, h = 0.0, T = 0.0, t_end = 1.0;
    double rtol = 1e-12, atol = 1e-12;
    int k_min = 6, k_max = 12, reps = 3;

    app.add_option("--scheme", scheme_str, "integration scheme")
        ->check(CLI::IsMember(kSchemeNames));
    app.add_option("--field", field, "field model: zero, harmonic, experiment");
    auto* eps_opt = app.add_option("--eps", eps, "field parameter eps (> 0)")
                        ->check(CLI::PositiveNumber);
    app.add_option("--c0", c0, "shift constant C0 for s1-sav");
    auto* x0_opt = app.add_option("--x0", x0, "initial position a,b,c")->delimiter(',');
    auto* v0_opt = app.add_option("--v0", v0, "initial velocity a,b,c")->delimiter(',');
    auto* h_opt =
        app.add_option("--h", h, "time stepsize")->check(CLI::PositiveNumber);
    auto* T_opt =
        app.add_option("--T", T, "total simulated time")->check(CLI::PositiveNumber);
    app.add_option("--t-end", t_end, "convergence end time")->check(CLI::PositiveNumber);
    app.add_option("--k-min", k_min, "smallest k in h = 2^-k")
        ->check(CLI::Range(0, 40));
    app.add_option("--k-max", k_max, "largest k in h = 2^-k")->check(CLI::Range(0, 40));
    app.add_option("--rtol", rtol, "reference relative tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--atol", atol, "reference absolute tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--reps", reps, "timing repetitions (>= 3)")->check(CLI::Range(3, 1000));
    auto* out_opt = app.add_option("--out", out, "output path");
    auto* format_opt = app.add_option("--format", format_str, "output format")
                           ->check(CLI::IsMember({"csv", "json"}));

    auto* simulate = app.add_subcommand("simulate", "run one scheme and dump the trajectory");
    auto* energy = app.add_subcommand("energy", "energy-error time series (sweeps schemes/eps)");
    auto* converge = app.add_subcommand("converge", "convergence orders vs the adaptive reference");
    auto* timing = app.add_subcommand("timing", "wall-clock comparison vs the s1-sav baseline");
    auto* check = app.add_subcommand("check", "fast invariant self-checks");

    std::vector<const char*> argv;
    argv.push_back("cpdsim");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::puts(app.help().c_str());
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (simulate->parsed()) cfg.command = Command::Simulate;
    if (energy->parsed()) cfg.command = Command::Energy;
    if (converge->parsed()) cfg.command = Command::Converge;
    if (timing->parsed()) cfg.command = Command::Timing;
    if (check->parsed()) cfg.command = Command::Check;

    if (!scheme_str.empty()) cfg.scheme = parse_scheme(scheme_str);
    cfg.field = field;
    if (eps_opt->count() > 0) cfg.eps = eps;
    cfg.c0 = c0;
    auto take_vec3 = [](const std::vector<double>& v, const char* name, Vec3 fallback,
                        bool given) {
        if (!given) return fallback;
        if (v.size() != 3) {
            throw UsageError(std::string(name) + " requires exactly three components a,b,c");
        }
        return Vec3{v[0], v[1], v[2]};
    };
    cfg.x0 = take_vec3(x0, "--x0", cfg.x0, x0_opt->count() > 0);
    cfg.v0 = take_vec3(v0, "--v0", cfg.v0, v0_opt->count() > 0);
    if (h_opt->count() > 0) cfg.h = h;
    if (T_opt->count() > 0) cfg.T = T;
    cfg.t_end = t_end;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    if (k_min > k_max) {
        throw UsageError("--k-min must not exceed --k-max");
    }
    cfg.rtol = rtol;
    cfg.atol = atol;
    cfg.repetitions = reps;
    if (out_opt->count() > 0) cfg.out = out;
    cfg.format_given = format_opt->count() > 0;
    cfg.format = (format_str == "json") ? OutputFormat::Json : OutputFormat::Csv;
    return cfg;
}

int run_command(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::Simulate: return cmd_simulate(cfg);
        case Command::Energy: return cmd_energy(cfg);
        case Command::Converge: return cmd_converge(cfg);
        case Command::Timing: return cmd_timing(cfg);
        case Command::Check: return cmd_check();
    }
    return 1;
}

int main_with_args(const std::vector<std::string>& args) {
    try {
        const std::optional<RunConfig> cfg = parse_config(args);
        if (!cfg.has_value()) {
            return 0;  // help printed
        }
        return run_command(*cfg);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace cpd::cli

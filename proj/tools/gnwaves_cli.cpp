// gnwaves: coefficient tables, dispersion curves, comparisons, sweeps, rate
// fits and the zeta -> vbar probe from the command line.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "gnwaves/errors.hpp"
#include "gnwaves/gn_model.hpp"
#include "gnwaves/harness.hpp"
#include "gnwaves/params.hpp"

namespace {

using namespace gnwaves;

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitConvergence = 4;

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    bool dat = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
    cmd->add_option("-c,--config", o.config, "experiment config file (key = value sections)");
    cmd->add_option("-s,--set", o.overrides, "override, e.g. --set sweep.epsilon=0.05")->take_all();
    if (with_out) cmd->add_option("-o,--out", o.out, "output prefix (writes <out>.csv and <out>.json)");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError(fmt::format("cannot write '{}'", path));
    f << content;
}

template <class F>
std::string capture(F&& f) {
    std::ostringstream s;
    f(s);
    return s.str();
}

nlohmann::ordered_json scalar_json(const ScalarCoeffs& c) {
    return {{"beta", c.beta},     {"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"alpha3", c.alpha3},
            {"nu", c.nu},         {"kappa1", c.kappa1}, {"kappa2", c.kappa2},
            {"direction", static_cast<int>(c.direction)}};
}

int cmd_coeffs(const RegimeParams& p, bool as_json) {
    p.validate();
    const BaseCoeffs b = base_coeffs(p);
    const ScalarCoeffs dr = decoupled_coeffs(p, Direction::Right);
    const ScalarCoeffs un = unidirectional_coeffs(p);
    const ScalarCoeffs rc = reconstruction_coeffs(p);
    if (as_json) {
        nlohmann::ordered_json j;
        j["params"] = {{"gamma", p.gamma}, {"delta", p.delta}, {"theta", p.theta}, {"lambda", p.lambda}};
        j["critical_defect"] = critical_defect(p);
        j["base"] = {{"alpha1", b.alpha1}, {"alpha2", b.alpha2}, {"alpha3", b.alpha3}, {"nu", b.nu},
                     {"kappa1", b.kappa1}, {"kappa2", b.kappa2}, {"kappa3", b.kappa3}};
        j["decoupled"] = scalar_json(dr);
        j["unidirectional"] = scalar_json(un);
        j["reconstruction"] = scalar_json(rc);
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    auto n = [](double v) { return fmt::format("{}", v); };
    std::cout << fmt::format("gamma = {}, delta = {}, theta = {}, lambda = {}\n", n(p.gamma), n(p.delta), n(p.theta),
                             n(p.lambda));
    std::cout << fmt::format("delta^2 - gamma = {}\n\n", n(critical_defect(p)));
    std::cout << "base (coupled system)\n";
    std::cout << fmt::format("  alpha1 {}\n  alpha2 {}\n  alpha3 {}\n  nu     {}\n  kappa1 {}\n  kappa2 {}\n  kappa3 {}\n\n",
                             n(b.alpha1), n(b.alpha2), n(b.alpha3), n(b.nu), n(b.kappa1), n(b.kappa2), n(b.kappa3));
    auto table = [&](const char* title, const ScalarCoeffs& c) {
        std::cout << title << '\n';
        std::cout << fmt::format("  beta   {}\n  alpha1 {}\n  alpha2 {}\n  alpha3 {}\n  nu     {}\n  kappa1 {}\n  kappa2 {}\n\n",
                                 n(c.beta), n(c.alpha1), n(c.alpha2), n(c.alpha3), n(c.nu), n(c.kappa1), n(c.kappa2));
    };
    table("decoupled", dr);
    table("unidirectional", un);
    table("reconstruction", rc);
    return 0;
}

int cmd_dispersion(const RegimeParams& p, double kmax, int nk, const std::string& out) {
    p.validate();
    if (nk < 2 || !(kmax > 0.0)) throw ConfigError("dispersion needs kmax > 0 and at least 2 points");
    std::ostringstream s;
    s << "k,omega_gn,phase_speed_gn,shear_omega2,shear_stable\n";
    for (int i = 0; i < nk; ++i) {
        const double k = kmax * i / (nk - 1);
        const double w = dispersion_omega(k, p);
        const ShearStability sh = shear_system_stability(k, p);
        s << format_number(k) << ',' << format_number(w) << ',' << format_number(k > 0 ? w / k : 1.0) << ','
          << format_number(sh.omega2) << ',' << (sh.stable ? 1 : 0) << '\n';
    }
    if (out.empty()) {
        std::cout << s.str();
    } else {
        write_file(out + ".csv", s.str());
    }
    std::cerr << fmt::format("shear-velocity system unstable for |k| > {}\n", format_number(shear_instability_threshold(p)));
    return 0;
}

void emit_series(const ExperimentConfig& cfg, const ErrorSeries& s, const CommonOptions& o) {
    const std::string csv = capture([&](std::ostream& os) { write_series_csv(os, s); });
    if (o.out.empty()) {
        std::cout << csv;
        return;
    }
    write_file(o.out + ".csv", csv);
    write_file(o.out + ".json", series_json(cfg, s));
    if (o.dat) write_file(o.out + ".dat", capture([&](std::ostream& os) { write_series_dat(os, s); }));
}

int report_blowups(const ErrorSeries& s) {
    for (const auto& [m, ms] : s.models)
        if (ms.blowup_time)
            std::cerr << fmt::format("{} broke down at t = {}: {}\n", to_string(m), *ms.blowup_time, ms.failure);
    return 0;
}

int cmd_run(const CommonOptions& o) {
    const ExperimentConfig cfg = load_config(o.config, o.overrides);
    const ErrorSeries s = run_comparison(cfg);
    report_blowups(s);
    emit_series(cfg, s, o);
    return 0;
}

void print_slopes(const SweepTable& t) {
    for (const auto& [key, fit] : t.slopes)
        std::cerr << fmt::format("{:>16} {:>8}  slope {:.4f} +- {:.4f} ({} points)\n", to_string(key.first),
                                 to_string(key.second), fit.slope, fit.stderr_, fit.points);
}

int cmd_sweep(const CommonOptions& o) {
    const ExperimentConfig cfg = load_config(o.config, o.overrides);
    const SweepTable t = sweep_epsilon(cfg);
    for (const auto& [e, msg] : t.failures) std::cerr << fmt::format("epsilon {} failed: {}\n", e, msg);
    const std::string csv = capture([&](std::ostream& os) { write_sweep_csv(os, t); });
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        write_file(o.out + ".csv", csv);
        write_file(o.out + ".json", sweep_json(cfg, t));
    }
    print_slopes(t);
    return 0;
}

int cmd_rates(const std::string& in_path, bool h1) {
    std::ifstream in(in_path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", in_path));
    SweepTable t = read_sweep_csv(in);
    fit_slopes(t, h1);
    std::cout << "model,checkpoint,slope,stderr,points\n";
    for (const auto& [key, fit] : t.slopes)
        std::cout << to_string(key.first) << ',' << to_string(key.second) << ',' << format_number(fit.slope) << ','
                  << format_number(fit.stderr_) << ',' << fit.points << '\n';
    return 0;
}

int cmd_ztov(const CommonOptions& o) {
    ExperimentConfig cfg = load_config(o.config, o.overrides);
    const ErrorSeries s = run_ztov_probe(cfg, cfg.epsilon);
    const ModelSeries& ms = s.models.at(ModelKind::GN);
    const PlateauSummary sum = summarize_plateau(s.times, ms.error_l2);
    std::cerr << fmt::format("plateau residual {:.6e}, onset T0 = {:.4g}\n", sum.level, sum.onset_time);
    std::ostringstream os;
    os << "time,residual_L2,residual_H1\n";
    for (std::size_t i = 0; i < s.times.size(); ++i)
        os << format_number(s.times[i]) << ',' << format_number(ms.error_l2[i]) << ',' << format_number(ms.error_h1[i])
           << '\n';
    if (o.out.empty()) {
        std::cout << os.str();
    } else {
        write_file(o.out + ".csv", os.str());
        write_file(o.out + ".json", series_json(cfg, s));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-layer internal-wave models: Green-Naghdi reference, scalar approximations, benchmarks"};
    app.require_subcommand(0, 1);
    bool seed = false;
    app.add_flag("--seed-config", seed, "print a commented configuration template and exit");

    RegimeParams p;
    bool as_json = false;
    auto* coeffs = app.add_subcommand("coeffs", "print coefficient tables");
    coeffs->add_option("--gamma", p.gamma, "density ratio")->capture_default_str();
    coeffs->add_option("--delta", p.delta, "depth ratio")->capture_default_str();
    coeffs->add_option("--theta", p.theta, "BBM-trick weight")->capture_default_str();
    coeffs->add_option("--lambda", p.lambda, "change-of-variable weight")->capture_default_str();
    coeffs->add_flag("--json", as_json, "JSON output");

    double kmax = 10.0;
    int nk = 101;
    std::string disp_out;
    auto* disp = app.add_subcommand("dispersion", "omega(k) of the GN system and the shear-system threshold");
    disp->add_option("--gamma", p.gamma)->capture_default_str();
    disp->add_option("--delta", p.delta)->capture_default_str();
    disp->add_option("--mu", p.mu)->capture_default_str();
    disp->add_option("--kmax", kmax)->capture_default_str();
    disp->add_option("--nk", nk)->capture_default_str();
    disp->add_option("-o,--out", disp_out, "output prefix");

    CommonOptions run_o, sweep_o, ztov_o;
    auto* run = app.add_subcommand("run", "one comparison run, emits an error series");
    add_common(run, run_o);
    run->add_flag("--dat", run_o.dat, "also write a gnuplot .dat file");
    auto* sweep = app.add_subcommand("sweep", "epsilon sweep, emits a sweep table and fitted slopes");
    add_common(sweep, sweep_o);
    std::string rates_in;
    bool rates_h1 = false;
    auto* rates = app.add_subcommand("rates", "fit convergence slopes from a sweep table");
    rates->add_option("input", rates_in, "sweep CSV")->required();
    rates->add_flag("--h1", rates_h1, "fit the H1 column");
    auto* ztov = app.add_subcommand("ztov", "zeta -> vbar reconstruction probe on the GN run");
    add_common(ztov, ztov_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (seed) {
            std::cout << seed_config();
            return 0;
        }
        if (*coeffs) return cmd_coeffs(p, as_json);
        if (*disp) return cmd_dispersion(p, kmax, nk, disp_out);
        if (*run) return cmd_run(run_o);
        if (*sweep) return cmd_sweep(sweep_o);
        if (*rates) return cmd_rates(rates_in, rates_h1);
        if (*ztov) return cmd_ztov(ztov_o);
        std::cout << app.help();
        return 0;
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBlowUp;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

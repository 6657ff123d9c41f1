#pragma once

// Experiment orchestration: initial data, model pipelines on a shared grid,
// error series against the Green-Naghdi reference, epsilon sweeps and
// convergence-rate fits.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnwaves/approximations.hpp"
#include "gnwaves/gn_model.hpp"
#include "gnwaves/params.hpp"
#include "gnwaves/spectral.hpp"
#include "gnwaves/timeint.hpp"

namespace gnwaves {

enum class Regime { LongWave, CamassaHolm };          ///< mu = eps, mu = eps^2
enum class RatioPreset { Critical, NonCritical, Custom };
enum class DataKind { GaussianLocalized, AlgebraicNonlocalized, Unidirectional };
enum class Checkpoint { T10, InvEps, EpsM32 };          ///< t = 10, 1/eps, eps^{-3/2}

std::string to_string(Regime r);
std::string to_string(RatioPreset r);
std::string to_string(DataKind d);
std::string to_string(Checkpoint c);
Regime parse_regime(std::string_view s);
RatioPreset parse_ratio(std::string_view s);
DataKind parse_data_kind(std::string_view s);
Checkpoint parse_checkpoint(std::string_view s);

double checkpoint_time(Checkpoint c, double epsilon);

struct GridPolicy {
    double dx = 0.2;
    double margin = 20.0;     ///< L >= 2 (horizon + margin)
    bool dealias = false;
};

struct ExperimentConfig {
    Regime regime = Regime::CamassaHolm;
    RatioPreset ratio = RatioPreset::Critical;
    double gamma = 0.64;      ///< used when ratio == Custom
    double delta = 0.8;
    double theta = 0.5;
    double lambda = 0.0;
    DataKind data = DataKind::GaussianLocalized;

    std::vector<double> epsilons{0.1, 0.08, 0.065, 0.05, 0.035};
    double epsilon = 0.1;     ///< single-run value
    std::vector<Checkpoint> checkpoints{Checkpoint::T10, Checkpoint::InvEps, Checkpoint::EpsM32};
    double t_end = 0.0;       ///< single run / probe horizon; 0 = latest checkpoint
    int samples = 200;

    double s_err = 0.0;
    GridPolicy grid;

    Method method = Method::ABM4;
    double cfl = 0.1;
    double dt = 0.0;          ///< 0 = pick_dt
    double blowup_threshold = 1e6;
    SolverOptions solver;

    std::vector<ModelKind> models{ModelKind::GN, ModelKind::iB, ModelKind::KdV, ModelKind::eKdV, ModelKind::CL,
                                  ModelKind::WeaklyCoupled};

    int threads = 0;          ///< sweep workers, 0 = hardware concurrency

    /// Regime parameters for a given epsilon.
    RegimeParams params(double eps) const;
    /// Throws ConfigError.
    void validate() const;
    /// Horizon of a run at eps: t_end if set, otherwise the latest checkpoint.
    double horizon(double eps) const;
};

/// Reads key = value sections, then applies "section.key=value" overrides.
/// Unknown keys are a ConfigError. An empty path means all defaults.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
/// Sets one "section.key" entry.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Commented template with every default.
std::string seed_config();
/// Canonical key = value rendering (also hashed for provenance).
std::string render_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

/// Grid for eps under the policy: L >= 2 (horizon + margin), n a power of two.
GridPtr make_grid(const ExperimentConfig& cfg, double eps);

/// Initial (zeta0, vbar0). Throws DomainError when localized data do not
/// decay below 1e-12 at the periodic seam.
WaveField make_initial_data(DataKind kind, const GridPtr& grid, const RegimeParams& p);

/// (|dzeta|_{H^s}^2 + |dvbar|_{H^s}^2/(gamma+delta)^2)^{1/2}
double combined_error(const WaveField& ref, const WaveField& approx, double s_err, const RegimeParams& p);

struct ModelSeries {
    std::vector<double> error_l2;
    std::vector<double> error_h1;
    std::optional<double> blowup_time;  ///< errors after it are NaN
    std::string failure;
};

struct ErrorSeries {
    double epsilon = 0.0;
    RegimeParams params;
    int n_points = 0;
    double length = 0.0;
    double dt = 0.0;
    std::string config_hash;
    std::vector<double> times;
    std::vector<std::string> tags;  ///< checkpoint tag per time, "" for plain samples
    std::map<ModelKind, ModelSeries> models;

    /// Index of the sample taken at checkpoint c, if any.
    std::optional<std::size_t> checkpoint_index(Checkpoint c) const;
};

/// Sample times on [0, T]: `samples` uniform intervals plus checkpoints <= T.
std::vector<double> sample_times(const ExperimentConfig& cfg, double eps, std::vector<std::string>* tags = nullptr);

/// Common step for all selected models at eps.
double run_dt(const ExperimentConfig& cfg, const Grid& grid, const RegimeParams& p, double u_max);

/// All selected models from the same data; errors against GN. Throws
/// BlowUpError if the GN run blows up.
ErrorSeries run_comparison(const ExperimentConfig& cfg, double eps);
inline ErrorSeries run_comparison(const ExperimentConfig& cfg) { return run_comparison(cfg, cfg.epsilon); }

struct SweepEntry {
    double epsilon = 0.0;
    Checkpoint checkpoint = Checkpoint::InvEps;
    ModelKind model = ModelKind::GN;
    double error_l2 = 0.0;
    double error_h1 = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

struct SweepTable {
    std::vector<double> epsilons;
    std::vector<SweepEntry> entries;
    std::map<double, std::string> failures;  ///< per-eps failure messages
    std::map<std::pair<ModelKind, Checkpoint>, RateFit> slopes;

    std::optional<double> error(double eps, ModelKind m, Checkpoint c, bool h1 = false) const;
};

/// One independent run per eps (in parallel), merged by eps order. Failures
/// are recorded, not fatal. Slopes fitted on L2 errors where >= 2 points exist.
SweepTable sweep_epsilon(const ExperimentConfig& cfg);

/// Least-squares slope of log(error) against log(eps).
RateFit convergence_rate(const std::vector<std::pair<double, double>>& points);

/// ztov residual on the right half for a GN run from cfg's data at eps.
ErrorSeries run_ztov_probe(const ExperimentConfig& cfg, double eps);

struct PlateauSummary {
    double onset_time = 0.0;  ///< T0
    double level = 0.0;       ///< plateau residual
};

/// Onset T0 = time of the smallest residual (end of the initial transient);
/// level = median residual over [T0, end].
PlateauSummary summarize_plateau(const std::vector<double>& times, const std::vector<double>& residual);

// Output

/// CSV: time, model, error_L2, error_H1, checkpoint_tag
void write_series_csv(std::ostream& out, const ErrorSeries& s);
/// CSV: epsilon, model, error_L2, error_H1, checkpoint_tag
void write_sweep_csv(std::ostream& out, const SweepTable& t);
/// gnuplot columns: time then one L2 column per model.
void write_series_dat(std::ostream& out, const ErrorSeries& s);
std::string series_json(const ExperimentConfig& cfg, const ErrorSeries& s);
std::string sweep_json(const ExperimentConfig& cfg, const SweepTable& t);

/// Reads a sweep CSV back (for the rates subcommand).
SweepTable read_sweep_csv(std::istream& in);
/// Fills t.slopes from its entries.
void fit_slopes(SweepTable& t, bool use_h1 = false);

std::string format_number(double v);

}  // namespace gnwaves

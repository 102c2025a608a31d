#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spar/methods.hpp"
#include "spar/simgen.hpp"
#include "spar/spar.hpp"

namespace spar {

/// One simulation study: a data design, the methods to run and how often.
///
/// JSON field names: setting, regime, n, p, n_test, rho_snr, mu, reps, seed,
/// methods, output, parallelism, plus the optional active, rho,
/// record_timing and a `spar` object (max_models, screen_factor, m_lower,
/// m_upper, threshold_grid_size, folds, ridge_fallback).
struct ExperimentConfig {
    SimulationDesign design;
    int reps = 30;
    std::uint64_t seed = 1;
    std::vector<MethodSpec> methods;
    std::string output;   ///< empty = stdout
    int parallelism = 1;  ///< replication workers
    bool record_timing = true;
    SparConfig spar;

    /// Throws InvalidArgument on a broken invariant.
    void validate() const;
};

/// Defaults: independent setting, sparse regime, n = 100, p = 1000,
/// reps = 30, methods {holp, spar-best, spar-1se}.
ExperimentConfig default_experiment();

/// Reads a JSON config on top of the defaults. Unknown keys and bad values
/// throw InvalidArgument; malformed JSON throws ParseError.
ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct ResultRecord {
    std::string method;
    std::string setting;
    std::string regime;
    int rep = 0;
    std::optional<double> sweep_value;
    std::optional<MethodOutcome> outcome; ///< empty when the fit failed
    std::string error;
};

inline constexpr std::string_view kCsvHeader =
    "method,setting,regime,rep,sweep_value,rmspe,mspe,precision,recall,f1,num_active,chosen_m,chosen_lambda,"
    "runtime_s,error";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ResultRecord& record);
void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);

/// Generates each replication, fits every method and evaluates it on the
/// test set. Rows come back ordered by (rep, method) whatever the worker count.
/// Data for replication r is seeded by derive_seed(seed, Data, r), method i
/// by derive_seed(seed, Method, r, i).
std::vector<ResultRecord> run_simulation(const ExperimentConfig& config,
                                         std::optional<double> sweep_value = std::nullopt);

enum class SweepParameter { NumModels, ScreenFactor, SampleSize, Dimension, Snr };

std::string_view to_string(SweepParameter parameter);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

/// `base` with one parameter replaced. NumModels sets the SPAR model count and
/// the size of every ensemble method.
ExperimentConfig with_sweep_value(const ExperimentConfig& base, SweepParameter parameter, double value);

/// run_simulation per grid point, concatenated in grid order.
std::vector<ResultRecord> sweep(SweepParameter parameter, const std::vector<double>& grid,
                                const ExperimentConfig& base);

} // namespace spar

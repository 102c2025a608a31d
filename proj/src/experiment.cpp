#include "spar/experiment.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "spar/dataset_io.hpp"
#include "spar/error.hpp"
#include "spar/rng.hpp"

namespace spar {

using nlohmann::json;

void ExperimentConfig::validate() const
{
    design.validate();
    spar.validate();
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
    if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "methods must not be empty");
    if (parallelism < 1) throw Error(ErrorCode::InvalidArgument, "parallelism must be at least 1");
    for (const auto& m : methods)
        if (m.models < 1) throw Error(ErrorCode::InvalidArgument, "ensemble size must be at least 1");
}

ExperimentConfig default_experiment()
{
    ExperimentConfig config;
    config.methods = {*parse_method("holp"), *parse_method("spar-best"), *parse_method("spar-1se")};
    return config;
}

namespace {

template <class T>
T get_as(const json& doc, const char* key)
{
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string("config field '") + key + "' has the wrong type");
    }
}

void read_spar(const json& doc, SparConfig& spar)
{
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "config field 'spar' must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key == "max_models") spar.max_models = get_as<int>(doc, "max_models");
        else if (key == "screen_factor") spar.screen_factor = get_as<double>(doc, "screen_factor");
        else if (key == "m_lower") spar.m_lower = get_as<Index>(doc, "m_lower");
        else if (key == "m_upper") spar.m_upper = get_as<Index>(doc, "m_upper");
        else if (key == "threshold_grid_size") spar.threshold_grid_size = get_as<int>(doc, "threshold_grid_size");
        else if (key == "folds") spar.folds = get_as<int>(doc, "folds");
        else if (key == "ridge_fallback") spar.ridge_fallback = get_as<double>(doc, "ridge_fallback");
        else throw Error(ErrorCode::InvalidArgument, "unknown config field 'spar." + key + "'");
    }
}

std::string csv_number(double v)
{
    return std::isfinite(v) ? format_double(v) : std::string("NA");
}

std::string csv_text(std::string_view s)
{
    std::string out;
    for (char c : s) out.push_back(c == ',' || c == '\n' || c == '\r' || c == '"' ? ' ' : c);
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");

    ExperimentConfig config = default_experiment();
    for (const auto& [key, value] : doc.items()) {
        if (key == "setting") {
            const auto kind = parse_covariance_kind(get_as<std::string>(doc, "setting"));
            if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown setting '" + value.dump() + "'");
            config.design.setting = *kind;
        } else if (key == "regime") {
            const auto regime = parse_regime(get_as<std::string>(doc, "regime"));
            if (!regime) throw Error(ErrorCode::InvalidArgument, "unknown regime '" + value.dump() + "'");
            config.design.regime = *regime;
        } else if (key == "n") config.design.n = get_as<Index>(doc, "n");
        else if (key == "p") config.design.p = get_as<Index>(doc, "p");
        else if (key == "n_test") config.design.n_test = get_as<Index>(doc, "n_test");
        else if (key == "rho_snr") config.design.rho_snr = get_as<double>(doc, "rho_snr");
        else if (key == "mu") config.design.mu = get_as<double>(doc, "mu");
        else if (key == "active") config.design.active = get_as<Index>(doc, "active");
        else if (key == "rho") config.design.rho = get_as<double>(doc, "rho");
        else if (key == "reps") config.reps = get_as<int>(doc, "reps");
        else if (key == "seed") config.seed = get_as<std::uint64_t>(doc, "seed");
        else if (key == "output") config.output = get_as<std::string>(doc, "output");
        else if (key == "parallelism") config.parallelism = get_as<int>(doc, "parallelism");
        else if (key == "record_timing") config.record_timing = get_as<bool>(doc, "record_timing");
        else if (key == "spar") read_spar(value, config.spar);
        else if (key == "methods") {
            const auto labels = get_as<std::vector<std::string>>(doc, "methods");
            config.methods.clear();
            for (const auto& label : labels) {
                const auto method = parse_method(label);
                if (!method) throw Error(ErrorCode::InvalidArgument, "unknown method '" + label + "'");
                config.methods.push_back(*method);
            }
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown config field '" + key + "'");
        }
    }
    config.validate();
    return config;
}

std::string experiment_config_to_json(const ExperimentConfig& config)
{
    json doc;
    doc["setting"] = std::string(to_string(config.design.setting));
    doc["regime"] = std::string(to_string(config.design.regime));
    doc["n"] = config.design.n;
    doc["p"] = config.design.p;
    doc["n_test"] = config.design.n_test;
    doc["rho_snr"] = config.design.rho_snr;
    doc["mu"] = config.design.mu;
    if (config.design.active) doc["active"] = *config.design.active;
    if (config.design.rho) doc["rho"] = *config.design.rho;
    doc["reps"] = config.reps;
    doc["seed"] = config.seed;
    json methods = json::array();
    for (const auto& m : config.methods) methods.push_back(m.name());
    doc["methods"] = methods;
    doc["output"] = config.output;
    doc["parallelism"] = config.parallelism;
    doc["record_timing"] = config.record_timing;
    json spar;
    spar["max_models"] = config.spar.max_models;
    spar["screen_factor"] = config.spar.screen_factor;
    if (config.spar.m_lower) spar["m_lower"] = *config.spar.m_lower;
    if (config.spar.m_upper) spar["m_upper"] = *config.spar.m_upper;
    spar["threshold_grid_size"] = config.spar.threshold_grid_size;
    spar["folds"] = config.spar.folds;
    spar["ridge_fallback"] = config.spar.ridge_fallback;
    doc["spar"] = spar;
    return doc.dump(2);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const ResultRecord& r)
{
    out << csv_text(r.method) << ',' << r.setting << ',' << r.regime << ',' << r.rep << ','
        << (r.sweep_value ? csv_number(*r.sweep_value) : "NA") << ',';
    if (r.outcome) {
        const auto& o = *r.outcome;
        out << csv_number(o.eval.rmspe) << ',' << csv_number(o.eval.mspe) << ',';
        if (o.has_selection)
            out << csv_number(o.eval.precision) << ',' << csv_number(o.eval.recall) << ',' << csv_number(o.eval.f1) << ',';
        else
            out << "NA,NA,NA,";
        out << o.eval.num_active << ',' << (o.chosen_m ? std::to_string(*o.chosen_m) : "NA") << ','
            << (o.chosen_lambda ? csv_number(*o.chosen_lambda) : "NA") << ',' << csv_number(o.eval.runtime_seconds);
    } else {
        out << "NA,NA,NA,NA,NA,NA,NA,NA,NA";
    }
    out << ',' << csv_text(r.error) << '\n';
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records)
{
    write_csv_header(out);
    for (const auto& r : records) write_csv_row(out, r);
}

namespace {

std::vector<ResultRecord> run_replication(const ExperimentConfig& config, int rep, std::optional<double> sweep_value)
{
    std::vector<ResultRecord> rows;
    rows.reserve(config.methods.size());
    const std::string setting(to_string(config.design.setting));
    const std::string regime(to_string(config.design.regime));
    auto blank = [&](const MethodSpec& m) {
        ResultRecord r;
        r.method = m.name();
        r.setting = setting;
        r.regime = regime;
        r.rep = rep;
        r.sweep_value = sweep_value;
        return r;
    };

    std::optional<SimulatedData> data;
    std::string data_error;
    try {
        data = generate(config.design, derive_seed(config.seed, SeedStream::Data, static_cast<std::uint64_t>(rep)));
    } catch (const std::exception& e) {
        data_error = std::string("data generation failed: ") + e.what();
    }

    for (std::size_t i = 0; i < config.methods.size(); ++i) {
        ResultRecord r = blank(config.methods[i]);
        if (!data) {
            r.error = data_error;
        } else {
            Rng rng = make_rng(derive_seed(config.seed, SeedStream::Method, static_cast<std::uint64_t>(rep), i));
            try {
                r.outcome = evaluate_method(config.methods[i], data->train, data->test, config.spar, rng,
                                            config.record_timing);
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

std::vector<ResultRecord> run_simulation(const ExperimentConfig& config, std::optional<double> sweep_value)
{
    config.validate();
    std::vector<std::vector<ResultRecord>> per_rep(static_cast<std::size_t>(config.reps));
    if (config.parallelism == 1) {
        for (int r = 0; r < config.reps; ++r) per_rep[static_cast<std::size_t>(r)] = run_replication(config, r, sweep_value);
    } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallelism)
        for (int r = 0; r < config.reps; ++r) per_rep[static_cast<std::size_t>(r)] = run_replication(config, r, sweep_value);
    }
    std::vector<ResultRecord> rows;
    for (auto& block : per_rep)
        for (auto& row : block) rows.push_back(std::move(row));
    return rows;
}

namespace {

constexpr std::pair<SweepParameter, std::string_view> kSweepNames[] = {
    {SweepParameter::NumModels, "num-models"}, {SweepParameter::ScreenFactor, "screen-factor"},
    {SweepParameter::SampleSize, "n"},         {SweepParameter::Dimension, "p"},
    {SweepParameter::Snr, "snr"},
};

Index as_count(double value, const char* what)
{
    if (!(value >= 1.0) || std::floor(value) != value)
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " sweep values must be positive integers");
    return static_cast<Index>(value);
}

} // namespace

std::string_view to_string(SweepParameter parameter)
{
    for (const auto& [k, name] : kSweepNames)
        if (k == parameter) return name;
    return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name)
{
    for (const auto& [k, n] : kSweepNames)
        if (n == name) return k;
    return std::nullopt;
}

ExperimentConfig with_sweep_value(const ExperimentConfig& base, SweepParameter parameter, double value)
{
    ExperimentConfig config = base;
    switch (parameter) {
    case SweepParameter::NumModels: {
        const int models = static_cast<int>(as_count(value, "num-models"));
        config.spar.max_models = models;
        for (auto& m : config.methods) m.models = models;
        break;
    }
    case SweepParameter::ScreenFactor: config.spar.screen_factor = value; break;
    case SweepParameter::SampleSize: config.design.n = as_count(value, "n"); break;
    case SweepParameter::Dimension: config.design.p = as_count(value, "p"); break;
    case SweepParameter::Snr: config.design.rho_snr = value; break;
    }
    return config;
}

std::vector<ResultRecord> sweep(SweepParameter parameter, const std::vector<double>& grid, const ExperimentConfig& base)
{
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grid must not be empty");
    std::vector<ExperimentConfig> configs;
    for (double v : grid) {
        configs.push_back(with_sweep_value(base, parameter, v));
        configs.back().validate();
    }
    std::vector<ResultRecord> rows;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        auto block = run_simulation(configs[g], grid[g]);
        for (auto& row : block) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace spar

// spar: simulation runner, theory checks and model fit/predict on CSV data.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spar/dataset_io.hpp"
#include "spar/error.hpp"
#include "spar/experiment.hpp"
#include "spar/model_io.hpp"
#include "spar/rng.hpp"
#include "spar/spar.hpp"
#include "spar/theory_check.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInternalError = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to `path`, or stdout when it is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    fn(out);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<std::string> out;
    std::optional<int> jobs;
    bool no_timing = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f)
{
    cmd->add_option("--config", f.config, "JSON experiment config");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--reps", f.reps, "replications");
    cmd->add_option("--out", f.out, "output CSV ('-' for stdout)");
    cmd->add_option("--jobs", f.jobs, "replication workers");
    cmd->add_flag("--no-timing", f.no_timing, "write NA for runtime_s (byte-stable output)");
}

spar::ExperimentConfig load_config(const RunFlags& f)
{
    spar::ExperimentConfig config = f.config.empty() ? spar::default_experiment()
                                                     : spar::parse_experiment_config(read_file(f.config));
    if (f.seed) config.seed = *f.seed;
    if (f.reps) config.reps = *f.reps;
    if (f.out) config.output = *f.out;
    if (f.jobs) config.parallelism = *f.jobs;
    if (f.no_timing) config.record_timing = false;
    config.validate();
    return config;
}

spar::Dataset load_dataset(const std::string& path)
{
    std::istringstream in(read_file(path));
    return spar::read_dataset_csv(in);
}

bool is_config_error(const spar::Error& e)
{
    switch (e.code()) {
    case spar::ErrorCode::InvalidArgument:
    case spar::ErrorCode::ParseError:
    case spar::ErrorCode::DimensionMismatch:
    case spar::ErrorCode::ZeroVarianceResponse: return true;
    default: return false;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse projected averaged regression: simulations, theory checks, fit and predict"};
    app.require_subcommand(1);

    RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "run a simulation study and write one CSV row per (rep, method)");
    add_run_flags(simulate, sim_flags);

    RunFlags sweep_flags;
    std::string sweep_param;
    std::vector<double> sweep_grid;
    auto* sweep_cmd = app.add_subcommand("sweep", "rerun a simulation over a grid of one parameter");
    add_run_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--param", sweep_param, "num-models, screen-factor, n, p or snr")->required();
    sweep_cmd->add_option("--grid", sweep_grid, "grid values")->required()->delimiter(',');

    spar::Theorem1Options th;
    std::optional<std::string> th_out;
    auto* theorem = app.add_subcommand("check-theorem1", "random-sign vs oracle CW projection against the bound");
    theorem->add_option("--n", th.n, "training rows")->capture_default_str();
    theorem->add_option("--p", th.p, "predictors")->capture_default_str();
    theorem->add_option("--m", th.m, "goal dimension")->capture_default_str();
    theorem->add_option("--a", th.a, "active predictors")->capture_default_str();
    theorem->add_option("--reps", th.reps, "replications")->capture_default_str();
    theorem->add_option("--seed", th.seed, "master seed")->capture_default_str();
    theorem->add_option("--rho", th.rho, "compound-symmetry correlation")->capture_default_str();
    theorem->add_option("--snr", th.rho_snr, "signal-to-noise ratio")->capture_default_str();
    theorem->add_option("--out", th_out, "per-method CSV");

    spar::Index lemma_p = 12, lemma_m = 12;
    std::optional<std::string> lemma_out;
    auto* lemmas = app.add_subcommand("check-lemmas", "closed-form moments against exact values");
    lemmas->add_option("--p-max", lemma_p, "largest p (at most 14)")->capture_default_str();
    lemmas->add_option("--m-max", lemma_m, "largest m")->capture_default_str();
    lemmas->add_option("--out", lemma_out, "full comparison table as CSV");

    std::string fit_data, fit_out;
    std::optional<std::string> fit_config;
    std::uint64_t fit_seed = 1;
    std::string fit_rule = "best";
    std::optional<int> fit_models, fit_folds;
    std::optional<double> fit_factor;
    auto* fit = app.add_subcommand("spar-fit", "fit SPAR on a CSV dataset and write the model JSON");
    fit->add_option("--data", fit_data, "CSV with predictor columns and a y column")->required();
    fit->add_option("--out", fit_out, "model JSON ('-' for stdout)");
    fit->add_option("--config", fit_config, "JSON config; its 'spar' object is used");
    fit->add_option("--seed", fit_seed, "seed")->capture_default_str();
    fit->add_option("--rule", fit_rule, "best or 1se")->capture_default_str();
    fit->add_option("--max-models", fit_models, "ensemble size");
    fit->add_option("--screen-factor", fit_factor, "screen ceil(c n) variables");
    fit->add_option("--folds", fit_folds, "CV folds");

    std::string pred_model, pred_data, pred_out;
    auto* predict = app.add_subcommand("predict", "predict from a model JSON for CSV rows");
    predict->add_option("--model", pred_model, "model JSON")->required();
    predict->add_option("--data", pred_data, "CSV of predictors (a y column is ignored)")->required();
    predict->add_option("--out", pred_out, "predictions CSV ('-' for stdout)");

    RunFlags gen_flags;
    int gen_rep = 0;
    std::string gen_prefix;
    auto* generate = app.add_subcommand("generate", "write one simulated replication as CSV plus truth JSON");
    generate->add_option("--config", gen_flags.config, "JSON experiment config");
    generate->add_option("--seed", gen_flags.seed, "master seed");
    generate->add_option("--rep", gen_rep, "replication index")->capture_default_str();
    generate->add_option("--out", gen_prefix, "prefix for <prefix>train.csv, test.csv, truth.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*simulate) {
            const auto config = load_config(sim_flags);
            const auto rows = spar::run_simulation(config);
            with_output(config.output, [&](std::ostream& out) { spar::write_csv(out, rows); });
        } else if (*sweep_cmd) {
            const auto config = load_config(sweep_flags);
            const auto param = spar::parse_sweep_parameter(sweep_param);
            if (!param) throw ConfigError("unknown sweep parameter '" + sweep_param + "'");
            const auto rows = spar::sweep(*param, sweep_grid, config);
            with_output(config.output, [&](std::ostream& out) { spar::write_csv(out, rows); });
        } else if (*theorem) {
            const auto report = spar::check_theorem1(th);
            std::cout << std::setprecision(6);
            std::cout << "method,mean_mspe,se\n";
            for (const auto& r : report.rows) std::cout << r.method << ',' << r.mean_mspe << ',' << r.se << '\n';
            std::cout << "difference " << report.mean_difference << " (se " << report.difference_se << "), bound "
                      << report.bound << " (tau " << report.tau << ", lambda_min " << report.lambda_min << ")\n";
            if (report.vacuous) std::cout << "warning: bound is not positive, check passes trivially\n";
            std::cout << (report.passed ? "PASS" : "FAIL") << '\n';
            if (th_out)
                with_output(*th_out, [&](std::ostream& out) {
                    out << "method,mean_mspe,se\n";
                    for (const auto& r : report.rows)
                        out << r.method << ',' << spar::format_double(r.mean_mspe) << ',' << spar::format_double(r.se) << '\n';
                });
        } else if (*lemmas) {
            const auto report = spar::check_lemma_moments(lemma_p, lemma_m);
            std::cout << std::setprecision(6);
            std::cout << "rows " << report.rows.size() << ", max error of exact identities " << report.max_exact_error << '\n';
            std::cout << "p,inverse2_error,ratio2_error (m = " << report.decay_m << ", a = " << report.decay_a << ")\n";
            for (const auto& d : report.decay) std::cout << d.p << ',' << d.inverse2_error << ',' << d.ratio2_error << '\n';
            std::cout << "slopes: inverse2 " << report.inverse2_slope << ", ratio2 " << report.ratio2_slope << '\n';
            if (lemma_out)
                with_output(*lemma_out, [&](std::ostream& out) {
                    out << "p,m,a,j_active,quantity,closed_form,exact,exact_identity\n";
                    for (const auto& r : report.rows)
                        out << r.p << ',' << r.m << ',' << r.a << ',' << r.j_active << ',' << r.quantity << ','
                            << spar::format_double(r.closed_form) << ',' << spar::format_double(r.exact) << ','
                            << r.exact_identity << '\n';
                });
        } else if (*fit) {
            spar::SparConfig config;
            if (fit_config) config = spar::parse_experiment_config(read_file(*fit_config)).spar;
            config.seed = fit_seed;
            if (fit_rule == "best") config.rule = spar::SelectionRule::Best;
            else if (fit_rule == "1se") config.rule = spar::SelectionRule::OneSe;
            else throw ConfigError("unknown rule '" + fit_rule + "'");
            if (fit_models) config.max_models = *fit_models;
            if (fit_factor) config.screen_factor = *fit_factor;
            if (fit_folds) config.folds = *fit_folds;
            config.validate();
            const auto model = spar::cross_validate(load_dataset(fit_data), config);
            with_output(fit_out, [&](std::ostream& out) { out << spar::model_to_json(model) << '\n'; });
        } else if (*predict) {
            const auto model = spar::model_from_json(read_file(pred_model));
            std::istringstream in(read_file(pred_data));
            const auto X = spar::read_predictors_csv(in);
            const auto y_hat = spar::predict(model, X);
            with_output(pred_out, [&](std::ostream& out) {
                out << "y_hat\n";
                for (spar::Index i = 0; i < y_hat.size(); ++i) out << spar::format_double(y_hat(i)) << '\n';
            });
        } else if (*generate) {
            const auto config = load_config(gen_flags);
            const auto data = spar::generate(
                config.design, spar::derive_seed(config.seed, spar::SeedStream::Data, static_cast<std::uint64_t>(gen_rep)));
            with_output(gen_prefix + "train.csv", [&](std::ostream& out) { spar::write_dataset_csv(out, data.train); });
            with_output(gen_prefix + "test.csv", [&](std::ostream& out) { spar::write_dataset_csv(out, data.test); });
            with_output(gen_prefix + "truth.json", [&](std::ostream& out) { out << spar::truth_to_json(*data.train.truth) << '\n'; });
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const spar::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_config_error(e) ? kConfigError : kInternalError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kOk;
}

// portlab: sector portfolio construction, forecasting, and backtesting.
//
// Pipeline: ingest -> frontier / eigen -> train -> predict -> backtest ->
// report (+ plot). Stages exchange JSON artifacts in the output directory, so
// individual stages can be rerun without repeating the slow ones.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "portlab/errors.hpp"
#include "portlab/pipeline.hpp"
#include "portlab/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"portfolio construction, LSTM price forecasting, and backtesting"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> output_override;
    app.add_option("--config", config_path, "path to the JSON run configuration")
        ->required();
    app.add_option("--seed", seed_override, "override the configured RNG seed");
    app.add_option("--output", output_override, "override the configured output directory");

    auto* ingest = app.add_subcommand("ingest", "load the CSV universe and write panel.json");
    auto* frontier =
        app.add_subcommand("frontier", "sample random portfolios and pick the optima");
    auto* eigen = app.add_subcommand("eigen", "build PCA eigen portfolios");
    auto* train = app.add_subcommand("train", "train one price forecaster per ticker");
    auto* predict = app.add_subcommand("predict", "predict exit-date prices and daily paths");
    auto* backtest =
        app.add_subcommand("backtest", "value the portfolios at exit and predicted prices");
    auto* report = app.add_subcommand("report", "assemble the cross-sector summary");
    auto* plot = app.add_subcommand("plot", "plot actual vs predicted prices for a ticker");

    std::vector<std::string> fixture_args;
    backtest->add_option("--fixture", fixture_args,
                         "backtest fixture file(s) instead of pipeline artifacts");
    std::vector<std::string> bundle_args;
    report->add_option("--bundle", bundle_args, "backtest bundle JSON file(s)")->required();
    std::string plot_ticker;
    plot->add_option("--ticker", plot_ticker, "ticker to plot")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        portlab::RunConfig config = portlab::load_run_config(config_path);
        if (seed_override) config.seed = *seed_override;
        if (output_override) config.output_dir = *output_override;

        std::vector<std::filesystem::path> fixtures(fixture_args.begin(), fixture_args.end());
        std::vector<std::filesystem::path> bundles(bundle_args.begin(), bundle_args.end());

        if (ingest->parsed()) portlab::cmd_ingest(config);
        else if (frontier->parsed()) portlab::cmd_frontier(config);
        else if (eigen->parsed()) portlab::cmd_eigen(config);
        else if (train->parsed()) portlab::cmd_train(config);
        else if (predict->parsed()) portlab::cmd_predict(config);
        else if (backtest->parsed()) {
            if (fixtures.empty()) portlab::cmd_backtest(config);
            else portlab::cmd_backtest_fixtures(config, fixtures);
        } else if (report->parsed()) portlab::cmd_report(config, bundles);
        else if (plot->parsed()) portlab::cmd_plot_prediction(config, plot_ticker);
        return kExitOk;
    } catch (const portlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const portlab::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const portlab::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

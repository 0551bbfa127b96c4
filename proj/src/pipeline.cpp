#include "portlab/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "portlab/backtest.hpp"
#include "portlab/eigen_portfolio.hpp"
#include "portlab/errors.hpp"
#include "portlab/frontier.hpp"
#include "portlab/market_data.hpp"
#include "portlab/svg.hpp"

namespace portlab {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path, const std::string& producer) {
    std::ifstream in(path);
    if (!in)
        throw DataError("missing artifact " + path.string() + " (run `portlab " + producer +
                        "` first)");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("artifact " + path.string() + " is not valid JSON: " + e.what());
    }
    return doc;
}

nlohmann::json panel_to_json(const PricePanel& panel) {
    nlohmann::json tickers = nlohmann::json::array();
    for (const auto& t : panel.tickers) tickers.push_back(t);
    nlohmann::json dates = nlohmann::json::array();
    for (const auto& d : panel.dates) dates.push_back(d.to_string());
    nlohmann::json closes = nlohmann::json::array();
    for (Eigen::Index r = 0; r < panel.closes.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < panel.closes.cols(); ++c)
            row.push_back(panel.closes(r, c));
        closes.push_back(std::move(row));
    }
    return {{"tickers", std::move(tickers)},
            {"dates", std::move(dates)},
            {"closes", std::move(closes)}};
}

PricePanel panel_from_json(const nlohmann::json& doc) {
    PricePanel panel;
    panel.tickers = doc.at("tickers").get<std::vector<std::string>>();
    for (const auto& text : doc.at("dates")) {
        const auto date = Date::parse(text.get<std::string>());
        if (!date) throw DataError("panel artifact has malformed date " + text.dump());
        panel.dates.push_back(*date);
    }
    const auto& closes = doc.at("closes");
    panel.closes.resize(static_cast<Eigen::Index>(closes.size()),
                        static_cast<Eigen::Index>(panel.tickers.size()));
    for (std::size_t r = 0; r < closes.size(); ++r)
        for (std::size_t c = 0; c < panel.tickers.size(); ++c)
            panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                closes[r][c].get<double>();
    return panel;
}

PricePanel ingest_panel(const RunConfig& config) {
    std::ifstream in(config.data_path);
    if (!in) throw DataError("cannot read price data " + config.data_path);
    auto series = load_prices(in);
    if (!config.tickers.empty()) {
        std::vector<PriceSeries> kept;
        for (const auto& want : config.tickers) {
            bool found = false;
            for (auto& s : series)
                if (s.ticker == want) {
                    kept.push_back(std::move(s));
                    found = true;
                    break;
                }
            if (!found)
                throw DataError("ticker " + want + " not present in " + config.data_path);
        }
        series = std::move(kept);
    }
    return align(series);
}

/// Artifact if present, fresh ingestion otherwise.
PricePanel acquire_panel(const RunConfig& config) {
    const ArtifactPaths paths = artifacts_for(config);
    if (std::filesystem::exists(paths.panel()))
        return panel_from_json(read_json(paths.panel(), "ingest"));
    return ingest_panel(config);
}

ReturnStats train_window_stats(const RunConfig& config, const PricePanel& panel,
                               ReturnMatrix* returns_out = nullptr) {
    const PricePanel window = panel.slice(config.train_start, config.train_end);
    if (window.dates.size() < 2)
        throw DataError("train window " + config.train_start.to_string() + ".." +
                        config.train_end.to_string() + " covers fewer than 2 trading days");
    ReturnMatrix returns = daily_returns(window);
    ReturnStats stats = ReturnStats::from_daily_returns(returns, config.trading_days);
    if (returns_out) *returns_out = std::move(returns);
    return stats;
}

std::map<std::string, double> prices_at(const PricePanel& panel, const Date& when) {
    std::map<std::string, double> prices;
    for (const auto& ticker : panel.tickers)
        prices[ticker] = panel.close_on_or_before(ticker, when);
    return prices;
}

nlohmann::json bundle_from_reports(const std::string& sector, double capital,
                                   const Date& entry_date, const Date& exit_date,
                                   const Allocation& optimum_alloc,
                                   const BacktestReport& optimum,
                                   const Allocation& eigen_alloc, const BacktestReport& eigen,
                                   const Allocation& predicted_alloc,
                                   const BacktestReport& predicted) {
    return {{"sector", sector},
            {"capital", capital},
            {"entry_date", entry_date.to_string()},
            {"exit_date", exit_date.to_string()},
            {"optimum", report_to_json(optimum, optimum_alloc)},
            {"eigen", report_to_json(eigen, eigen_alloc)},
            {"predicted", report_to_json(predicted, predicted_alloc)},
            {"summary_row",
             {{"sector", sector},
              {"optimum_pct", optimum.return_pct},
              {"eigen_pct", eigen.return_pct},
              {"predicted_pct", predicted.return_pct}}}};
}

void write_bundle_outputs(const ArtifactPaths& paths, const std::string& sector,
                          const nlohmann::json& bundle, const Allocation& optimum_alloc,
                          const BacktestReport& optimum, const Allocation& eigen_alloc,
                          const BacktestReport& eigen, const Allocation& predicted_alloc,
                          const BacktestReport& predicted) {
    write_json(paths.backtest_json(sector), bundle);
    std::ostringstream tables;
    tables << report_table(sector + ": optimum-risk portfolio, actual prices", optimum_alloc,
                           optimum)
           << '\n'
           << report_table(sector + ": eigen portfolio, actual prices", eigen_alloc, eigen)
           << '\n'
           << report_table(sector + ": predicted prices", predicted_alloc, predicted);
    write_text(paths.backtest_csv(sector), tables.str());
}

}  // namespace

ArtifactPaths artifacts_for(const RunConfig& config) {
    return ArtifactPaths{std::filesystem::path(config.output_dir)};
}

void cmd_ingest(const RunConfig& config) {
    config.validate();
    const PricePanel panel = ingest_panel(config);
    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);
    write_json(paths.panel(), panel_to_json(panel));
    std::cout << "ingested " << panel.tickers.size() << " tickers x " << panel.dates.size()
              << " trading days (" << panel.dates.front().to_string() << " .. "
              << panel.dates.back().to_string() << ")\n";
}

void cmd_frontier(const RunConfig& config) {
    config.validate();
    const PricePanel panel = acquire_panel(config);
    if (panel.tickers.size() == 1)
        std::cerr << "warning: universe has a single ticker; every sampled portfolio is "
                     "identical\n";
    const ReturnStats stats = train_window_stats(config, panel);
    const FrontierResult result =
        build_frontier(stats, config.sample_count, config.seed, config.risk_free);

    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);
    write_json(paths.frontier_json(), to_json(result));

    ScatterPlotSpec plot;
    plot.title = config.sector + ": sampled portfolios";
    plot.x_label = "risk (annualized volatility)";
    plot.y_label = "return (annualized)";
    for (const auto& s : result.samples)
        plot.points.push_back({s.ann_volatility, s.ann_return});
    for (const auto& p : efficient_frontier_points(result.samples, config.frontier_bins))
        plot.contour.push_back({p.volatility, p.ann_return});
    const auto& min_var = result.samples[result.min_variance];
    const auto& max_sharpe = result.samples[result.max_sharpe];
    plot.markers.push_back(
        {min_var.ann_volatility, min_var.ann_return, "red", "minimum variance"});
    plot.markers.push_back(
        {max_sharpe.ann_volatility, max_sharpe.ann_return, "green", "optimum risk"});
    write_text(paths.frontier_svg(), render_scatter_svg(plot));
    std::cout << "frontier: " << result.samples.size() << " samples, min-variance index "
              << result.min_variance << ", max-sharpe index " << result.max_sharpe << "\n";
}

void cmd_eigen(const RunConfig& config) {
    config.validate();
    const PricePanel panel = acquire_panel(config);
    ReturnMatrix returns;
    const ReturnStats stats = train_window_stats(config, panel, &returns);
    const EigenPortfolioResult result =
        build_eigen_portfolio(returns, stats, config.variance_target, config.risk_free);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << '\n';

    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);
    write_json(paths.eigen_json(), to_json(result));
    std::cout << "eigen: retained " << result.pca.k << " components, selected component "
              << result.selected_component << "\n";
}

void cmd_train(const RunConfig& config) {
    config.validate();
    const PricePanel panel = acquire_panel(config);
    const PricePanel window = panel.slice(config.train_start, config.train_end);
    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);

    for (std::size_t i = 0; i < window.tickers.size(); ++i) {
        const std::string& ticker = window.tickers[i];
        std::vector<double> series(window.closes.col(static_cast<Eigen::Index>(i)).data(),
                                   window.closes.col(static_cast<Eigen::Index>(i)).data() +
                                       window.closes.rows());
        LSTMConfig cfg = config.lstm;
        cfg.seed = SplitMix64::substream(config.seed, i).next_u64();
        auto [model, report] = train(series, cfg);
        save_checkpoint(model, paths.model(ticker));

        nlohmann::json epochs = nlohmann::json::array();
        for (std::size_t e = 0; e < report.train_loss.size(); ++e)
            epochs.push_back({{"epoch", e + 1},
                              {"huber_loss", report.train_loss[e]},
                              {"mae", report.train_mae[e]}});
        nlohmann::json doc = {{"ticker", ticker}, {"epochs", std::move(epochs)}};
        if (report.val_loss) {
            doc["validation"] = {{"huber_loss", *report.val_loss}, {"mae", *report.val_mae}};
        }
        write_json(paths.training_report(ticker), doc);
        std::cout << "trained " << ticker;
        if (!report.train_loss.empty())
            std::cout << ": huber " << report.train_loss.front() << " -> "
                      << report.train_loss.back();
        std::cout << "\n";
    }
}

void cmd_predict(const RunConfig& config) {
    config.validate();
    const PricePanel panel = acquire_panel(config);
    const ArtifactPaths paths = artifacts_for(config);

    const Eigen::Index exit_row = panel.row_on_or_before(config.exit_date);
    if (exit_row < 0)
        throw DataError("no trading data on or before exit date " +
                        config.exit_date.to_string());

    nlohmann::json predictions = nlohmann::json::object();
    nlohmann::json paths_json = nlohmann::json::object();

    for (std::size_t i = 0; i < panel.tickers.size(); ++i) {
        const std::string& ticker = panel.tickers[i];
        if (!std::filesystem::exists(paths.model(ticker)))
            throw DataError("missing checkpoint " + paths.model(ticker).string() +
                            " (run `portlab train` first)");
        const LSTMModel model = load_checkpoint(paths.model(ticker));
        const int lookback = model.config.lookback;
        const int horizon = model.config.horizon;
        const auto col = panel.closes.col(static_cast<Eigen::Index>(i));

        auto predict_row = [&](Eigen::Index row) {
            const Eigen::Index start = row - horizon - lookback + 1;
            if (start < 0)
                throw DataError("not enough history before " +
                                panel.dates[static_cast<std::size_t>(row)].to_string() +
                                " to form a " + std::to_string(lookback) + "-day window for " +
                                ticker);
            std::vector<double> window(col.data() + start, col.data() + start + lookback);
            return predict_next(model, window);
        };

        predictions[ticker] = predict_row(exit_row);

        nlohmann::json path = nlohmann::json::array();
        for (Eigen::Index row = 0; row <= exit_row; ++row) {
            if (panel.dates[static_cast<std::size_t>(row)] < config.entry_date) continue;
            path.push_back({{"date", panel.dates[static_cast<std::size_t>(row)].to_string()},
                            {"actual", col(row)},
                            {"predicted", predict_row(row)}});
        }
        paths_json[ticker] = std::move(path);
    }

    std::filesystem::create_directories(paths.dir);
    write_json(paths.predictions(),
               {{"exit_date", panel.dates[static_cast<std::size_t>(exit_row)].to_string()},
                {"predictions", std::move(predictions)},
                {"paths", std::move(paths_json)}});
    std::cout << "predicted " << panel.tickers.size() << " tickers for "
              << panel.dates[static_cast<std::size_t>(exit_row)].to_string() << "\n";
}

void cmd_backtest(const RunConfig& config) {
    config.validate();
    const PricePanel panel = acquire_panel(config);
    const ArtifactPaths paths = artifacts_for(config);

    const FrontierResult frontier =
        frontier_from_json(read_json(paths.frontier_json(), "frontier"));
    const EigenPortfolioResult eigen =
        eigen_portfolio_from_json(read_json(paths.eigen_json(), "eigen"));
    const nlohmann::json predictions_doc = read_json(paths.predictions(), "predict");

    std::map<std::string, double> predicted_prices;
    for (const auto& [ticker, price] : predictions_doc.at("predictions").items())
        predicted_prices[ticker] = price.get<double>();

    const auto entry_prices = prices_at(panel, config.entry_date);
    const auto exit_prices = prices_at(panel, config.exit_date);

    const Weights optimum_weights = frontier.samples.at(frontier.max_sharpe).weights;
    const EigenCandidate* selected = nullptr;
    for (const auto& candidate : eigen.candidates)
        if (candidate.component_index == eigen.selected_component) selected = &candidate;
    if (!selected) throw DataError("eigen artifact lacks its selected candidate");

    const Allocation optimum_alloc =
        allocate(config.capital, optimum_weights, panel.tickers, entry_prices);
    const Allocation eigen_alloc =
        allocate(config.capital, selected->weights, panel.tickers, entry_prices);

    const BacktestReport optimum = realize(optimum_alloc, exit_prices);
    const BacktestReport eigen_report = realize(eigen_alloc, exit_prices);
    const BacktestReport predicted = predicted_report(optimum_alloc, predicted_prices);

    const nlohmann::json bundle = bundle_from_reports(
        config.sector, config.capital, config.entry_date, config.exit_date, optimum_alloc,
        optimum, eigen_alloc, eigen_report, optimum_alloc, predicted);
    write_bundle_outputs(paths, config.sector, bundle, optimum_alloc, optimum, eigen_alloc,
                         eigen_report, optimum_alloc, predicted);
    std::cout << config.sector << ": optimum " << optimum.return_pct << " %, eigen "
              << eigen_report.return_pct << " %, predicted " << predicted.return_pct << " %\n";
}

void cmd_backtest_fixtures(const RunConfig& config,
                           const std::vector<std::filesystem::path>& fixtures) {
    config.validate();
    if (fixtures.empty())
        throw ConfigError("backtest: at least one --fixture file is required");
    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);

    struct SectorFixtures {
        const BacktestFixture* optimum = nullptr;
        const BacktestFixture* eigen = nullptr;
        const BacktestFixture* predicted = nullptr;
    };
    std::vector<BacktestFixture> loaded;
    loaded.reserve(fixtures.size());
    for (const auto& path : fixtures) loaded.push_back(load_fixture(path));

    std::map<std::string, SectorFixtures> by_sector;
    for (const auto& fixture : loaded) {
        auto& group = by_sector[fixture.sector];
        if (fixture.portfolio == "optimum-risk") group.optimum = &fixture;
        else if (fixture.portfolio == "eigen") group.eigen = &fixture;
        else if (fixture.portfolio == "predicted") group.predicted = &fixture;
        else
            throw DataError("fixture for sector " + fixture.sector +
                            " has unknown portfolio label `" + fixture.portfolio + "`");
    }

    for (const auto& [sector, group] : by_sector) {
        if (!group.optimum || !group.eigen)
            throw DataError("sector " + sector +
                            " needs both an optimum-risk and an eigen fixture");

        auto run_actual = [](const BacktestFixture& fixture) {
            const Allocation alloc = allocate(fixture.capital, fixture.weights(),
                                              fixture.tickers(), fixture.entry_prices());
            return std::make_pair(alloc, realize(alloc, fixture.exit_prices()));
        };
        const auto [optimum_alloc, optimum] = run_actual(*group.optimum);
        const auto [eigen_alloc, eigen_rep] = run_actual(*group.eigen);

        // The predicted valuation follows whichever fixture carries predicted
        // prices: a dedicated `predicted` fixture wins, then optimum, then
        // eigen.
        const BacktestFixture* source = group.predicted;
        if (!source && !group.optimum->predicted_prices().empty()) source = group.optimum;
        if (!source && !group.eigen->predicted_prices().empty()) source = group.eigen;
        if (!source || source->predicted_prices().empty())
            throw DataError("sector " + sector + " has no fixture with predicted prices");

        const Allocation predicted_alloc = allocate(source->capital, source->weights(),
                                                    source->tickers(), source->entry_prices());
        const BacktestReport predicted =
            predicted_report(predicted_alloc, source->predicted_prices());

        const nlohmann::json bundle = bundle_from_reports(
            sector, group.optimum->capital, group.optimum->entry_date,
            group.optimum->exit_date, optimum_alloc, optimum, eigen_alloc, eigen_rep,
            predicted_alloc, predicted);
        write_bundle_outputs(paths, sector, bundle, optimum_alloc, optimum, eigen_alloc,
                             eigen_rep, predicted_alloc, predicted);
        std::cout << sector << ": optimum " << optimum.return_pct << " %, eigen "
                  << eigen_rep.return_pct << " %, predicted " << predicted.return_pct << " %\n";
    }
}

void cmd_report(const RunConfig& config,
                const std::vector<std::filesystem::path>& bundles) {
    config.validate();
    if (bundles.empty()) throw ConfigError("report: at least one --bundle file is required");

    std::map<std::string, SummaryEntry> by_sector;
    for (const auto& path : bundles) {
        const nlohmann::json doc = read_json(path, "backtest");
        try {
            const auto& row = doc.at("summary_row");
            SummaryEntry entry;
            entry.optimum_pct = row.at("optimum_pct").get<double>();
            entry.eigen_pct = row.at("eigen_pct").get<double>();
            entry.predicted_pct = row.at("predicted_pct").get<double>();
            by_sector[row.at("sector").get<std::string>()] = entry;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bundle " + path.string() + " lacks a summary row: " + e.what());
        }
    }

    const std::vector<SummaryRow> rows = summary(by_sector);
    const ArtifactPaths paths = artifacts_for(config);
    std::filesystem::create_directories(paths.dir);

    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows)
        rows_json.push_back({{"sector", row.sector},
                             {"optimum_pct", row.entry.optimum_pct},
                             {"eigen_pct", row.entry.eigen_pct},
                             {"predicted_pct", row.entry.predicted_pct}});
    write_json(paths.summary_json(), {{"rows", std::move(rows_json)}});
    write_text(paths.summary_csv(), summary_csv(rows));
    std::cout << summary_csv(rows);
}

void cmd_plot_prediction(const RunConfig& config, const std::string& ticker) {
    config.validate();
    const ArtifactPaths paths = artifacts_for(config);
    const nlohmann::json doc = read_json(paths.predictions(), "predict");
    if (!doc.at("paths").contains(ticker))
        throw DataError("predictions.json has no path for ticker " + ticker);

    LinePlotSpec plot;
    plot.title = ticker + ": actual vs predicted close";
    plot.x_label = "trading days since entry";
    plot.y_label = "close price";
    LineSeries actual{"actual", "#1f5fa8", {}};
    LineSeries predicted{"predicted", "#d62728", {}};
    double x = 0.0;
    for (const auto& point : doc.at("paths").at(ticker)) {
        actual.points.push_back({x, point.at("actual").get<double>()});
        predicted.points.push_back({x, point.at("predicted").get<double>()});
        x += 1.0;
    }
    if (actual.points.empty())
        throw DataError("predictions.json path for " + ticker + " is empty");
    plot.series = {std::move(actual), std::move(predicted)};
    write_text(paths.prediction_svg(ticker), render_line_svg(plot));
    std::cout << "wrote " << paths.prediction_svg(ticker).string() << "\n";
}

}  // namespace portlab

#include "portlab/run_config.hpp"

#include <fstream>

#include "json.hpp"
#include "portlab/errors.hpp"

namespace portlab {

void RunConfig::validate() const {
    if (data_path.empty()) throw ConfigError("config: data_path is required");
    if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
    if (!(train_start < train_end))
        throw ConfigError("config: train window start must precede its end");
    if (!(train_end < entry_date))
        throw ConfigError("config: entry_date must come after the train window");
    if (!(entry_date <= exit_date))
        throw ConfigError("config: exit_date must not precede entry_date");
    if (sample_count < 1) throw ConfigError("config: sample_count must be >= 1");
    if (frontier_bins < 1) throw ConfigError("config: frontier_bins must be >= 1");
    if (!(capital > 0.0)) throw ConfigError("config: capital must be > 0");
    if (!(variance_target > 0.0) || variance_target > 1.0)
        throw ConfigError("config: variance_target must be in (0, 1]");
    if (!(trading_days > 0.0)) throw ConfigError("config: trading_days must be > 0");
    try {
        lstm.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

namespace {

Date parse_date_field(const nlohmann::json& doc, const char* key, Date fallback) {
    if (!doc.contains(key)) return fallback;
    const auto text = doc.at(key).get<std::string>();
    const auto date = Date::parse(text);
    if (!date)
        throw ConfigError(std::string("config: field ") + key + " has malformed date `" + text +
                          "`");
    return *date;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }

    RunConfig config;
    try {
        config.data_path = doc.value("data_path", config.data_path);
        config.sector = doc.value("sector", config.sector);
        config.output_dir = doc.value("output_dir", config.output_dir);
        if (doc.contains("tickers"))
            config.tickers = doc.at("tickers").get<std::vector<std::string>>();

        if (doc.contains("train_window")) {
            const auto& window = doc.at("train_window");
            config.train_start = parse_date_field(window, "start", config.train_start);
            config.train_end = parse_date_field(window, "end", config.train_end);
        }
        config.entry_date = parse_date_field(doc, "entry_date", config.entry_date);
        config.exit_date = parse_date_field(doc, "exit_date", config.exit_date);

        config.capital = doc.value("capital", config.capital);
        config.sample_count = doc.value("sample_count", config.sample_count);
        config.frontier_bins = doc.value("frontier_bins", config.frontier_bins);
        config.variance_target = doc.value("variance_target", config.variance_target);
        config.risk_free.ret_free = doc.value("risk_free_return", config.risk_free.ret_free);
        config.trading_days = doc.value("trading_days", config.trading_days);
        config.seed = doc.value("seed", config.seed);

        if (doc.contains("lstm")) {
            const auto& lstm = doc.at("lstm");
            config.lstm.lookback = lstm.value("lookback", config.lstm.lookback);
            config.lstm.hidden_units = lstm.value("hidden_units", config.lstm.hidden_units);
            config.lstm.recurrent_layers =
                lstm.value("recurrent_layers", config.lstm.recurrent_layers);
            config.lstm.dense_units = lstm.value("dense_units", config.lstm.dense_units);
            config.lstm.horizon = lstm.value("horizon", config.lstm.horizon);
            config.lstm.batch_size = lstm.value("batch_size", config.lstm.batch_size);
            config.lstm.epochs = lstm.value("epochs", config.lstm.epochs);
            config.lstm.dropout_rate = lstm.value("dropout_rate", config.lstm.dropout_rate);
            config.lstm.learning_rate = lstm.value("learning_rate", config.lstm.learning_rate);
            config.lstm.huber_delta = lstm.value("huber_delta", config.lstm.huber_delta);
            config.lstm.validation_split =
                lstm.value("validation_split", config.lstm.validation_split);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " has malformed fields: " + e.what());
    }
    return config;
}

}  // namespace portlab

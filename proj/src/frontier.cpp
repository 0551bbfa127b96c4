#include "portlab/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "portlab/prng.hpp"

namespace portlab {

std::vector<PortfolioSample> sample_portfolios(const ReturnStats& stats, std::size_t count,
                                               std::uint64_t seed, RiskFreeAssumption rf) {
    if (count == 0) throw std::invalid_argument("sample_portfolios: count must be >= 1");
    const Eigen::Index n = stats.size();
    if (n < 1 || stats.cov_annual.rows() != n || stats.cov_annual.cols() != n)
        throw std::invalid_argument("sample_portfolios: malformed return stats");

    std::vector<PortfolioSample> samples;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SplitMix64 rng = SplitMix64::substream(seed, i);
        Eigen::VectorXd raw(n);
        for (Eigen::Index j = 0; j < n; ++j) raw(j) = rng.next_double();
        PortfolioSample sample;
        sample.weights.values = raw / raw.sum();
        sample.ann_return = portfolio_return(sample.weights, stats);
        const PortfolioRisk risk = portfolio_variance(sample.weights, stats);
        sample.ann_volatility = risk.volatility;
        sample.sharpe = sharpe_ratio(sample.ann_return, sample.ann_volatility, rf);
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::size_t select_min_variance(const std::vector<PortfolioSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("select_min_variance: no samples");
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].ann_volatility < samples[best].ann_volatility) best = i;
    return best;
}

std::size_t select_max_sharpe(const std::vector<PortfolioSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("select_max_sharpe: no samples");
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].sharpe > samples[best].sharpe) best = i;
    return best;
}

std::vector<FrontierPoint> efficient_frontier_points(
    const std::vector<PortfolioSample>& samples, std::size_t bins) {
    if (samples.empty())
        throw std::invalid_argument("efficient_frontier_points: no samples");
    if (bins == 0) throw std::invalid_argument("efficient_frontier_points: bins must be >= 1");

    double lo = samples.front().ann_volatility;
    double hi = lo;
    for (const auto& s : samples) {
        lo = std::min(lo, s.ann_volatility);
        hi = std::max(hi, s.ann_volatility);
    }

    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> best(bins, samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::size_t bin = 0;
        if (width > 0.0) {
            bin = static_cast<std::size_t>((samples[i].ann_volatility - lo) / width);
            bin = std::min(bin, bins - 1);
        }
        if (best[bin] == samples.size() ||
            samples[i].ann_return > samples[best[bin]].ann_return)
            best[bin] = i;
    }

    std::vector<FrontierPoint> points;
    for (std::size_t bin = 0; bin < bins; ++bin)
        if (best[bin] != samples.size())
            points.push_back({samples[best[bin]].ann_volatility,
                              samples[best[bin]].ann_return});
    std::sort(points.begin(), points.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) {
                  return a.volatility < b.volatility;
              });
    return points;
}

FrontierResult build_frontier(const ReturnStats& stats, std::size_t count, std::uint64_t seed,
                              RiskFreeAssumption rf) {
    FrontierResult result;
    result.seed = seed;
    result.samples = sample_portfolios(stats, count, seed, rf);
    result.min_variance = select_min_variance(result.samples);
    result.max_sharpe = select_max_sharpe(result.samples);
    return result;
}

nlohmann::json to_json(const FrontierResult& result) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : result.samples) {
        nlohmann::json weights = nlohmann::json::array();
        for (Eigen::Index i = 0; i < s.weights.values.size(); ++i)
            weights.push_back(s.weights.values(i));
        samples.push_back({{"weights", std::move(weights)},
                           {"return", s.ann_return},
                           {"volatility", s.ann_volatility},
                           {"sharpe", s.sharpe}});
    }
    return {{"seed", result.seed},
            {"samples", std::move(samples)},
            {"min_variance_index", result.min_variance},
            {"max_sharpe_index", result.max_sharpe}};
}

FrontierResult frontier_from_json(const nlohmann::json& doc) {
    FrontierResult result;
    result.seed = doc.at("seed").get<std::uint64_t>();
    result.min_variance = doc.at("min_variance_index").get<std::size_t>();
    result.max_sharpe = doc.at("max_sharpe_index").get<std::size_t>();
    for (const auto& s : doc.at("samples")) {
        PortfolioSample sample;
        const auto& w = s.at("weights");
        sample.weights.values.resize(static_cast<Eigen::Index>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i)
            sample.weights.values(static_cast<Eigen::Index>(i)) = w[i].get<double>();
        sample.ann_return = s.at("return").get<double>();
        sample.ann_volatility = s.at("volatility").get<double>();
        sample.sharpe = s.at("sharpe").get<double>();
        result.samples.push_back(std::move(sample));
    }
    return result;
}

}  // namespace portlab

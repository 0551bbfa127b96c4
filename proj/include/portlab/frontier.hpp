#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "portlab/portfolio.hpp"

namespace portlab {

struct PortfolioSample {
    Weights weights;
    double ann_return = 0.0;
    double ann_volatility = 0.0;
    double sharpe = 0.0;
};

struct FrontierResult {
    std::vector<PortfolioSample> samples;
    std::size_t min_variance = 0;
    std::size_t max_sharpe = 0;
    std::uint64_t seed = 0;
};

/// Draw `count` long-only portfolios: n independent uniform(0,1) variates per
/// sample, normalized by their sum. Sample i uses the substream derived from
/// (seed, i), so results are reproducible and order-independent.
std::vector<PortfolioSample> sample_portfolios(const ReturnStats& stats, std::size_t count,
                                               std::uint64_t seed, RiskFreeAssumption rf);

/// Index of the lowest-volatility sample; first occurrence wins ties.
std::size_t select_min_variance(const std::vector<PortfolioSample>& samples);

/// Index of the highest-Sharpe sample; first occurrence wins ties.
std::size_t select_max_sharpe(const std::vector<PortfolioSample>& samples);

struct FrontierPoint {
    double volatility = 0.0;
    double ann_return = 0.0;
};

/// Partition the volatility axis into equal-width bins and keep the
/// best-return sample of each occupied bin, sorted by volatility.
std::vector<FrontierPoint> efficient_frontier_points(
    const std::vector<PortfolioSample>& samples, std::size_t bins);

FrontierResult build_frontier(const ReturnStats& stats, std::size_t count, std::uint64_t seed,
                              RiskFreeAssumption rf);

nlohmann::json to_json(const FrontierResult& result);
FrontierResult frontier_from_json(const nlohmann::json& doc);

}  // namespace portlab

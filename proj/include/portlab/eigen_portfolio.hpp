#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "portlab/portfolio.hpp"

namespace portlab {

/// Principal components of the standardized daily-return matrix.
///
/// `loadings` keeps the k retained components (row j = unit-norm loading
/// vector of component j); `explained_ratio` keeps the ratios of all n
/// components so the full spectrum stays inspectable. Eigenvector signs are
/// fixed so each row's largest-magnitude entry is positive, which makes the
/// decomposition deterministic.
struct PCAResult {
    Eigen::MatrixXd loadings;        // k x n
    Eigen::VectorXd explained_ratio; // n, non-increasing, sums to 1
    int k = 0;
};

/// Standardize returns column-wise, eigendecompose the correlation matrix,
/// and retain the smallest component prefix whose cumulative explained
/// variance reaches `variance_target`.
PCAResult fit_pca(const ReturnMatrix& returns, double variance_target = 0.80);

struct EigenCandidate {
    int component_index = 0;
    Weights weights;  // loading row / sum of its entries; may contain shorts
    double ann_return = 0.0;
    double ann_volatility = 0.0;
    double sharpe = 0.0;
};

/// One candidate per retained component. A component whose loading entries
/// sum to ~0 cannot be normalized to weights; it is skipped and reported in
/// `warnings` rather than failing the run.
std::vector<EigenCandidate> candidate_portfolios(const PCAResult& pca, const ReturnStats& stats,
                                                 RiskFreeAssumption rf,
                                                 std::vector<std::string>* warnings = nullptr);

/// Candidate with the highest Sharpe ratio; lowest component index on ties.
const EigenCandidate& select_best_eigen(const std::vector<EigenCandidate>& candidates);

struct EigenPortfolioResult {
    PCAResult pca;
    std::vector<EigenCandidate> candidates;
    int selected_component = 0;
    std::vector<std::string> warnings;
};

EigenPortfolioResult build_eigen_portfolio(const ReturnMatrix& returns, const ReturnStats& stats,
                                           double variance_target, RiskFreeAssumption rf);

nlohmann::json to_json(const EigenPortfolioResult& result);
EigenPortfolioResult eigen_portfolio_from_json(const nlohmann::json& doc);

}  // namespace portlab

#include "portlab/eigen_portfolio.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "portlab/errors.hpp"

namespace portlab {

PCAResult fit_pca(const ReturnMatrix& returns, double variance_target) {
    if (!(variance_target > 0.0) || variance_target > 1.0)
        throw std::invalid_argument("fit_pca: variance_target must be in (0, 1]");
    const Eigen::Index rows = returns.returns.rows();
    const Eigen::Index n = returns.returns.cols();
    if (rows < n + 1)
        throw DataError("fit_pca: need at least " + std::to_string(n + 1) +
                        " return rows for " + std::to_string(n) + " tickers, have " +
                        std::to_string(rows));

    // Standardize columns to zero mean and unit (sample) variance.
    Eigen::MatrixXd z = returns.returns.rowwise() - returns.returns.colwise().mean();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(rows - 1));
        if (!(sd > 0.0))
            throw DataError("fit_pca: ticker " + returns.tickers[static_cast<std::size_t>(j)] +
                            " has zero return variance");
        z.col(j) /= sd;
    }
    const Eigen::MatrixXd correlation =
        (z.transpose() * z) / static_cast<double>(rows - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
    if (solver.info() != Eigen::Success)
        throw NumericError("fit_pca: eigendecomposition failed to converge");

    // Eigen returns ascending eigenvalues; flip to descending.
    PCAResult result;
    result.explained_ratio.resize(n);
    Eigen::MatrixXd vectors(n, n);
    const double total = solver.eigenvalues().sum();
    for (Eigen::Index j = 0; j < n; ++j) {
        result.explained_ratio(j) = solver.eigenvalues()(n - 1 - j) / total;
        vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    }

    // Sign convention: largest-magnitude entry of each component positive.
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index at = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&at);
        if (vectors(at, j) < 0.0) vectors.col(j) = -vectors.col(j);
    }

    int k = static_cast<int>(n);
    double cumulative = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += result.explained_ratio(j);
        if (cumulative >= variance_target - 1e-12) {
            k = static_cast<int>(j + 1);
            break;
        }
    }
    result.k = k;
    result.loadings = vectors.leftCols(k).transpose();
    return result;
}

std::vector<EigenCandidate> candidate_portfolios(const PCAResult& pca, const ReturnStats& stats,
                                                 RiskFreeAssumption rf,
                                                 std::vector<std::string>* warnings) {
    if (pca.k < 1) throw std::invalid_argument("candidate_portfolios: no retained components");
    if (pca.loadings.cols() != stats.size())
        throw std::invalid_argument("candidate_portfolios: dimension mismatch");

    std::vector<EigenCandidate> candidates;
    for (int j = 0; j < pca.k; ++j) {
        const Eigen::VectorXd loading = pca.loadings.row(j);
        const double total = loading.sum();
        if (std::abs(total) <= 1e-12) {
            if (warnings)
                warnings->push_back("component " + std::to_string(j) +
                                    " loading entries sum to ~0; candidate skipped");
            continue;
        }
        EigenCandidate candidate;
        candidate.component_index = j;
        candidate.weights.values = loading / total;
        candidate.ann_return = portfolio_return(candidate.weights, stats);
        const PortfolioRisk risk = portfolio_variance(candidate.weights, stats);
        candidate.ann_volatility = risk.volatility;
        candidate.sharpe = sharpe_ratio(candidate.ann_return, candidate.ann_volatility, rf);
        candidates.push_back(std::move(candidate));
    }
    return candidates;
}

const EigenCandidate& select_best_eigen(const std::vector<EigenCandidate>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("select_best_eigen: no candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].sharpe > candidates[best].sharpe) best = i;
    return candidates[best];
}

EigenPortfolioResult build_eigen_portfolio(const ReturnMatrix& returns, const ReturnStats& stats,
                                           double variance_target, RiskFreeAssumption rf) {
    EigenPortfolioResult result;
    result.pca = fit_pca(returns, variance_target);
    result.candidates = candidate_portfolios(result.pca, stats, rf, &result.warnings);
    result.selected_component = select_best_eigen(result.candidates).component_index;
    return result;
}

nlohmann::json to_json(const EigenPortfolioResult& result) {
    nlohmann::json ratios = nlohmann::json::array();
    for (Eigen::Index i = 0; i < result.pca.explained_ratio.size(); ++i)
        ratios.push_back(result.pca.explained_ratio(i));
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : result.candidates) {
        nlohmann::json weights = nlohmann::json::array();
        for (Eigen::Index i = 0; i < c.weights.values.size(); ++i)
            weights.push_back(c.weights.values(i));
        candidates.push_back({{"component", c.component_index},
                              {"weights", std::move(weights)},
                              {"return", c.ann_return},
                              {"volatility", c.ann_volatility},
                              {"sharpe", c.sharpe}});
    }
    return {{"explained_ratio", std::move(ratios)},
            {"k", result.pca.k},
            {"candidates", std::move(candidates)},
            {"selected_component", result.selected_component}};
}

EigenPortfolioResult eigen_portfolio_from_json(const nlohmann::json& doc) {
    EigenPortfolioResult result;
    const auto& ratios = doc.at("explained_ratio");
    result.pca.explained_ratio.resize(static_cast<Eigen::Index>(ratios.size()));
    for (std::size_t i = 0; i < ratios.size(); ++i)
        result.pca.explained_ratio(static_cast<Eigen::Index>(i)) = ratios[i].get<double>();
    result.pca.k = doc.at("k").get<int>();
    result.selected_component = doc.at("selected_component").get<int>();
    for (const auto& c : doc.at("candidates")) {
        EigenCandidate candidate;
        candidate.component_index = c.at("component").get<int>();
        const auto& w = c.at("weights");
        candidate.weights.values.resize(static_cast<Eigen::Index>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i)
            candidate.weights.values(static_cast<Eigen::Index>(i)) = w[i].get<double>();
        candidate.ann_return = c.at("return").get<double>();
        candidate.ann_volatility = c.at("volatility").get<double>();
        candidate.sharpe = c.at("sharpe").get<double>();
        result.candidates.push_back(std::move(candidate));
    }
    return result;
}

}  // namespace portlab

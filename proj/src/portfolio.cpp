#include "portlab/portfolio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace portlab {

ReturnStats ReturnStats::from_daily_returns(const ReturnMatrix& returns, double trading_days) {
    const Eigen::Index rows = returns.returns.rows();
    if (rows < 2)
        throw std::invalid_argument("ReturnStats: need at least 2 return rows, have " +
                                    std::to_string(rows));
    ReturnStats stats;
    stats.mean_annual = returns.returns.colwise().mean() * trading_days;
    const Eigen::MatrixXd centered =
        returns.returns.rowwise() - returns.returns.colwise().mean();
    stats.cov_annual =
        (centered.transpose() * centered) * (trading_days / static_cast<double>(rows - 1));
    // Symmetrize away accumulation-order noise.
    stats.cov_annual = ((stats.cov_annual + stats.cov_annual.transpose()) / 2.0).eval();
    return stats;
}

double portfolio_return(const Weights& weights, const ReturnStats& stats) {
    if (weights.values.size() != stats.mean_annual.size())
        throw std::invalid_argument("portfolio_return: weight count " +
                                    std::to_string(weights.values.size()) +
                                    " does not match universe size " +
                                    std::to_string(stats.mean_annual.size()));
    return weights.values.dot(stats.mean_annual);
}

PortfolioRisk portfolio_variance(const Weights& weights, const ReturnStats& stats) {
    if (weights.values.size() != stats.cov_annual.rows() ||
        stats.cov_annual.rows() != stats.cov_annual.cols())
        throw std::invalid_argument("portfolio_variance: dimension mismatch");
    PortfolioRisk risk;
    risk.variance = weights.values.dot(stats.cov_annual * weights.values);
    risk.volatility = std::sqrt(std::max(risk.variance, 0.0));
    return risk;
}

double sharpe_ratio(double port_return, double port_volatility, RiskFreeAssumption rf) {
    if (!(port_volatility > 0.0))
        throw std::domain_error("sharpe_ratio: volatility must be > 0, got " +
                                std::to_string(port_volatility));
    return (port_return - rf.ret_free) / port_volatility;
}

}  // namespace portlab

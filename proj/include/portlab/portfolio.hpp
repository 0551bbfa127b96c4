#pragma once

#include <Eigen/Dense>

#include "portlab/market_data.hpp"

namespace portlab {

/// Portfolio weight vector. Frontier samples are long-only and sum to 1;
/// eigen candidates may carry negative entries but still sum to 1. Printed
/// fixture weights carry rounding noise, so validation tolerances are the
/// caller's choice.
struct Weights {
    Eigen::VectorXd values;

    double sum() const { return values.sum(); }
    double min() const { return values.minCoeff(); }
};

/// Annualized mean returns and covariance of a stock universe.
struct ReturnStats {
    Eigen::VectorXd mean_annual;  // n
    Eigen::MatrixXd cov_annual;   // n x n, symmetric

    Eigen::Index size() const { return mean_annual.size(); }

    /// Annualize daily-return statistics: mean * trading_days and sample
    /// covariance * trading_days. The covariance diagonal is then consistent
    /// with annualized_volatility squared.
    static ReturnStats from_daily_returns(const ReturnMatrix& returns,
                                          double trading_days = kTradingDaysPerYear);
};

/// Annual return of the risk-free benchmark entering the Sharpe ratio.
struct RiskFreeAssumption {
    double ret_free = 0.01;
};

struct PortfolioRisk {
    double variance = 0.0;
    double volatility = 0.0;
};

/// Weighted sum of the per-stock annual mean returns.
double portfolio_return(const Weights& weights, const ReturnStats& stats);

/// Quadratic form w' Sigma w; volatility is sqrt(max(variance, 0)).
PortfolioRisk portfolio_variance(const Weights& weights, const ReturnStats& stats);

/// (portfolio return - risk-free return) / portfolio volatility.
/// Throws std::domain_error when volatility <= 0.
double sharpe_ratio(double port_return, double port_volatility, RiskFreeAssumption rf);

}  // namespace portlab

#include <cmath>

#include "doctest.h"
#include "portlab/eigen_portfolio.hpp"
#include "portlab/errors.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace portlab;

namespace {

ReturnMatrix matrix_from(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> tickers) {
    ReturnMatrix m;
    m.tickers = std::move(tickers);
    m.returns.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        m.dates.push_back(Date::from_days(18000 + static_cast<int>(r)));
        for (std::size_t c = 0; c < rows.front().size(); ++c)
            m.returns(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
}

// Exactly uncorrelated pair: one column alternates with period 2, the other
// with period 4, so their centered dot product is zero.
ReturnMatrix orthogonal_pair(std::size_t periods) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < periods; ++i) {
        rows.push_back({+0.01, +0.01});
        rows.push_back({-0.01, +0.01});
        rows.push_back({+0.01, -0.01});
        rows.push_back({-0.01, -0.01});
    }
    return matrix_from(rows, {"A", "B"});
}

ReturnStats simple_stats() {
    ReturnStats stats;
    stats.mean_annual.resize(2);
    stats.mean_annual << 0.10, 0.20;
    stats.cov_annual.resize(2, 2);
    stats.cov_annual << 0.04, 0.0, 0.0, 0.04;
    return stats;
}

}  // namespace

TEST_CASE("independent columns split the variance evenly") {
    const PCAResult pca = fit_pca(orthogonal_pair(10), 0.80);
    CHECK(pca.explained_ratio(0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pca.explained_ratio(1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pca.k == 2);
}

TEST_CASE("perfectly correlated columns collapse to one component") {
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 24; ++t) {
        const double r = 0.01 * std::sin(0.7 * t) + 0.002 * t / 24.0;
        rows.push_back({r, 2.0 * r});
    }
    const PCAResult pca = fit_pca(matrix_from(rows, {"A", "B"}), 0.80);
    CHECK(pca.explained_ratio(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pca.k == 1);
}

TEST_CASE("fit_pca matches the Jacobi oracle on random returns") {
    const ReturnMatrix returns = synthetic::random_returns(40, 3, 501);
    const PCAResult pca = fit_pca(returns, 1.0);

    std::vector<std::vector<double>> rows(40, std::vector<double>(3));
    for (int r = 0; r < 40; ++r)
        for (int c = 0; c < 3; ++c) rows[r][c] = returns.returns(r, c);
    const auto corr = oracles::correlation_matrix(rows);
    const auto oracle = oracles::jacobi_eigen(corr);

    const double total = oracle.eigenvalues[0] + oracle.eigenvalues[1] + oracle.eigenvalues[2];
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(pca.explained_ratio(j) - oracle.eigenvalues[static_cast<std::size_t>(j)] /
                                                    total) < 1e-8);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(pca.loadings(j, i) -
                           oracle.eigenvectors[static_cast<std::size_t>(j)]
                                              [static_cast<std::size_t>(i)]) < 1e-8);
    }
}

TEST_CASE("fit_pca error paths") {
    SUBCASE("zero-variance column names the ticker") {
        std::vector<std::vector<double>> rows(10, {0.01, 0.0});
        rows[3][0] = -0.02;
        rows[7][0] = 0.013;
        try {
            fit_pca(matrix_from(rows, {"LIVE", "FLAT"}), 0.8);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("FLAT") != std::string::npos);
        }
    }
    SUBCASE("too few rows") {
        const ReturnMatrix returns = synthetic::random_returns(3, 3, 502);
        CHECK_THROWS_AS(fit_pca(returns, 0.8), DataError);
    }
    SUBCASE("variance target out of range") {
        const ReturnMatrix returns = synthetic::random_returns(20, 3, 503);
        CHECK_THROWS_AS(fit_pca(returns, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(fit_pca(returns, 1.5), std::invalid_argument);
    }
}

TEST_CASE("full-component projection reconstructs standardized returns") {
    const ReturnMatrix returns = synthetic::random_returns(60, 5, 504);
    const PCAResult pca = fit_pca(returns, 1.0);
    REQUIRE(pca.k == 5);

    Eigen::MatrixXd z = returns.returns.rowwise() - returns.returns.colwise().mean();
    for (Eigen::Index j = 0; j < 5; ++j)
        z.col(j) /= std::sqrt(z.col(j).squaredNorm() / 59.0);

    const Eigen::MatrixXd scores = z * pca.loadings.transpose();
    const Eigen::MatrixXd rebuilt = scores * pca.loadings;
    CHECK((rebuilt - z).norm() / z.norm() < 1e-8);
}

TEST_CASE("loadings are orthonormal and ratios non-increasing") {
    const ReturnMatrix returns = synthetic::random_returns(80, 6, 505);
    const PCAResult pca = fit_pca(returns, 1.0);
    for (int a = 0; a < pca.k; ++a) {
        CHECK(std::abs(pca.loadings.row(a).norm() - 1.0) < 1e-10);
        for (int b = a + 1; b < pca.k; ++b)
            CHECK(std::abs(pca.loadings.row(a).dot(pca.loadings.row(b))) < 1e-8);
    }
    for (Eigen::Index j = 0; j + 1 < pca.explained_ratio.size(); ++j)
        CHECK(pca.explained_ratio(j) >= pca.explained_ratio(j + 1));
    CHECK(pca.explained_ratio.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("raising the variance target never shrinks k") {
    const ReturnMatrix returns = synthetic::random_returns(60, 5, 506);
    int previous = 0;
    for (double target : {0.3, 0.6, 0.9, 1.0}) {
        const int k = fit_pca(returns, target).k;
        CHECK(k >= previous);
        previous = k;
    }
}

TEST_CASE("fit_pca is deterministic") {
    const ReturnMatrix returns = synthetic::random_returns(50, 4, 507);
    const PCAResult a = fit_pca(returns, 0.9);
    const PCAResult b = fit_pca(returns, 0.9);
    CHECK(a.k == b.k);
    CHECK((a.loadings - b.loadings).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.explained_ratio - b.explained_ratio).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("candidates normalize loadings by their entry sum") {
    PCAResult pca;
    pca.k = 2;
    pca.loadings.resize(2, 2);
    pca.loadings << 0.8, 0.6, 0.9, -0.1;
    pca.explained_ratio.resize(2);
    pca.explained_ratio << 0.7, 0.3;

    const auto candidates = candidate_portfolios(pca, simple_stats(), RiskFreeAssumption{});
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].weights.values(0) == doctest::Approx(0.8 / 1.4).epsilon(1e-12));
    CHECK(candidates[0].weights.values(1) == doctest::Approx(0.6 / 1.4).epsilon(1e-12));
    CHECK(candidates[1].weights.values(0) == doctest::Approx(1.125).epsilon(1e-12));
    CHECK(candidates[1].weights.values(1) == doctest::Approx(-0.125).epsilon(1e-12));
    for (const auto& candidate : candidates)
        CHECK(std::abs(candidate.weights.sum() - 1.0) <= 1e-9);
}

TEST_CASE("a zero-sum loading row is skipped with a warning") {
    PCAResult pca;
    pca.k = 2;
    pca.loadings.resize(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    pca.loadings << r, -r, r, r;
    pca.explained_ratio.resize(2);
    pca.explained_ratio << 0.6, 0.4;

    std::vector<std::string> warnings;
    const auto candidates =
        candidate_portfolios(pca, simple_stats(), RiskFreeAssumption{}, &warnings);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].component_index == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("component 0") != std::string::npos);
}

TEST_CASE("candidate statistics recompute from their weights") {
    const ReturnMatrix returns = synthetic::random_returns(90, 5, 508);
    const ReturnStats stats = ReturnStats::from_daily_returns(returns);
    const RiskFreeAssumption rf{0.01};
    const auto result = build_eigen_portfolio(returns, stats, 0.95, rf);
    for (const auto& candidate : result.candidates) {
        CHECK(std::abs(portfolio_return(candidate.weights, stats) - candidate.ann_return) <
              1e-10);
        CHECK(std::abs(portfolio_variance(candidate.weights, stats).volatility -
                       candidate.ann_volatility) < 1e-10);
        CHECK(std::abs(candidate.weights.sum() - 1.0) <= 1e-9);
    }
}

TEST_CASE("select_best_eigen picks the top sharpe") {
    std::vector<EigenCandidate> candidates(3);
    candidates[0].component_index = 0;
    candidates[0].sharpe = 0.4;
    candidates[1].component_index = 1;
    candidates[1].sharpe = 0.7;
    candidates[2].component_index = 2;
    candidates[2].sharpe = 0.1;
    CHECK(select_best_eigen(candidates).component_index == 1);

    CHECK(select_best_eigen({candidates[2]}).component_index == 2);
    CHECK_THROWS_AS(select_best_eigen({}), std::invalid_argument);
}

TEST_CASE("eigen result round-trips through JSON") {
    const ReturnMatrix returns = synthetic::random_returns(70, 4, 509);
    const ReturnStats stats = ReturnStats::from_daily_returns(returns);
    const auto result = build_eigen_portfolio(returns, stats, 0.9, RiskFreeAssumption{});

    const nlohmann::json doc = to_json(result);
    CHECK(doc.contains("explained_ratio"));
    CHECK(doc.contains("k"));
    CHECK(doc.contains("candidates"));
    CHECK(doc.contains("selected_component"));

    const auto back = eigen_portfolio_from_json(doc);
    CHECK(back.pca.k == result.pca.k);
    CHECK(back.selected_component == result.selected_component);
    REQUIRE(back.candidates.size() == result.candidates.size());
    for (std::size_t i = 0; i < back.candidates.size(); ++i)
        CHECK((back.candidates[i].weights.values - result.candidates[i].weights.values)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

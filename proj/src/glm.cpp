#include "aolink/glm.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace aolink {

namespace {

constexpr double kSeparationThreshold = 30.0;
constexpr int kMaxHalvings = 20;

Eigen::MatrixXd build_design(const Dataset& data) {
    const Eigen::Index n = data.n_rows();
    const bool has_exposure = !data.exposure.empty();
    const Eigen::Index p = data.covariates.cols();
    Eigen::MatrixXd x(n, 1 + (has_exposure ? 1 : 0) + p);
    x.col(0).setOnes();
    Eigen::Index col = 1;
    if (has_exposure) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, col) = static_cast<double>(data.exposure[i]);
        }
        ++col;
    }
    if (p > 0) {
        x.middleCols(col, p) = data.covariates;
    }
    return x;
}

std::vector<std::string> term_names(const Dataset& data) {
    std::vector<std::string> names{"(intercept)"};
    if (!data.exposure.empty()) {
        names.push_back("exposure");
    }
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
        if (j < static_cast<Eigen::Index>(data.covariate_names.size())) {
            names.push_back(data.covariate_names[j]);
        } else {
            names.push_back("x" + std::to_string(j + 1));
        }
    }
    return names;
}

struct IrlsState {
    Eigen::VectorXd eta;
    Eigen::VectorXd mu;
    Eigen::VectorXd dmu;
    double dev = 0.0;
};

IrlsState evaluate(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta,
                   const std::vector<int>& y, TransformParam lambda) {
    IrlsState s;
    s.eta = x * beta;
    const Eigen::Index n = s.eta.size();
    s.mu.resize(n);
    s.dmu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.mu[i] = inverse_link(s.eta[i], lambda).value();
        s.dmu[i] = dmu_deta(s.eta[i], lambda);
    }
    s.dev = deviance(y, s.mu);
    return s;
}

}  // namespace

void Dataset::validate() const {
    const std::size_t n = outcome.size();
    if (n == 0) {
        throw std::invalid_argument("dataset is empty");
    }
    if (!exposure.empty() && exposure.size() != n) {
        throw std::invalid_argument("exposure length differs from outcome length");
    }
    if (covariates.size() > 0 && static_cast<std::size_t>(covariates.rows()) != n) {
        throw std::invalid_argument("covariate row count differs from outcome length");
    }
    for (int v : outcome) {
        if (v != 0 && v != 1) {
            throw std::invalid_argument("outcome must be coded 0/1");
        }
    }
    for (int v : exposure) {
        if (v != 0 && v != 1) {
            throw std::invalid_argument("exposure must be coded 0/1");
        }
    }
}

double deviance(const std::vector<int>& y, const Eigen::VectorXd& mu) {
    if (static_cast<Eigen::Index>(y.size()) != mu.size()) {
        throw std::invalid_argument("deviance: length mismatch");
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        ll += y[i] == 1 ? std::log(mu[i]) : std::log1p(-mu[i]);
    }
    return -2.0 * ll;
}

GlmFit fit(const Dataset& data, TransformParam lambda, FitOptions options) {
    data.validate();
    const Eigen::MatrixXd x = build_design(data);
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(x);
    if (rank_check.rank() < k) {
        throw RankDeficientError("design matrix is rank deficient");
    }

    GlmFit result{lambda, Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k),
                  term_names(data)};

    double ybar = 0.0;
    for (int v : data.outcome) ybar += v;
    ybar = std::clamp(ybar / static_cast<double>(n), 0.01, 0.99);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    beta[0] = link(Probability(ybar), lambda);

    IrlsState state = evaluate(x, beta, data.outcome, lambda);
    bool converged = false;
    bool halving_failed = false;
    int iter = 0;

    Eigen::VectorXd wsqrt(n), z(n);
    while (iter < options.max_iter) {
        ++iter;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double var = state.mu[i] * (1.0 - state.mu[i]);
            wsqrt[i] = state.dmu[i] / std::sqrt(var);
            z[i] = state.eta[i] + (data.outcome[i] - state.mu[i]) / state.dmu[i];
        }
        const Eigen::MatrixXd a = wsqrt.asDiagonal() * x;
        const Eigen::VectorXd b = wsqrt.cwiseProduct(z);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() < k) {
            throw RankDeficientError("weighted design matrix is rank deficient");
        }
        const Eigen::VectorXd proposal = qr.solve(b);

        // Step halving: back off toward the current iterate until the
        // deviance stops increasing.
        Eigen::VectorXd beta_new = proposal;
        IrlsState next = evaluate(x, beta_new, data.outcome, lambda);
        int halvings = 0;
        while (next.dev > state.dev && halvings < kMaxHalvings) {
            ++halvings;
            beta_new = 0.5 * (beta_new + beta);
            next = evaluate(x, beta_new, data.outcome, lambda);
        }
        if (next.dev > state.dev) {
            // a residual increase below tolerance is convergence noise,
            // not a failed step
            if ((next.dev - state.dev) / (std::abs(next.dev) + 0.1) < options.tol) {
                converged = true;
            } else {
                halving_failed = true;
            }
            break;
        }

        const double rel = std::abs(next.dev - state.dev) / (std::abs(next.dev) + 0.1);
        beta = beta_new;
        state = next;
        if (rel < options.tol) {
            converged = true;
            break;
        }
    }

    // The deviance criterion can fire while the score is still of order
    // sqrt(tol); polish with further Fisher steps until the score vanishes.
    if (converged) {
        for (int extra = 0; extra < 50; ++extra) {
            Eigen::VectorXd u(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                u[i] = (data.outcome[i] - state.mu[i]) * state.dmu[i] /
                       (state.mu[i] * (1.0 - state.mu[i]));
            }
            if ((x.transpose() * u).lpNorm<Eigen::Infinity>() < 1e-9) break;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double var = state.mu[i] * (1.0 - state.mu[i]);
                wsqrt[i] = state.dmu[i] / std::sqrt(var);
                z[i] = state.eta[i] + (data.outcome[i] - state.mu[i]) / state.dmu[i];
            }
            const Eigen::MatrixXd a = wsqrt.asDiagonal() * x;
            const Eigen::VectorXd beta_new =
                a.colPivHouseholderQr().solve(wsqrt.cwiseProduct(z));
            IrlsState next = evaluate(x, beta_new, data.outcome, lambda);
            if (next.dev > state.dev + 1e-10) break;
            beta = beta_new;
            state = next;
            iter = std::min(iter + 1, options.max_iter);
        }
    }

    result.coefficients = beta;
    result.deviance = state.dev;
    result.iterations = iter;
    result.converged = converged && !halving_failed;
    result.fitted_means.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        result.fitted_means[i] = state.mu[i];
    }
    result.separation_warning = (beta.cwiseAbs().maxCoeff() > kSeparationThreshold);

    // Wald standard errors from the inverse Fisher information X'WX.
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = state.dmu[i] * state.dmu[i] / (state.mu[i] * (1.0 - state.mu[i]));
    }
    const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    for (Eigen::Index j = 0; j < k; ++j) {
        result.standard_errors[j] = std::sqrt(std::max(cov(j, j), 0.0));
    }
    return result;
}

std::pair<double, double> wald_interval(const GlmFit& fit, int coef_index,
                                        double level) {
    if (!fit.converged) {
        throw std::runtime_error("wald_interval requires a converged fit");
    }
    if (coef_index < 0 || coef_index >= fit.coefficients.size()) {
        throw std::out_of_range("coefficient index out of range");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::domain_error("confidence level must lie in (0,1)");
    }
    const boost::math::normal dist;
    const double zq = boost::math::quantile(dist, 0.5 + level / 2.0);
    const double b = fit.coefficients[coef_index];
    const double se = fit.standard_errors[coef_index];
    return {std::exp(b - zq * se), std::exp(b + zq * se)};
}

}  // namespace aolink

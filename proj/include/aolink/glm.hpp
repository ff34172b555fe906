#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aolink/link_family.hpp"

namespace aolink {

/// Binary-outcome data with an exposure indicator and optional covariates.
struct Dataset {
    std::vector<int> outcome;   // 0/1
    std::vector<int> exposure;  // 0/1
    Eigen::MatrixXd covariates; // n x p, p may be 0
    std::vector<std::string> covariate_names;

    /// Throws std::invalid_argument on shape or coding violations.
    void validate() const;
    Eigen::Index n_rows() const { return static_cast<Eigen::Index>(outcome.size()); }
};

struct FitOptions {
    int max_iter = 100;
    double tol = 1e-8;
};

struct GlmFit {
    TransformParam lambda;
    Eigen::VectorXd coefficients;    // intercept, exposure, covariates...
    Eigen::VectorXd standard_errors;
    std::vector<std::string> term_names;
    double deviance = 0.0;
    int iterations = 0;
    bool converged = false;
    bool separation_warning = false;  // any |beta_j| > 30 at the final iterate
    Eigen::VectorXd fitted_means;
};

class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Maximum-likelihood fit of the Bernoulli GLM with link eta = log W_lambda
// by Fisher scoring. Throws RankDeficientError when the design matrix
// [1 | exposure | covariates] is column-rank deficient. Non-convergence
// (max_iter exceeded or step halving exhausted) is reported through
// converged = false, not an exception.
GlmFit fit(const Dataset& data, TransformParam lambda, FitOptions options = {});

/// Wald interval for exp(beta_j); requires fit.converged.
std::pair<double, double> wald_interval(const GlmFit& fit, int coef_index,
                                        double level = 0.95);

/// Bernoulli deviance -2 sum[y log mu + (1-y) log(1-mu)].
double deviance(const std::vector<int>& y, const Eigen::VectorXd& mu);

}  // namespace aolink

#pragma once

#include <stdexcept>

namespace aolink {

/// Transformation parameter of the Aranda-Ordaz family, restricted to [0, 1].
class TransformParam {
public:
    explicit TransformParam(double lambda) : lambda_(lambda) {
        if (!(lambda >= 0.0 && lambda <= 1.0)) {
            throw std::domain_error("lambda must lie in [0,1]");
        }
    }

    double value() const noexcept { return lambda_; }
    bool is_zero() const noexcept { return lambda_ == 0.0; }

private:
    double lambda_;
};

/// A probability strictly inside (0, 1).
class Probability {
public:
    explicit Probability(double value) : value_(value) {
        if (!(value > 0.0 && value < 1.0)) {
            throw std::domain_error("probability must lie strictly inside (0,1)");
        }
    }

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Clamp bound applied to fitted means inside IRLS and to inverse_link output.
inline constexpr double kMeanClamp = 1e-12;

// W_lambda(theta): ((1-theta)^-lambda - 1)/lambda for lambda>0, -log(1-theta)
// at lambda=0. Evaluated as expm1(lambda*a)/lambda with a = -log1p(-theta),
// which stays accurate as lambda -> 0.
double w_transform(Probability theta, TransformParam lambda);

/// Inverse of w_transform in theta; requires w > 0.
Probability w_inverse(double w, TransformParam lambda);

/// GLM link eta = log W_lambda(theta).
double link(Probability theta, TransformParam lambda);

/// Inverse link; result clamped to [kMeanClamp, 1 - kMeanClamp].
Probability inverse_link(double eta, TransformParam lambda);

/// d theta / d eta of the inverse link, used as the IRLS weight kernel.
double dmu_deta(double eta, TransformParam lambda);

}  // namespace aolink

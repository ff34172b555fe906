#include "aolink/link_family.hpp"

#include <algorithm>
#include <cmath>

namespace aolink {

double w_transform(Probability theta, TransformParam lambda) {
    const double a = -std::log1p(-theta.value());
    if (lambda.is_zero()) {
        return a;
    }
    return std::expm1(lambda.value() * a) / lambda.value();
}

Probability w_inverse(double w, TransformParam lambda) {
    if (!(w > 0.0)) {
        throw std::domain_error("w must be positive");
    }
    double theta;
    if (lambda.is_zero()) {
        theta = -std::expm1(-w);
    } else {
        theta = -std::expm1(-std::log1p(lambda.value() * w) / lambda.value());
    }
    return Probability(theta);
}

double link(Probability theta, TransformParam lambda) {
    return std::log(w_transform(theta, lambda));
}

Probability inverse_link(double eta, TransformParam lambda) {
    const double w = std::exp(eta);
    double theta;
    if (lambda.is_zero()) {
        theta = -std::expm1(-w);
    } else {
        theta = -std::expm1(-std::log1p(lambda.value() * w) / lambda.value());
    }
    theta = std::clamp(theta, kMeanClamp, 1.0 - kMeanClamp);
    return Probability(theta);
}

double dmu_deta(double eta, TransformParam lambda) {
    if (lambda.is_zero()) {
        return std::exp(eta - std::exp(eta));
    }
    // e^eta (1 + lambda e^eta)^(-1/lambda - 1), in log space to avoid overflow
    const double t = std::exp(eta);
    return std::exp(eta - (1.0 / lambda.value() + 1.0) * std::log1p(lambda.value() * t));
}

}  // namespace aolink

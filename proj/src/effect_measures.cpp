#include "aolink/effect_measures.hpp"

#include <cmath>

namespace aolink {

double risk_ratio(const RiskPair& pair) {
    return pair.p1.value() / pair.p0.value();
}

double odds_ratio(const RiskPair& pair) {
    const double p0 = pair.p0.value();
    const double p1 = pair.p1.value();
    return (p1 / (1.0 - p1)) / (p0 / (1.0 - p0));
}

double complementary_log_ratio(const RiskPair& pair) {
    return std::log1p(-pair.p1.value()) / std::log1p(-pair.p0.value());
}

double wr(const RiskPair& pair, TransformParam lambda) {
    const double a = -std::log1p(-pair.p0.value());
    const double b = -std::log1p(-pair.p1.value());
    if (lambda.is_zero()) {
        return b / a;
    }
    return std::expm1(lambda.value() * b) / std::expm1(lambda.value() * a);
}

double discrepancy_b(const RiskPair& pair, TransformParam lambda) {
    const double rr = risk_ratio(pair);
    const double w = wr(pair, lambda);
    return std::max(rr / w, w / rr);
}

Lemma1Branch lemma1_branch(const RiskPair& pair, TransformParam lambda) {
    if (pair.p0.value() == pair.p1.value()) {
        return Lemma1Branch::Equal;
    }
    const double rr = risk_ratio(pair);
    const double w = wr(pair, lambda);
    if (w > rr) {
        return Lemma1Branch::Over;
    }
    if (w < rr) {
        return Lemma1Branch::Under;
    }
    return Lemma1Branch::Equal;
}

double h_function(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("h_function requires x > 0");
    }
    if (x < 1e-12) {
        return 1.0;
    }
    return x / (-std::expm1(-x));
}

MeasureReport measure_report(const RiskPair& pair,
                             const std::vector<TransformParam>& lambdas) {
    MeasureReport report;
    report.rr = risk_ratio(pair);
    report.or_ = odds_ratio(pair);
    report.clr = complementary_log_ratio(pair);
    for (const auto& lambda : lambdas) {
        report.wr[lambda.value()] = wr(pair, lambda);
        report.b[lambda.value()] = discrepancy_b(pair, lambda);
    }
    return report;
}

}  // namespace aolink

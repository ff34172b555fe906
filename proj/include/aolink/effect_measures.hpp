#pragma once

#include <map>
#include <vector>

#include "aolink/link_family.hpp"

namespace aolink {

/// Outcome probabilities under non-exposure (p0) and exposure (p1).
struct RiskPair {
    Probability p0;
    Probability p1;
};

/// RR = p1 / p0.
double risk_ratio(const RiskPair& pair);

/// OR = (p1/(1-p1)) / (p0/(1-p0)).
double odds_ratio(const RiskPair& pair);

/// CLR = log(1-p1) / log(1-p0).
double complementary_log_ratio(const RiskPair& pair);

// WR(lambda) = W_lambda(p1) / W_lambda(p0), evaluated as
// expm1(lambda*b)/expm1(lambda*a) with a = -log(1-p0), b = -log(1-p1).
// WR(1) = OR and WR(0) = CLR.
double wr(const RiskPair& pair, TransformParam lambda);

/// B(lambda) = max{ RR/WR(lambda), WR(lambda)/RR }; >= 1, equal to 1 iff p0 = p1.
double discrepancy_b(const RiskPair& pair, TransformParam lambda);

/// Direction of the WR(lambda) vs RR discrepancy.
enum class Lemma1Branch { Over, Under, Equal };

// Over when WR(lambda) > RR (p0 < p1), Under when WR(lambda) < RR (p1 < p0),
// Equal when p0 == p1 exactly.
Lemma1Branch lemma1_branch(const RiskPair& pair, TransformParam lambda);

// h(x) = x e^x / (e^x - 1), strictly increasing on x > 0; returns the limit
// value 1 for x below 1e-12. Computed as x / (-expm1(-x)).
double h_function(double x);

// Tolerances for asserting "strictly increasing" B(lambda) in floating point:
// consecutive grid differences must exceed -kStrictSlack, and when
// |p1 - p0| > kDistinctRisk at least one gap must exceed kStrictGap.
inline constexpr double kStrictSlack = 1e-13;
inline constexpr double kStrictGap = 1e-10;
inline constexpr double kDistinctRisk = 1e-6;

/// All effect measures for one risk pair over a set of lambdas.
struct MeasureReport {
    double rr;
    double or_;
    double clr;
    std::map<double, double> wr;
    std::map<double, double> b;
};

MeasureReport measure_report(const RiskPair& pair,
                             const std::vector<TransformParam>& lambdas);

}  // namespace aolink

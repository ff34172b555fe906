#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aolink/effect_measures.hpp"

namespace aolink {

// Approximation-curve specification: p0 runs over the prevalence grid and
// p1 = rr * p0. Grid points with rr * p0 >= 1 are dropped at construction
// and counted in excluded_points.
struct CurveSpec {
    double rr;
    std::vector<double> prevalence_grid;
    std::vector<TransformParam> lambdas;
    int excluded_points = 0;

    CurveSpec(double rr_value, std::vector<double> grid,
              std::vector<TransformParam> lambda_set);

    static std::vector<double> default_grid(double step = 0.01);
};

struct CurveRow {
    double p0;
    double p1;
    double lambda;
    double wr_value;
    double b_value;
};

class EmptyGridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows ordered by (lambda, p0). Throws EmptyGridError if no p0 is admissible.
std::vector<CurveRow> generate_curve(const CurveSpec& spec);

/// Two-arm Bernoulli simulation design.
struct SimSpec {
    int n_per_group;
    double p0;
    double rr;  // rr * p0 must stay below 1
    std::vector<TransformParam> lambdas;
    int replications;
    std::uint64_t seed;
    int threads = 1;

    void validate() const;
};

struct SimRow {
    double lambda;
    double mean_exp_beta1;
    double sd_exp_beta1;
    double true_wr;
    double mean_bias_vs_rr;
    int fit_failures;
    int replications_used;
};

class AllReplicationsFailedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One row per lambda. Replications where either arm has 0 or n events are
// counted as fit failures and excluded from the aggregates. Output is
// bit-identical for a fixed seed regardless of the thread count: every
// replication draws from its own stream keyed by (seed, replication index).
std::vector<SimRow> run_simulation(const SimSpec& spec);

/// Grid-sweep verification record for the lemma / monotonicity / corollary checks.
struct SweepReport {
    double grid_step = 0.0;
    long pairs_checked = 0;
    long lemma1_violations = 0;
    long monotonicity_violations = 0;
    long corollary_violations = 0;

    struct WorstCase {
        double p0;
        double p1;
        double lambda;
        double value;  // B(lambda)
    };
    std::optional<WorstCase> worst_case;

    bool clean() const {
        return lemma1_violations == 0 && monotonicity_violations == 0 &&
               corollary_violations == 0;
    }
};

// Sweeps p0, p1 over {grid_step, 2*grid_step, ...} excluding p0 = p1, and
// lambda over an even grid of lambda_steps + 1 points on [0,1]. Counts
// violations of the overestimation sign law, of strict B(lambda) growth
// (using the kStrictSlack / kStrictGap tolerances), and of B(0) < B(1).
SweepReport verify_sweep(double grid_step, int lambda_steps);

}  // namespace aolink

#include "aolink/study.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "aolink/glm.hpp"

namespace aolink {

namespace {

// splitmix64; one stream per (seed, replication) key so that replication
// draws are independent of scheduling.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t replication) {
    SplitMix64 s{seed ^ (0xD1B54A32D192ED03ULL * (replication + 1))};
    return s.next();
}

struct ReplicationResult {
    bool degenerate = false;
    std::vector<double> exp_beta1;   // per lambda; NaN marks a failed fit
};

ReplicationResult run_replication(const SimSpec& spec, int replication) {
    SplitMix64 rng{mix_key(spec.seed, static_cast<std::uint64_t>(replication))};
    const int n = spec.n_per_group;
    const double p1 = spec.rr * spec.p0;

    Dataset data;
    data.outcome.resize(2 * static_cast<std::size_t>(n));
    data.exposure.resize(2 * static_cast<std::size_t>(n));
    int events0 = 0;
    int events1 = 0;
    for (int i = 0; i < n; ++i) {
        const int y = rng.uniform() < spec.p0 ? 1 : 0;
        data.outcome[i] = y;
        data.exposure[i] = 0;
        events0 += y;
    }
    for (int i = 0; i < n; ++i) {
        const int y = rng.uniform() < p1 ? 1 : 0;
        data.outcome[n + i] = y;
        data.exposure[n + i] = 1;
        events1 += y;
    }

    ReplicationResult result;
    if (events0 == 0 || events0 == n || events1 == 0 || events1 == n) {
        result.degenerate = true;
        return result;
    }
    result.exp_beta1.reserve(spec.lambdas.size());
    for (const auto& lambda : spec.lambdas) {
        const GlmFit f = fit(data, lambda);
        result.exp_beta1.push_back(
            f.converged ? std::exp(f.coefficients[1])
                        : std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

}  // namespace

CurveSpec::CurveSpec(double rr_value, std::vector<double> grid,
                     std::vector<TransformParam> lambda_set)
    : rr(rr_value), lambdas(std::move(lambda_set)) {
    if (!(rr > 0.0)) {
        throw std::domain_error("rr must be positive");
    }
    if (lambdas.empty()) {
        throw std::invalid_argument("at least one lambda is required");
    }
    for (double p0 : grid) {
        if (!(p0 > 0.0 && p0 < 1.0)) {
            throw std::domain_error("prevalence grid values must lie in (0,1)");
        }
        if (rr * p0 < 1.0) {
            prevalence_grid.push_back(p0);
        } else {
            ++excluded_points;
        }
    }
    std::sort(prevalence_grid.begin(), prevalence_grid.end());
}

std::vector<double> CurveSpec::default_grid(double step) {
    std::vector<double> grid;
    for (int i = 1; i * step < 1.0 - 1e-9; ++i) {
        grid.push_back(i * step);
    }
    return grid;
}

std::vector<CurveRow> generate_curve(const CurveSpec& spec) {
    if (spec.prevalence_grid.empty()) {
        throw EmptyGridError("no admissible prevalence satisfies rr * p0 < 1");
    }
    std::vector<CurveRow> rows;
    rows.reserve(spec.lambdas.size() * spec.prevalence_grid.size());
    for (const auto& lambda : spec.lambdas) {
        for (double p0 : spec.prevalence_grid) {
            const RiskPair pair{Probability(p0), Probability(spec.rr * p0)};
            rows.push_back({p0, spec.rr * p0, lambda.value(), wr(pair, lambda),
                            discrepancy_b(pair, lambda)});
        }
    }
    return rows;
}

void SimSpec::validate() const {
    if (n_per_group < 10) {
        throw std::domain_error("n_per_group must be at least 10");
    }
    if (replications < 1) {
        throw std::domain_error("replications must be at least 1");
    }
    if (!(p0 > 0.0 && p0 < 1.0)) {
        throw std::domain_error("p0 must lie strictly inside (0,1)");
    }
    if (!(rr > 0.0) || !(rr * p0 < 1.0)) {
        throw std::domain_error("rr must be positive with rr * p0 < 1");
    }
    if (lambdas.empty()) {
        throw std::invalid_argument("at least one lambda is required");
    }
    if (threads < 1) {
        throw std::domain_error("threads must be at least 1");
    }
}

std::vector<SimRow> run_simulation(const SimSpec& spec) {
    spec.validate();
    std::vector<ReplicationResult> results(spec.replications);

    const int n_threads = std::min(spec.threads, spec.replications);
    if (n_threads <= 1) {
        for (int r = 0; r < spec.replications; ++r) {
            results[r] = run_replication(spec, r);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (int r = t; r < spec.replications; r += n_threads) {
                    results[r] = run_replication(spec, r);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Aggregate in replication-index order.
    std::vector<SimRow> table;
    table.reserve(spec.lambdas.size());
    const RiskPair pair{Probability(spec.p0), Probability(spec.rr * spec.p0)};
    for (std::size_t j = 0; j < spec.lambdas.size(); ++j) {
        SimRow row{spec.lambdas[j].value(), 0.0, 0.0,
                   wr(pair, spec.lambdas[j]), 0.0, 0, 0};
        double sum = 0.0;
        std::vector<double> values;
        values.reserve(results.size());
        for (const auto& res : results) {
            if (res.degenerate || std::isnan(res.exp_beta1[j])) {
                ++row.fit_failures;
                continue;
            }
            values.push_back(res.exp_beta1[j]);
            sum += res.exp_beta1[j];
        }
        if (values.empty()) {
            throw AllReplicationsFailedError("all replications failed");
        }
        row.replications_used = static_cast<int>(values.size());
        row.mean_exp_beta1 = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) {
            const double d = v - row.mean_exp_beta1;
            ss += d * d;
        }
        row.sd_exp_beta1 =
            values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                              : 0.0;
        row.mean_bias_vs_rr = row.mean_exp_beta1 - spec.rr;
        table.push_back(row);
    }
    return table;
}

SweepReport verify_sweep(double grid_step, int lambda_steps) {
    if (!(grid_step > 0.0 && grid_step <= 0.1)) {
        throw std::domain_error("grid_step must lie in (0, 0.1]");
    }
    if (lambda_steps < 2) {
        throw std::domain_error("lambda_steps must be at least 2");
    }

    std::vector<double> probs;
    for (int i = 1; i * grid_step < 1.0 - 1e-9; ++i) {
        probs.push_back(i * grid_step);
    }
    std::vector<double> lambda_grid(lambda_steps + 1);
    for (int i = 0; i <= lambda_steps; ++i) {
        lambda_grid[i] = static_cast<double>(i) / lambda_steps;
    }

    SweepReport report;
    report.grid_step = grid_step;
    std::vector<double> b_values(lambda_grid.size());

    for (std::size_t i = 0; i < probs.size(); ++i) {
        for (std::size_t j = 0; j < probs.size(); ++j) {
            if (i == j) continue;
            const double p0 = probs[i];
            const double p1 = probs[j];
            ++report.pairs_checked;

            const RiskPair pair{Probability(p0), Probability(p1)};
            const double rr = risk_ratio(pair);
            bool lemma_ok = true;
            for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
                const TransformParam lambda(lambda_grid[li]);
                const double w = wr(pair, lambda);
                b_values[li] = std::max(rr / w, w / rr);
                if ((p0 < p1 && !(w > rr)) || (p1 < p0 && !(w < rr))) {
                    lemma_ok = false;
                }
            }
            if (!lemma_ok) {
                ++report.lemma1_violations;
            }

            bool mono_ok = true;
            double max_gap = 0.0;
            for (std::size_t li = 0; li + 1 < b_values.size(); ++li) {
                const double gap = b_values[li + 1] - b_values[li];
                if (gap <= -kStrictSlack) {
                    mono_ok = false;
                }
                max_gap = std::max(max_gap, gap);
            }
            if (std::abs(p1 - p0) > kDistinctRisk && max_gap <= kStrictGap) {
                mono_ok = false;
            }
            if (!mono_ok) {
                ++report.monotonicity_violations;
            }

            if (!(b_values.front() < b_values.back())) {
                ++report.corollary_violations;
            }

            const double b_at_one = b_values.back();
            if (!report.worst_case || b_at_one > report.worst_case->value) {
                report.worst_case = SweepReport::WorstCase{p0, p1, 1.0, b_at_one};
            }
        }
    }
    return report;
}

}  // namespace aolink

// aolink: Aranda-Ordaz link-family toolkit.
// Subcommands: measures, curve, fit, simulate, verify.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aolink/csv.hpp"
#include "aolink/effect_measures.hpp"
#include "aolink/glm.hpp"
#include "aolink/study.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRankDeficient = 3;
constexpr int kExitNotConverged = 4;
constexpr int kExitVerifyFailed = 5;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes to --output or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw UsageError("cannot open output file '" + path + "'");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

double parse_lambda_token(const std::string& token) {
    if (token == "cloglog") return 0.0;
    if (token == "logit") return 1.0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw UsageError("invalid lambda '" + token + "'");
    }
    return v;
}

std::vector<aolink::TransformParam> parse_lambdas(const std::string& list) {
    std::vector<aolink::TransformParam> lambdas;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const double v = parse_lambda_token(token);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw UsageError("lambda must lie in [0,1], got '" + token + "'");
        }
        lambdas.emplace_back(v);
    }
    if (lambdas.empty()) {
        throw UsageError("--lambdas must name at least one value");
    }
    return lambdas;
}

aolink::Probability require_probability(double v, const std::string& flag) {
    if (!(v > 0.0 && v < 1.0)) {
        throw UsageError(flag + " must lie strictly inside (0,1)");
    }
    return aolink::Probability(v);
}

void emit(Output& out, const std::string& format, const json& flat,
          const std::vector<std::string>& csv_lines) {
    if (format == "json") {
        out.stream() << flat.dump() << "\n";
    } else {
        for (const auto& line : csv_lines) {
            out.stream() << line << "\n";
        }
    }
}

// ---- measures ----

int cmd_measures(double p0, double p1, const std::string& lambda_list,
                 const std::string& format, const std::string& output) {
    const aolink::RiskPair pair{require_probability(p0, "p0"),
                                require_probability(p1, "p1")};
    const auto lambdas = parse_lambdas(lambda_list);
    const auto report = aolink::measure_report(pair, lambdas);

    Output out(output);
    json flat{{"p0", p0}, {"p1", p1},         {"rr", report.rr},
              {"or", report.or_}, {"clr", report.clr}};
    std::vector<std::string> lines{"measure,lambda,value"};
    lines.push_back("rr,," + fmt17(report.rr));
    lines.push_back("or,," + fmt17(report.or_));
    lines.push_back("clr,," + fmt17(report.clr));
    json jl = json::array(), jw = json::array(), jb = json::array();
    for (const auto& [lambda, value] : report.wr) {
        lines.push_back("wr," + fmt17(lambda) + "," + fmt17(value));
        lines.push_back("b," + fmt17(lambda) + "," + fmt17(report.b.at(lambda)));
        jl.push_back(lambda);
        jw.push_back(value);
        jb.push_back(report.b.at(lambda));
    }
    flat["lambdas"] = jl;
    flat["wr"] = jw;
    flat["b"] = jb;
    emit(out, format, flat, lines);
    return kExitOk;
}

// ---- curve ----

int cmd_curve(double rr, const std::string& lambda_list, double step,
              const std::string& format, const std::string& output) {
    if (!(rr > 0.0)) {
        throw UsageError("rr must be positive");
    }
    if (!(step > 0.0 && step < 1.0)) {
        throw UsageError("step must lie strictly inside (0,1)");
    }
    const aolink::CurveSpec spec(rr, aolink::CurveSpec::default_grid(step),
                                 parse_lambdas(lambda_list));
    const auto rows = aolink::generate_curve(spec);
    if (spec.excluded_points > 0) {
        std::cerr << "note: excluded " << spec.excluded_points
                  << " grid points with rr*p0 >= 1\n";
    }

    Output out(output);
    std::vector<std::string> lines{"p0,p1,lambda,wr,b"};
    json jp0 = json::array(), jp1 = json::array(), jl = json::array(),
         jw = json::array(), jb = json::array();
    for (const auto& r : rows) {
        lines.push_back(fmt17(r.p0) + "," + fmt17(r.p1) + "," + fmt17(r.lambda) +
                        "," + fmt17(r.wr_value) + "," + fmt17(r.b_value));
        jp0.push_back(r.p0);
        jp1.push_back(r.p1);
        jl.push_back(r.lambda);
        jw.push_back(r.wr_value);
        jb.push_back(r.b_value);
    }
    json flat{{"rr", rr},     {"p0", jp0}, {"p1", jp1},
              {"lambda", jl}, {"wr", jw},  {"b", jb}};
    emit(out, format, flat, lines);
    return kExitOk;
}

// ---- fit ----

int cmd_fit(const std::string& input, const std::string& outcome_col,
            const std::string& exposure_col,
            const std::vector<std::string>& covariate_cols,
            const std::string& lambda_token, double tol, int max_iter,
            double level, const std::string& format, const std::string& output) {
    const double lv = parse_lambda_token(lambda_token);
    if (!(lv >= 0.0 && lv <= 1.0)) {
        throw UsageError("lambda must lie in [0,1]");
    }
    const aolink::TransformParam lambda(lv);

    aolink::Dataset data;
    try {
        std::ifstream in(input);
        if (!in) {
            throw UsageError("cannot open input file '" + input + "'");
        }
        const auto table = aolink::read_csv(in);
        data = aolink::dataset_from_csv(table, outcome_col, exposure_col,
                                        covariate_cols);
    } catch (const aolink::CsvError& e) {
        throw UsageError(e.what());
    }

    aolink::GlmFit fit = [&] {
        try {
            return aolink::fit(data, lambda, {max_iter, tol});
        } catch (const aolink::RankDeficientError& e) {
            std::cerr << "error: " << e.what() << "\n";
            std::exit(kExitRankDeficient);
        }
    }();
    if (fit.separation_warning) {
        std::cerr << "warning: possible separation, coefficient magnitude exceeds 30\n";
    }

    Output out(output);
    std::vector<std::string> lines{
        "term,coefficient,std_error,exp_coefficient,ci_lower,ci_upper,lambda,"
        "deviance,iterations,converged"};
    json jt = json::array(), jc = json::array(), js = json::array(),
         je = json::array(), jlo = json::array(), jhi = json::array();
    const std::string meta = fmt17(lambda.value()) + "," + fmt17(fit.deviance) +
                             "," + std::to_string(fit.iterations) + "," +
                             (fit.converged ? "true" : "false");
    for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
        const double b = fit.coefficients[j];
        const double se = fit.standard_errors[j];
        std::string lo, hi;
        if (fit.converged) {
            const auto ci = aolink::wald_interval(fit, static_cast<int>(j), level);
            lo = fmt17(ci.first);
            hi = fmt17(ci.second);
            jlo.push_back(ci.first);
            jhi.push_back(ci.second);
        }
        lines.push_back(fit.term_names[j] + "," + fmt17(b) + "," + fmt17(se) +
                        "," + fmt17(std::exp(b)) + "," + lo + "," + hi + "," +
                        meta);
        jt.push_back(fit.term_names[j]);
        jc.push_back(b);
        js.push_back(se);
        je.push_back(std::exp(b));
    }
    json flat{{"lambda", lambda.value()},
              {"terms", jt},
              {"coefficients", jc},
              {"std_errors", js},
              {"exp_coefficients", je},
              {"ci_lower", jlo},
              {"ci_upper", jhi},
              {"deviance", fit.deviance},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"separation_warning", fit.separation_warning}};
    emit(out, format, flat, lines);
    if (!fit.converged) {
        std::cerr << "error: fit did not converge within " << max_iter
                  << " iterations\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

// ---- simulate ----

int cmd_simulate(int n, double p0, double rr, const std::string& lambda_list,
                 int reps, std::uint64_t seed, int threads,
                 const std::string& format, const std::string& output) {
    aolink::SimSpec spec{n, p0, rr, parse_lambdas(lambda_list), reps, seed, threads};
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const auto rows = aolink::run_simulation(spec);

    Output out(output);
    std::vector<std::string> lines{
        "lambda,mean_exp_beta1,sd_exp_beta1,true_wr,mean_bias_vs_rr,"
        "fit_failures,replications_used"};
    json jl = json::array(), jm = json::array(), js = json::array(),
         jw = json::array(), jbias = json::array(), jf = json::array(),
         ju = json::array();
    for (const auto& r : rows) {
        lines.push_back(fmt17(r.lambda) + "," + fmt17(r.mean_exp_beta1) + "," +
                        fmt17(r.sd_exp_beta1) + "," + fmt17(r.true_wr) + "," +
                        fmt17(r.mean_bias_vs_rr) + "," +
                        std::to_string(r.fit_failures) + "," +
                        std::to_string(r.replications_used));
        jl.push_back(r.lambda);
        jm.push_back(r.mean_exp_beta1);
        js.push_back(r.sd_exp_beta1);
        jw.push_back(r.true_wr);
        jbias.push_back(r.mean_bias_vs_rr);
        jf.push_back(r.fit_failures);
        ju.push_back(r.replications_used);
    }
    json flat{{"n_per_group", n},   {"p0", p0},
              {"rr", rr},           {"seed", seed},
              {"lambda", jl},       {"mean_exp_beta1", jm},
              {"sd_exp_beta1", js}, {"true_wr", jw},
              {"mean_bias_vs_rr", jbias}, {"fit_failures", jf},
              {"replications_used", ju}};
    emit(out, format, flat, lines);
    return kExitOk;
}

// ---- verify ----

int cmd_verify(double grid_step, int lambda_steps, const std::string& format,
               const std::string& output) {
    aolink::SweepReport report;
    try {
        report = aolink::verify_sweep(grid_step, lambda_steps);
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }

    Output out(output);
    std::vector<std::string> lines{
        "grid_step,pairs_checked,lemma1_violations,monotonicity_violations,"
        "corollary_violations,worst_p0,worst_p1,worst_lambda,worst_b"};
    std::string row = fmt17(report.grid_step) + "," +
                      std::to_string(report.pairs_checked) + "," +
                      std::to_string(report.lemma1_violations) + "," +
                      std::to_string(report.monotonicity_violations) + "," +
                      std::to_string(report.corollary_violations);
    json flat{{"grid_step", report.grid_step},
              {"pairs_checked", report.pairs_checked},
              {"lemma1_violations", report.lemma1_violations},
              {"monotonicity_violations", report.monotonicity_violations},
              {"corollary_violations", report.corollary_violations}};
    if (report.worst_case) {
        row += "," + fmt17(report.worst_case->p0) + "," +
               fmt17(report.worst_case->p1) + "," +
               fmt17(report.worst_case->lambda) + "," +
               fmt17(report.worst_case->value);
        flat["worst_p0"] = report.worst_case->p0;
        flat["worst_p1"] = report.worst_case->p1;
        flat["worst_lambda"] = report.worst_case->lambda;
        flat["worst_b"] = report.worst_case->value;
    } else {
        row += ",,,,";
    }
    lines.push_back(row);
    emit(out, format, flat, lines);
    if (!report.clean()) {
        std::cerr << "error: verification sweep found violations\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aranda-Ordaz link family: effect measures, GLM fitting, "
                 "curve generation, simulation, and property verification"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string output;
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output, "Output file (default stdout)");

    // measures
    auto* measures = app.add_subcommand("measures", "RR, OR, CLR, WR and B for one risk pair");
    double m_p0 = 0, m_p1 = 0;
    std::string m_lambdas = "0,0.5,1";
    measures->add_option("--p0", m_p0, "Risk if unexposed")->required();
    measures->add_option("--p1", m_p1, "Risk if exposed")->required();
    measures->add_option("--lambdas", m_lambdas, "Comma-separated lambdas (cloglog/logit aliases)");

    // curve
    auto* curve = app.add_subcommand("curve", "Approximation curves at fixed RR");
    double c_rr = 0, c_step = 0.01;
    std::string c_lambdas = "0,0.5,1";
    curve->add_option("--rr", c_rr, "Fixed true risk ratio")->required();
    curve->add_option("--lambdas", c_lambdas, "Comma-separated lambdas");
    curve->add_option("--step", c_step, "Prevalence grid step");

    // fit
    auto* fitcmd = app.add_subcommand("fit", "Fit a binary GLM with the log-W link from CSV");
    std::string f_input, f_outcome = "outcome", f_exposure = "exposure";
    std::vector<std::string> f_covariates;
    std::string f_lambda = "0";
    double f_tol = 1e-8, f_level = 0.95;
    int f_max_iter = 100;
    fitcmd->add_option("--input", f_input, "Input CSV path")->required();
    fitcmd->add_option("--outcome", f_outcome, "Outcome column name");
    fitcmd->add_option("--exposure", f_exposure, "Exposure column name");
    fitcmd->add_option("--covariates", f_covariates, "Covariate column names")
        ->delimiter(',');
    fitcmd->add_option("--lambda", f_lambda, "Transformation parameter (cloglog/logit aliases)");
    fitcmd->add_option("--tol", f_tol, "Deviance convergence tolerance");
    fitcmd->add_option("--max-iter", f_max_iter, "Maximum IRLS iterations");
    fitcmd->add_option("--level", f_level, "Wald interval confidence level");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Two-arm Monte Carlo bias study");
    int s_n = 0, s_reps = 0, s_threads = 1;
    double s_p0 = 0, s_rr = 0;
    std::uint64_t s_seed = 0;
    std::string s_lambdas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
    sim->add_option("--n", s_n, "Sample size per arm")->required();
    sim->add_option("--p0", s_p0, "Risk in the unexposed arm")->required();
    sim->add_option("--rr", s_rr, "True risk ratio")->required();
    sim->add_option("--lambdas", s_lambdas, "Comma-separated lambdas");
    sim->add_option("--reps", s_reps, "Number of replications")->required();
    sim->add_option("--seed", s_seed, "RNG seed (unsigned 64-bit)")->required();
    sim->add_option("--threads", s_threads, "Worker threads");

    // verify
    auto* verify = app.add_subcommand("verify", "Grid-sweep verification of the ordering properties");
    double v_step = 0.05;
    int v_lambda_steps = 10;
    verify->add_option("--grid-step", v_step, "Probability grid step");
    verify->add_option("--lambda-steps", v_lambda_steps, "Number of lambda grid intervals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*measures) return cmd_measures(m_p0, m_p1, m_lambdas, format, output);
        if (*curve) return cmd_curve(c_rr, c_lambdas, c_step, format, output);
        if (*fitcmd)
            return cmd_fit(f_input, f_outcome, f_exposure, f_covariates, f_lambda,
                           f_tol, f_max_iter, f_level, format, output);
        if (*sim)
            return cmd_simulate(s_n, s_p0, s_rr, s_lambdas, s_reps, s_seed,
                                s_threads, format, output);
        if (*verify) return cmd_verify(v_step, v_lambda_steps, format, output);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

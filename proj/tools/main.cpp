// tailrisk CLI: risk reports, threshold calibration, figure datasets, and
// single-marginal VaR queries.  Exit codes: 0 success, 2 domain error
// (bad flags, unparsable inputs, violated preconditions), 3 infeasible
// (either no admissible threshold for the budget, or a report whose level
// cannot be reached with gamma = alpha).

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailrisk/calibration.hpp"
#include "tailrisk/portfolio.hpp"
#include "tailrisk/risk_measures.hpp"

namespace {

tailrisk::Measure measure_from_name(const std::string& name) {
    if (name == "pearson") return tailrisk::Measure::pearson;
    if (name == "spearman") return tailrisk::Measure::spearman;
    return tailrisk::Measure::kendall;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case tail risk of aggregate losses under a dependence budget"};
    app.require_subcommand(1);

    // -- report -------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "Risk report for a credit portfolio");
    std::string portfolio_path;
    double report_delta = 0.0, report_alpha = 0.0;
    std::int64_t mc_budget = 1'000'000;
    std::uint64_t seed = 0x51D5EEDULL;
    report_cmd->add_option("--portfolio", portfolio_path, "Portfolio file (.csv or .json)")
        ->required();
    report_cmd->add_option("--delta", report_delta, "Pairwise-max Pearson budget in (0,1)")
        ->required();
    report_cmd->add_option("--alpha", report_alpha, "Confidence level in (0,1)")->required();
    report_cmd->add_option("--mc-budget", mc_budget,
                           "Sample budget for non-closed-form aggregates (default 10^6)");
    report_cmd->add_option("--seed", seed, "Monte Carlo seed");

    // -- calibrate ------------------------------------------------------------
    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "Smallest threshold gamma meeting a dependence budget");
    std::string measure_name;
    double cal_delta = 0.0;
    std::string cal_dist_spec;
    calibrate_cmd->add_option("--measure", measure_name, "pearson | spearman | kendall")
        ->required()
        ->check(CLI::IsMember({"pearson", "spearman", "kendall"}));
    calibrate_cmd->add_option("--delta", cal_delta, "Dependence budget")->required();
    calibrate_cmd->add_option("--dist", cal_dist_spec,
                              "Marginal spec (required for pearson), e.g. bernoulli:p=0.01");

    // -- figure ---------------------------------------------------------------
    auto* figure_cmd = app.add_subcommand("figure", "Emit one figure dataset as CSV");
    int which = 0;
    std::string out_path;
    tailrisk::FigureParams fig_params;
    figure_cmd->add_option("--which", which, "1: p vs delta; 2: gamma vs delta; "
                                             "3: n vs ratio; 4: alpha vs both VaR paths")
        ->required()
        ->check(CLI::Range(1, 4));
    figure_cmd->add_option("--out", out_path, "Output CSV path")->required();
    figure_cmd->add_option("--gamma", fig_params.gamma, "Threshold (figures 1, 3, 4)");
    figure_cmd->add_option("--pd", fig_params.pd, "Borrower PD (figures 3, 4)");
    figure_cmd->add_option("--n", fig_params.n, "Portfolio size (figure 4)");
    figure_cmd->add_option("--points", fig_params.points, "Grid resolution override");

    // -- var ------------------------------------------------------------------
    auto* var_cmd = app.add_subcommand("var", "Value at risk of one marginal");
    std::string var_dist_spec;
    double var_alpha = 0.0;
    var_cmd->add_option("--dist", var_dist_spec, "Marginal spec, e.g. exp:rate=2")->required();
    var_cmd->add_option("--alpha", var_alpha, "Confidence level in (0,1)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (report_cmd->parsed()) {
            const tailrisk::PortfolioSpec spec = tailrisk::load_portfolio(portfolio_path);
            const tailrisk::RiskReport report =
                tailrisk::run_report(spec, report_delta, report_alpha, mc_budget, seed);
            std::fputs(tailrisk::report_to_json(report).c_str(), stdout);
            return report.feasibility ? 0 : 3;
        }
        if (calibrate_cmd->parsed()) {
            const tailrisk::Measure measure = measure_from_name(measure_name);
            std::optional<tailrisk::MarginalDist> dist;
            if (!cal_dist_spec.empty()) dist = tailrisk::parse_dist_spec(cal_dist_spec);
            if (measure == tailrisk::Measure::pearson && !dist)
                throw std::invalid_argument("calibrate: --measure pearson requires --dist");
            const tailrisk::CalibrationResult result =
                tailrisk::gamma_from_delta(measure, cal_delta, dist ? &*dist : nullptr);
            nlohmann::json j;
            j["delta_achieved"] = result.delta_achieved;
            j["gamma"] = result.gamma;
            j["iterations"] = result.iterations;
            j["method"] = result.method == tailrisk::CalibrationResult::Method::closed_form
                              ? "closed_form"
                              : "bisection";
            std::fprintf(stdout, "%s\n", j.dump(2).c_str());
            return 0;
        }
        if (figure_cmd->parsed()) {
            const tailrisk::Figure figure = which == 1   ? tailrisk::Figure::fig1
                                            : which == 2 ? tailrisk::Figure::fig2
                                            : which == 3 ? tailrisk::Figure::fig3
                                                         : tailrisk::Figure::fig4;
            tailrisk::emit_figure_data(figure, fig_params, out_path);
            return 0;
        }
        // var
        const tailrisk::MarginalDist dist = tailrisk::parse_dist_spec(var_dist_spec);
        nlohmann::json j;
        j["alpha"] = var_alpha;
        j["var"] = tailrisk::var(dist, var_alpha);
        std::fprintf(stdout, "%s\n", j.dump(2).c_str());
        return 0;
    } catch (const tailrisk::infeasible_error& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

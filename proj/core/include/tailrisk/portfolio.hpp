#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailrisk/marginal.hpp"

namespace tailrisk {

struct Borrower {
    std::string id;
    double exposure;  // >= 0
    double pd;        // in (0, 1)
};

struct PortfolioSpec {
    std::vector<Borrower> borrowers;  // non-empty
};

enum class PortfolioFormat { csv, json };

// Load and validate a portfolio.  CSV requires the exact header
// "id,exposure,pd" (comma separated, '.' decimal); JSON is an array of
// {"id", "exposure", "pd"} objects.  Validation failures name the offending
// data row (1-based, header excluded).
PortfolioSpec load_portfolio(const std::string& path, PortfolioFormat format);
// Same, inferring the format from the file extension (.csv / .json).
PortfolioSpec load_portfolio(const std::string& path);

// One full risk assessment under the pairwise-max Pearson budget delta.
struct RiskReport {
    double gamma_used;
    double alpha;
    double worst_case_var;
    double conditional_var;
    double ratio;  // worst_case_var / conditional_var, with 0/0 := 0
    bool feasibility;
    double es_worst_case;
};

// Builds the threshold coupling for the portfolio's Bernoulli loss marginals
// and evaluates it at level alpha.  When gamma := alpha itself satisfies the
// budget (feasibility true), worst_case_var is the exact comonotone value
// sum_i exposure_i * F_i^{-1}(alpha); otherwise gamma_used is calibrated from
// delta at the smallest pd and the level falls into the pre-tail regime.
// conditional_var is the exact quantile of the independent pre-tail sum, and
// es_worst_case the expected shortfall of the aggregate law.
RiskReport run_report(const PortfolioSpec& portfolio, double delta, double alpha,
                      std::int64_t mc_budget = 1'000'000,
                      std::uint64_t seed = 0x51D5EEDULL);

// Deterministic JSON rendering (alphabetically ordered keys, shortest
// round-trip doubles, two-space indent, trailing newline) — the report format
// written to stdout by the CLI and frozen for downstream consumers.
std::string report_to_json(const RiskReport& report);

enum class Figure { fig1, fig2, fig3, fig4 };

// Parameters shared by the figure datasets; each figure reads the subset it
// needs and `points` overrides the default grid resolution (0 keeps it).
struct FigureParams {
    double gamma = 0.999;   // threshold (fig1, fig3, fig4)
    double pd = 0.01;       // borrower PD (fig3, fig4)
    long long n = 1000;     // portfolio size (fig4)
    int points = 0;
};

// Writes one dataset as CSV with a header row and %.12g values:
//   fig1: "p,delta"      — Pearson dependence vs Bernoulli p at fixed gamma
//   fig2: "gamma,delta"  — Pearson dependence vs gamma for exponential losses
//   fig3: "n,ratio"      — worst-case/conditional VaR ratio vs portfolio size
//   fig4: "alpha,worst_case_var,conditional_var" — both VaR paths vs level
void emit_figure_data(Figure which, const FigureParams& params,
                      const std::string& out_path);

// Distribution mini-grammar used by the CLI: "bernoulli:p=0.01",
// "exp:rate=2", "uniform01", "dirac:x=3", "empirical:file=path" (the file
// holds whitespace-separated sample values).
MarginalDist parse_dist_spec(const std::string& spec);

} // namespace tailrisk

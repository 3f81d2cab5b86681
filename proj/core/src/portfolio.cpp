#include "tailrisk/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tailrisk/aggregation.hpp"
#include "tailrisk/calibration.hpp"
#include "tailrisk/coupling.hpp"
#include "tailrisk/risk_measures.hpp"

namespace tailrisk {

namespace {

void validate_borrower(const Borrower& b, long long row, const std::string& path) {
    std::ostringstream msg;
    msg << path << " row " << row << ": ";
    if (!(b.exposure >= 0.0) || !std::isfinite(b.exposure)) {
        msg << "exposure must be a nonnegative number (got " << b.exposure << ")";
        throw std::runtime_error(msg.str());
    }
    if (!(b.pd > 0.0 && b.pd < 1.0)) {
        msg << "pd must lie in (0,1) (got " << b.pd << ")";
        throw std::runtime_error(msg.str());
    }
}

double parse_number(const std::string& field, const char* what, long long row,
                    const std::string& path) {
    std::size_t pos = 0;
    double value = 0.0;
    bool ok = true;
    try {
        value = std::stod(field, &pos);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || pos != field.size()) {
        std::ostringstream msg;
        msg << path << " row " << row << ": cannot parse " << what << " '" << field << "'";
        throw std::runtime_error(msg.str());
    }
    return value;
}

PortfolioSpec load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open portfolio file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,exposure,pd")
        throw std::runtime_error(path + ": expected header 'id,exposure,pd', got '" + line + "'");

    PortfolioSpec spec;
    long long row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            std::ostringstream msg;
            msg << path << " row " << row << ": expected 3 comma-separated fields";
            throw std::runtime_error(msg.str());
        }
        Borrower b;
        b.id = line.substr(0, c1);
        b.exposure = parse_number(line.substr(c1 + 1, c2 - c1 - 1), "exposure", row, path);
        b.pd = parse_number(line.substr(c2 + 1), "pd", row, path);
        validate_borrower(b, row, path);
        spec.borrowers.push_back(std::move(b));
    }
    if (spec.borrowers.empty()) throw std::runtime_error(path + ": no borrowers");
    return spec;
}

PortfolioSpec load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open portfolio file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": JSON parse failure: " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error(path + ": expected a JSON array of borrowers");
    PortfolioSpec spec;
    long long row = 0;
    for (const auto& entry : doc) {
        ++row;
        std::ostringstream msg;
        msg << path << " row " << row << ": ";
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("exposure") ||
            !entry.contains("pd")) {
            msg << "each borrower needs fields id, exposure, pd";
            throw std::runtime_error(msg.str());
        }
        if (!entry["id"].is_string() || !entry["exposure"].is_number() ||
            !entry["pd"].is_number()) {
            msg << "id must be a string, exposure and pd numbers";
            throw std::runtime_error(msg.str());
        }
        Borrower b{entry["id"].get<std::string>(), entry["exposure"].get<double>(),
                   entry["pd"].get<double>()};
        validate_borrower(b, row, path);
        spec.borrowers.push_back(std::move(b));
    }
    if (spec.borrowers.empty()) throw std::runtime_error(path + ": no borrowers");
    return spec;
}

// (gamma - 1 + p)/gamma clipped at 0: the pre-tail conditional default
// probability of a Bernoulli(p) loss.
double pretail_pd(double p, double gamma) {
    const double pg = (gamma - 1.0 + p) / gamma;
    return pg > 0.0 ? pg : 0.0;
}

struct CsvFile {
    std::FILE* f;
    explicit CsvFile(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
        if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    }
    ~CsvFile() {
        if (f) std::fclose(f);
    }
    CsvFile(const CsvFile&) = delete;
    CsvFile& operator=(const CsvFile&) = delete;
    void close_checked(const std::string& path) {
        const int rc = std::fclose(f);
        f = nullptr;
        if (rc != 0) throw std::runtime_error("write failure on '" + path + "'");
    }
};

} // namespace

PortfolioSpec load_portfolio(const std::string& path, PortfolioFormat format) {
    return format == PortfolioFormat::csv ? load_csv(path) : load_json(path);
}

PortfolioSpec load_portfolio(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".csv") return load_csv(path);
    if (ext == ".json") return load_json(path);
    throw std::runtime_error("cannot infer portfolio format from '" + path +
                             "' (expected .csv or .json)");
}

RiskReport run_report(const PortfolioSpec& portfolio, double delta, double alpha,
                      std::int64_t mc_budget, std::uint64_t seed) {
    if (portfolio.borrowers.empty())
        throw std::invalid_argument("run_report: portfolio must be non-empty");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("run_report: alpha must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("run_report: delta must lie in (0, 1)");

    const std::size_t n = portfolio.borrowers.size();
    std::vector<double> pds, exposures;
    std::vector<MarginalDist> marginals;
    pds.reserve(n);
    exposures.reserve(n);
    marginals.reserve(n);
    for (const Borrower& b : portfolio.borrowers) {
        pds.push_back(b.pd);
        exposures.push_back(b.exposure);
        marginals.push_back(MarginalDist::bernoulli(b.pd));
    }

    RiskReport report{};
    report.alpha = alpha;
    report.feasibility = feasibility_bound(pds, alpha, delta);
    if (report.feasibility) {
        report.gamma_used = alpha;
    } else {
        const double p_min = *std::min_element(pds.begin(), pds.end());
        const MarginalDist m = MarginalDist::bernoulli(p_min);
        report.gamma_used = gamma_from_delta(Measure::pearson, delta, &m).gamma;
    }
    const double gamma = report.gamma_used;

    GammaCoupling coupling(gamma, marginals);
    const AggregationFn f = AggregationFn::weighted_sum(exposures);
    report.worst_case_var = var_aggregate(f, coupling, alpha, mc_budget, seed);

    // Conditional path: quantile at alpha of the independent pre-tail sum.
    std::vector<double> pgs;
    pgs.reserve(n);
    for (double p : pds) pgs.push_back(pretail_pd(p, gamma));
    const bool homogeneous =
        std::all_of(pds.begin(), pds.end(), [&](double p) { return p == pds.front(); }) &&
        std::all_of(exposures.begin(), exposures.end(),
                    [&](double w) { return w == exposures.front(); });
    if (homogeneous) {
        report.conditional_var =
            pgs.front() > 0.0
                ? exposures.front() *
                      static_cast<double>(
                          binomial_var(static_cast<long long>(n), pgs.front(), alpha))
                : 0.0;
    } else {
        report.conditional_var = weighted_bernoulli_sum_dist(exposures, pgs, 200000)
                                     .quantile(alpha);
    }

    report.ratio = (report.worst_case_var == 0.0 && report.conditional_var == 0.0)
                       ? 0.0
                       : report.worst_case_var / report.conditional_var;

    // ES of the aggregate's worst-case law.  At or beyond gamma the tail is
    // comonotone, so shortfall adds across coordinates; below gamma the
    // average runs over the pre-tail law up to gamma and the comonotone tail
    // beyond it.
    if (alpha >= gamma) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += exposures[i] * es(marginals[i], alpha);
        report.es_worst_case = total;
    } else {
        const MarginalDist pre_tail_sum = weighted_bernoulli_sum_dist(exposures, pgs, 200000);
        double tail = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            tail += exposures[i] * marginals[i].integrate_quantile_power(gamma, 1.0, 1);
        report.es_worst_case =
            (gamma * pre_tail_sum.integrate_quantile_power(alpha / gamma, 1.0, 1) + tail) /
            (1.0 - alpha);
    }
    return report;
}

std::string report_to_json(const RiskReport& report) {
    nlohmann::json j;
    j["alpha"] = report.alpha;
    j["conditional_var"] = report.conditional_var;
    j["es_worst_case"] = report.es_worst_case;
    j["feasibility"] = report.feasibility;
    j["gamma_used"] = report.gamma_used;
    j["ratio"] = report.ratio;
    j["worst_case_var"] = report.worst_case_var;
    return j.dump(2) + "\n";
}

void emit_figure_data(Figure which, const FigureParams& params, const std::string& out_path) {
    CsvFile out(out_path);
    switch (which) {
        case Figure::fig1: {
            // Pearson dependence against Bernoulli p at fixed gamma.
            const int points = params.points > 0 ? params.points : 99;
            std::fprintf(out.f, "p,delta\n");
            for (int j = 1; j <= points; ++j) {
                const double p = static_cast<double>(j) / (points + 1);
                const MarginalDist m = MarginalDist::bernoulli(p);
                const double d = delta_from_gamma(Measure::pearson, params.gamma, &m);
                std::fprintf(out.f, "%.12g,%.12g\n", p, d);
            }
            break;
        }
        case Figure::fig2: {
            // Pearson dependence against gamma for exponential losses
            // (rate-free closed form): gamma from 0.9 to 0.999 inclusive.
            const int points = params.points > 1 ? params.points : 100;
            const MarginalDist m = MarginalDist::exponential(1.0);
            std::fprintf(out.f, "gamma,delta\n");
            for (int j = 0; j < points; ++j) {
                // Exact-integer ratio so default grids land on k/1000.
                const double g = (900.0 * (points - 1) + 99.0 * j) / (1000.0 * (points - 1));
                const double d = delta_from_gamma(Measure::pearson, g, &m);
                std::fprintf(out.f, "%.12g,%.12g\n", g, d);
            }
            break;
        }
        case Figure::fig3: {
            // Worst-case/conditional ratio vs portfolio size, log-spaced over
            // [1e2, 1e6] plus the exact decades so the headline sizes appear
            // verbatim in the dataset.
            const int points = params.points > 1 ? params.points : 50;
            std::set<long long> grid;
            for (int j = 0; j < points; ++j) {
                const double e = 2.0 + 4.0 * j / (points - 1);
                grid.insert(static_cast<long long>(std::llround(std::pow(10.0, e))));
            }
            for (long long d = 100; d <= 1000000; d *= 10) grid.insert(d);
            const std::vector<long long> ns(grid.begin(), grid.end());
            const auto curve = var_ratio_curve(params.pd, params.gamma, params.gamma, ns);
            std::fprintf(out.f, "n,ratio\n");
            for (const auto& [size, ratio] : curve)
                std::fprintf(out.f, "%lld,%.12g\n", size, ratio);
            break;
        }
        case Figure::fig4: {
            // Both VaR paths for the homogeneous credit portfolio over an
            // alpha grid, default [0.99, 0.9995] in steps of 0.0005.
            const int points = params.points > 1 ? params.points : 20;
            if (params.n < 1) throw std::invalid_argument("fig4: n must be >= 1");
            const MarginalDist loss = MarginalDist::bernoulli(params.pd);
            const std::vector<MarginalDist> marginals(static_cast<std::size_t>(params.n),
                                                      loss);
            const GammaCoupling coupling(params.gamma, marginals);
            const AggregationFn f = AggregationFn::weighted_sum(
                std::vector<double>(static_cast<std::size_t>(params.n), 1.0));
            const double pg = pretail_pd(params.pd, params.gamma);
            std::fprintf(out.f, "alpha,worst_case_var,conditional_var\n");
            for (int j = 0; j < points; ++j) {
                // Exact-integer ratio so the default grid ends on 0.9995 and
                // hits the 0.999 boundary exactly.
                const double a =
                    (9900.0 * (points - 1) + 95.0 * j) / (10000.0 * (points - 1));
                const double worst = var_aggregate(f, coupling, a);
                const double cond =
                    pg > 0.0 ? static_cast<double>(binomial_var(params.n, pg, a)) : 0.0;
                std::fprintf(out.f, "%.12g,%.12g,%.12g\n", a, worst, cond);
            }
            break;
        }
    }
    out.close_checked(out_path);
}

MarginalDist parse_dist_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    auto keyed_value = [&](const char* key) {
        const std::string prefix = std::string(key) + "=";
        if (rest.compare(0, prefix.size(), prefix) != 0 || rest.size() == prefix.size())
            throw std::invalid_argument("distribution spec '" + spec + "': expected " + head +
                                        ":" + key + "=<value>");
        return rest.substr(prefix.size());
    };
    auto numeric = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        bool ok = true;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok || pos != s.size())
            throw std::invalid_argument("distribution spec '" + spec + "': bad number '" + s +
                                        "'");
        return v;
    };

    if (head == "bernoulli") return MarginalDist::bernoulli(numeric(keyed_value("p")));
    if (head == "exp") return MarginalDist::exponential(numeric(keyed_value("rate")));
    if (head == "uniform01") {
        if (!rest.empty())
            throw std::invalid_argument("distribution spec '" + spec +
                                        "': uniform01 takes no parameters");
        return MarginalDist::uniform01();
    }
    if (head == "dirac") return MarginalDist::dirac(numeric(keyed_value("x")));
    if (head == "empirical") {
        const std::string file = keyed_value("file");
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("distribution spec '" + spec + "': cannot open '" + file +
                                     "'");
        std::vector<double> values;
        double v;
        while (in >> v) values.push_back(v);
        if (!in.eof())
            throw std::runtime_error("distribution spec '" + spec +
                                     "': non-numeric content in '" + file + "'");
        if (values.empty())
            throw std::runtime_error("distribution spec '" + spec + "': no samples in '" +
                                     file + "'");
        return MarginalDist::empirical(std::move(values));
    }
    throw std::invalid_argument("unknown distribution spec '" + spec + "'");
}

} // namespace tailrisk

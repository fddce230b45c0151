#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"

#include "sepkit/asymptotics.hpp"
#include "sepkit/cache.hpp"
#include "sepkit/closedforms.hpp"
#include "sepkit/density.hpp"
#include "sepkit/io.hpp"
#include "sepkit/moments.hpp"
#include "sepkit/montecarlo.hpp"
#include "sepkit/rationalize.hpp"
#include "sepkit/recurrence.hpp"

namespace sepkit {

enum ExitCode : int { exit_ok = 0, exit_computation = 1, exit_usage = 2 };

struct RunConfig {
    int precision = 30;
    unsigned degree = 2000; // moment count N for the density route
    std::string support_a = "-1/16";
    std::string support_b = "1/432";
    std::string support_pair; // "a,b"; overrides support_a/support_b
    std::string cache_dir;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string format; // text | csv | json; empty picks the command default
    std::string out;

    SupportInterval support() const
    {
        if (!support_pair.empty()) {
            const auto comma = support_pair.find(',');
            if (comma == std::string::npos) {
                throw UsageError("--support expects 'a,b'");
            }
            return {parse_rational(support_pair.substr(0, comma)), parse_rational(support_pair.substr(comma + 1))};
        }
        return {parse_rational(support_a), parse_rational(support_b)};
    }

    void validate() const
    {
        if (precision < 30) {
            throw UsageError("--precision must be at least 30");
        }
        if (degree < 2) {
            throw UsageError("--n must be at least 2");
        }
        const SupportInterval s = support();
        if (!(s.a < s.b)) {
            throw UsageError("support needs support-a < support-b");
        }
        if (!format.empty() && format != "text" && format != "csv" && format != "json") {
            throw UsageError("--format must be text, csv or json");
        }
    }
};

/// What a command produced: JSON document, optional table and a text form.
struct CommandOutput {
    Json json = Json::object();
    std::optional<TaggedTable> table;
    std::string text;
};

namespace cli_detail {

inline TaggedValue exact_int(long long v) { return TaggedValue::of(BigRational(v)); }

inline std::string k_column(int k) { return k < 0 ? "q_k_minus" + std::to_string(-k) : "q_k" + std::to_string(k); }

inline Json fit_json(const StudyResult& r)
{
    Json j;
    j["study"] = r.name;
    j["points"] = r.table.size();
    if (r.fit) {
        j["fit"] = {{"slope", tagged(r.fit->slope)},
                    {"intercept", tagged(r.fit->intercept)},
                    {"r_squared", tagged(r.fit->r_squared)}};
    }
    if (r.reference) {
        j["reference_label"] = r.reference_label;
        j["reference"] = tagged(*r.reference);
    }
    if (r.deviation) {
        j["deviation"] = tagged(*r.deviation);
    }
    if (!r.table.empty()) {
        j["terminal_value"] = tagged(r.table.back().second);
    }
    j["findings"] = r.findings;
    return j;
}

inline TaggedTable study_table(const StudyResult& r)
{
    TaggedTable t({"x", "y"});
    for (const auto& [x, y] : r.table) {
        if (is_integer(exact_rational(x.value)) && x.certified_digits == x.precision) {
            t.add_row({TaggedValue::of(exact_rational(x.value)), TaggedValue::of(y)});
        } else {
            t.add_row({TaggedValue::of(x), TaggedValue::of(y)});
        }
    }
    return t;
}

inline Json equation_json(const DifferenceEquation& eq)
{
    auto poly = [](const Polynomial& p) {
        Json coeffs = Json::array();
        for (const auto& c : p.coeffs()) {
            coeffs.push_back(tagged(c));
        }
        return Json{{"polynomial", p.to_string()}, {"coefficients", coeffs}};
    };
    return Json{{"form", "p2(α) G(α+1) = p1(α) G(α) + p0(α)"},
                {"p0", poly(eq.p0)},
                {"p1", poly(eq.p1)},
                {"p2", poly(eq.p2)}};
}

inline std::string equation_text(const DifferenceEquation& eq)
{
    return "p2 = " + eq.p2.to_string() + "\np1 = " + eq.p1.to_string() + "\np0 = " + eq.p0.to_string() + "\n";
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Exact Q where an exact route exists, otherwise a certified real value.
inline TaggedValue q_value(int k, const BigRational& alpha, const RunConfig& cfg, const std::string& method)
{
    const bool integral = is_integer(alpha) && alpha >= 1;
    if (integral && k >= -1 && k <= 4 && (method == "auto" || method == "recurrence")) {
        return TaggedValue::of(q_from_recurrence(k, static_cast<long>(numerator_of(alpha))));
    }
    if (alpha == 1 && k >= -1 && k <= 9 && (method == "auto" || method == "table")) {
        return TaggedValue::of(q_initial(k));
    }
    if ((k == 0 || k == 1) && (method == "auto" || method == "concise")) {
        if (integral) {
            return TaggedValue::of(concise_Q_exact(k, static_cast<long>(numerator_of(alpha))));
        }
        return TaggedValue::of(concise_Q(k, alpha, cfg.precision));
    }
    if (method == "auto" || method == "density") {
        return TaggedValue::of(estimate_probability(k, alpha, cfg.degree, cfg.support(), cfg.precision).value);
    }
    throw DomainError("method '" + method + "' does not cover k = " + std::to_string(k) + ", alpha = "
                      + to_string(alpha));
}

} // namespace cli_detail

/// Parses argv, runs one subcommand and writes its output. Returns the exit
/// code: 0 success, 2 usage error, 1 computation error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    using namespace cli_detail;
    CLI::App app{"Separability probability toolkit for induced-measure two-qubit states", "sepkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file with run options; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig cfg;
    app.add_option("--precision", cfg.precision, "decimal digits (>= 30)")->capture_default_str();
    app.add_option("--n,--n-moments", cfg.degree, "moment count N for the density route")->capture_default_str();
    app.add_option("--support", cfg.support_pair, "density support as 'a,b'");
    app.add_option("--support-a", cfg.support_a, "left end of the density support")->capture_default_str();
    app.add_option("--support-b", cfg.support_b, "right end of the density support")->capture_default_str();
    app.add_option("--cache-dir", cfg.cache_dir, "result cache directory (overrides SEPKIT_CACHE_DIR)");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)")->capture_default_str();
    app.add_option("--format", cfg.format, "text | csv | json");
    app.add_option("--out", cfg.out, "write output to this path instead of stdout");

    std::function<CommandOutput()> action;
    std::string default_format = "text";

    // shared per-command fields
    int k = 0;
    std::string alpha_text = "1";

    // moments
    auto* moments = app.add_subcommand("moments", "moments <D^n> (or <|ρ^PT|^n> with --kind pt)");
    unsigned count = 10;
    std::string kind = "d";
    bool decimal = false;
    moments->add_option("--k", k)->required();
    moments->add_option("--alpha", alpha_text)->required();
    moments->add_option("--count", count, "highest moment order")->capture_default_str();
    moments->add_option("--kind", kind, "d | pt")->capture_default_str();
    moments->add_flag("--decimal", decimal, "print decimals at --precision instead of fractions");
    moments->callback([&] {
        default_format = "csv";
        action = [&] {
            const BigRational alpha = parse_rational(alpha_text);
            if (kind != "d" && kind != "pt") {
                throw UsageError("--kind must be d or pt");
            }
            if (kind == "pt" && k != 0) {
                throw DomainError("|ρ^PT| moments are available for k = 0 only");
            }
            CommandOutput o;
            TaggedTable t({"k", "alpha", "n", "value"});
            const MomentSequence seq = kind == "d" ? moment_sequence(k, alpha, count) : MomentSequence{};
            for (unsigned n = 0; n <= count; ++n) {
                const BigRational m = kind == "d" ? seq.values[n] : pt_moment_hs(alpha, n);
                t.add_row({exact_int(k), TaggedValue::of(alpha), exact_int(n),
                           decimal ? TaggedValue::of(exact_prec(m, cfg.precision)) : TaggedValue::of(m)});
            }
            o.json = {{"k", k}, {"alpha", tagged(alpha)}, {"kind", kind}, {"moments", t.to_json()}};
            o.table = std::move(t);
            return o;
        };
    });

    // estimate
    auto* estimate = app.add_subcommand("estimate", "density-route probability estimate");
    std::string c_text = "0", mode_text = "float";
    long long max_den = 0;
    estimate->add_option("--k", k)->required();
    estimate->add_option("--alpha", alpha_text)->required();
    estimate->add_option("--c,--threshold", c_text, "threshold: estimates Prob(D > c)")->capture_default_str();
    estimate->add_option("--mode", mode_text, "exact | float")->capture_default_str();
    estimate->add_option("--max-den", max_den, "also rationalize with this denominator bound");
    estimate->callback([&] {
        action = [&] {
            const BigRational alpha = parse_rational(alpha_text);
            const BigRational c = parse_rational(c_text);
            if (mode_text != "exact" && mode_text != "float") {
                throw UsageError("--mode must be exact or float");
            }
            const DensityMode mode = mode_text == "exact" ? DensityMode::exact : DensityMode::floating;
            const SupportInterval support = cfg.support();
            Json key = ResultCache::make_key({{"operation", "estimate"},
                                              {"k", k},
                                              {"alpha", to_string(alpha)},
                                              {"n", cfg.degree},
                                              {"precision", cfg.precision},
                                              {"support", {to_string(support.a), to_string(support.b)}},
                                              {"c", to_string(c)},
                                              {"mode", mode_text}});
            auto cache = ResultCache::locate(cfg.cache_dir);
            CommandOutput o;
            if (cache) {
                if (auto hit = cache->lookup(key)) {
                    o.json = *hit;
                }
            }
            if (o.json.empty()) {
                const ProbabilityEstimate e = estimate_probability(k, alpha, cfg.degree, support, cfg.precision, c, mode);
                o.json = {{"k", k},
                          {"alpha", tagged(alpha)},
                          {"degree", e.degree},
                          {"value", tagged(e.value)},
                          {"half_degree_value", TaggedValue::of(e.half_degree_value).to_json()},
                          {"tail_indicator", TaggedValue::estimate(e.tail_indicator, 0).to_json()},
                          {"warnings", e.warnings}};
                o.json["value_internal"] = to_decimal(e.value.value, cfg.precision);
                o.json["error_log10"] = e.value.abs_error_log10();
                if (cache) {
                    cache->store(key, o.json, e.value.certified_digits);
                }
            }
            if (max_den > 0) {
                WorkingPrecision wp(cfg.precision + kGuardDigits);
                PrecReal v{Real(o.json["value_internal"].get<std::string>()), cfg.precision,
                           o.json["value"]["certified_digits"].get<int>(), o.json["error_log10"].get<double>()};
                try {
                    auto r = rationalize(v, max_den);
                    o.json["rationalized"] = r ? tagged(*r) : Json(nullptr);
                } catch (const AmbiguityError& e) {
                    o.json["rationalized"] = nullptr;
                    o.json["rationalize_error"] = e.what();
                }
            }
            o.json.erase("value_internal");
            o.json.erase("error_log10");
            TaggedValue tv{o.json["value"]["value"], false, o.json["value"]["certified_digits"].get<int>(), {}};
            o.text = tv.to_text();
            if (o.json.contains("rationalized") && !o.json["rationalized"].is_null()) {
                o.text += "\nrationalized: " + o.json["rationalized"]["value"].get<std::string>();
            }
            return o;
        };
    });

    // closed-form
    auto* closed = app.add_subcommand("closed-form", "concise formulas, rebit total probability, k=-1 correction");
    std::string what = "concise-q", weights_path, closed_method = "concise";
    closed->add_option("--what", what, "concise-term | concise-q | rebit | correction | g2-weighted")
        ->capture_default_str();
    closed->add_option("--method", closed_method, "concise-q: concise | recurrence")->capture_default_str();
    closed->add_option("--k", k);
    closed->add_option("--alpha", alpha_text)->capture_default_str();
    closed->add_option("--weights", weights_path, "weights JSON for g2-weighted");
    closed->callback([&] {
        action = [&] {
            const BigRational alpha = parse_rational(alpha_text);
            const bool integral = is_integer(alpha) && alpha >= 1;
            std::optional<TaggedValue> v;
            if (what == "concise-term") {
                if (auto e = concise_term_exact(k, alpha)) {
                    v = TaggedValue::of(*e);
                } else {
                    v = TaggedValue::of(concise_term(k, alpha, cfg.precision));
                }
            } else if (what == "concise-q" && closed_method == "recurrence") {
                if (!integral) {
                    throw UsageError("--method recurrence needs integer alpha >= 1");
                }
                v = TaggedValue::of(q_from_recurrence(k, static_cast<long>(numerator_of(alpha))));
            } else if (what == "concise-q") {
                if (closed_method != "concise") {
                    throw UsageError("--method must be concise or recurrence");
                }
                v = integral ? TaggedValue::of(concise_Q_exact(k, static_cast<long>(numerator_of(alpha))))
                             : TaggedValue::of(concise_Q(k, alpha, cfg.precision));
            } else if (what == "rebit") {
                v = TaggedValue::of(rebit_total_prob(k));
            } else if (what == "correction") {
                v = integral ? TaggedValue::of(kminus1_correction_exact(static_cast<long>(numerator_of(alpha))))
                             : TaggedValue::of(kminus1_correction(alpha, cfg.precision));
            } else if (what == "g2-weighted") {
                if (weights_path.empty()) {
                    throw UsageError("g2-weighted needs --weights");
                }
                Json j;
                try {
                    j = Json::parse(read_file(weights_path));
                } catch (const nlohmann::json::exception& e) {
                    throw ParseError(std::string("weights JSON: ") + e.what());
                }
                int wk = 0;
                const auto ws = parse_weights(j, wk);
                v = TaggedValue::of(g2_weighted_sum(ws, alpha, cfg.precision));
            } else {
                throw UsageError("unknown --what '" + what + "'");
            }
            CommandOutput o;
            o.json = {{"what", what}, {"k", k}, {"alpha", tagged(alpha)}, {"value", v->to_json()}};
            if (what == "concise-q") {
                o.json["method"] = closed_method;
            }
            o.text = v->to_text();
            return o;
        };
    });

    // g1
    auto* g1cmd = app.add_subcommand("g1", "hypergeometric prefactor G1(k, α)");
    g1cmd->add_option("--k", k)->required();
    g1cmd->add_option("--alpha", alpha_text)->required();
    g1cmd->callback([&] {
        action = [&] {
            const BigRational alpha = parse_rational(alpha_text);
            const TaggedValue v = is_integer(alpha) && alpha >= 1
                                      ? TaggedValue::of(g1(k, static_cast<long>(numerator_of(alpha))))
                                      : TaggedValue::of(g1(k, alpha, cfg.precision));
            CommandOutput o;
            o.json = {{"k", k}, {"alpha", tagged(alpha)}, {"g1", v.to_json()}};
            o.text = v.to_text();
            return o;
        };
    });

    // params
    auto* params = app.add_subcommand("params", "hypergeometric parameters for k");
    params->add_option("--k", k)->required();
    params->callback([&] {
        action = [&] {
            const ParameterSet ps = parameter_set(k);
            auto join = [](const auto& list) {
                std::string s;
                for (const auto& p : list) {
                    if (!s.empty()) s += ", ";
                    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, std::string>) {
                        s += p;
                    } else {
                        s += to_string(p);
                    }
                }
                return s;
            };
            Json upper = Json::array(), lower = Json::array();
            std::vector<std::string> family;
            for (const auto& p : ps.upper) upper.push_back(to_string(p));
            for (const auto& p : ps.lower) lower.push_back(to_string(p));
            for (const auto& t : pfq_family(k)) family.push_back(t.label);
            CommandOutput o;
            o.json = {{"k", k},
                      {"upper", upper},
                      {"lower", lower},
                      {"argument", tagged(family_argument())},
                      {"m", m_count(k)},
                      {"family", family}};
            o.text = "upper: " + join(ps.upper) + "\nlower: " + join(ps.lower)
                     + "\nargument: " + to_string(family_argument()) + "\nm: " + std::to_string(m_count(k))
                     + "\nfamily: " + join(family) + "\n";
            return o;
        };
    });

    // q
    auto* q = app.add_subcommand("q", "Q(k, α) = Prob(|ρ^PT| > |ρ|)");
    std::string method = "auto";
    q->add_option("--k", k)->required();
    q->add_option("--alpha", alpha_text)->required();
    q->add_option("--method", method, "auto | recurrence | table | concise | density")->capture_default_str();
    q->callback([&] {
        action = [&] {
            const BigRational alpha = parse_rational(alpha_text);
            const TaggedValue v = q_value(k, alpha, cfg, method);
            CommandOutput o;
            o.json = {{"k", k}, {"alpha", tagged(alpha)}, {"q", v.to_json()}};
            o.text = v.to_text();
            return o;
        };
    });

    // guess
    auto* guess = app.add_subcommand("guess", "guess a first-order difference equation from exact values");
    std::string input_path;
    int guess_count = 85, max_degree = 19;
    guess->add_option("--input", input_path, "CSV or JSON (alpha, value) points");
    guess->add_option("--k", k, "without --input: use G2 values for this k");
    guess->add_option("--count", guess_count, "number of generated values")->capture_default_str();
    guess->add_option("--max-degree", max_degree)->capture_default_str();
    guess->callback([&] {
        action = [&] {
            std::vector<std::pair<BigRational, BigRational>> pts;
            if (!input_path.empty()) {
                std::ifstream in(input_path);
                if (!in) {
                    throw UsageError("cannot open '" + input_path + "'");
                }
                pts = read_points(in);
            } else {
                const auto g2 = iterate(fitted_ansatz(k).equation, guess_count - 1);
                for (int a = 1; a <= guess_count; ++a) {
                    pts.emplace_back(BigRational(a), g2[static_cast<std::size_t>(a - 1)]);
                }
            }
            const auto eq = guess_first_order(pts, max_degree);
            if (!eq) {
                throw ConvergenceError("no first-order equation with degree <= " + std::to_string(max_degree)
                                       + " fits the data");
            }
            CommandOutput o;
            o.json = {{"points", pts.size()}, {"equation", equation_json(*eq)}};
            o.text = equation_text(*eq);
            if (input_path.empty() && k >= -1 && k <= 4) {
                const bool has = eq->p0.divisible_by(q_polynomial(k).poly);
                o.json["p0_contains_q_polynomial"] = has;
                o.text += std::string("p0 contains q_k: ") + (has ? "yes" : "no") + "\n";
            }
            return o;
        };
    });

    // fit-ansatz
    auto* fit = app.add_subcommand("fit-ansatz", "fit the structured ansatz for G2 and validate on held-out points");
    fit->add_option("--k", k)->required();
    fit->add_option("--input", input_path, "G2 points (alpha, value); first 3 fit, the rest validate");
    fit->callback([&] {
        action = [&] {
            AnsatzFit f;
            if (input_path.empty()) {
                f = fitted_ansatz(k);
            } else {
                std::ifstream in(input_path);
                if (!in) {
                    throw UsageError("cannot open '" + input_path + "'");
                }
                auto pts = read_points(in);
                if (pts.size() < 5) {
                    throw DomainError("fit-ansatz needs at least 5 points (3 fit, 2 held out)");
                }
                std::vector<std::pair<BigRational, BigRational>> a(pts.begin(), pts.begin() + 3);
                std::vector<std::pair<BigRational, BigRational>> b(pts.begin() + 3, pts.end());
                f = fit_ansatz(k, a, b);
            }
            CommandOutput o;
            o.json = {{"k", k},
                      {"c0", tagged(f.c0)},
                      {"c1", tagged(f.c1)},
                      {"c2", tagged(f.c2)},
                      {"c1_over_c2", tagged(f.c1 / f.c2)},
                      {"exception_flags", f.exception_flags},
                      {"validated", true},
                      {"equation", equation_json(f.equation)}};
            o.text = "c0 = " + to_string(f.c0) + "\nc1 = " + to_string(f.c1) + "\nc2 = " + to_string(f.c2)
                     + "\nc1/c2 = " + to_string(f.c1 / f.c2) + "\n" + equation_text(f.equation);
            return o;
        };
    });

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimates over induced-measure random states");
    std::string field_text = "complex";
    std::uint64_t samples = 1000000;
    mc->add_option("--k", k)->required();
    mc->add_option("--field", field_text, "real | complex")->capture_default_str();
    mc->add_option("--samples", samples)->capture_default_str();
    mc->callback([&] {
        action = [&] {
            const Field field = parse_field(field_text);
            Json key = ResultCache::make_key({{"operation", "mc"},
                                              {"k", k},
                                              {"field", field_text},
                                              {"samples", samples},
                                              {"seed", cfg.seed}});
            auto cache = ResultCache::locate(cfg.cache_dir);
            CommandOutput o;
            if (cache) {
                if (auto hit = cache->lookup(key)) {
                    o.json = *hit;
                }
            }
            if (o.json.empty()) {
                const McEstimate e = mc_estimate(k, field, samples, cfg.seed, cfg.threads);
                Json moments_json = Json::array();
                for (std::size_t i = 0; i < 4; ++i) {
                    moments_json.push_back({{"n", i + 1},
                                            {"mean", TaggedValue::estimate(e.d_moments[i], e.d_moments_se[i]).to_json()}});
                }
                o.json = {{"k", k},
                          {"field", to_string(field)},
                          {"n_samples", e.n_samples},
                          {"seed", e.seed},
                          {"p_d_positive", TaggedValue::estimate(e.p_d_positive, e.p_d_positive_se).to_json()},
                          {"p_pt_positive", TaggedValue::estimate(e.p_pt_positive, e.p_pt_positive_se).to_json()},
                          {"d_moments", moments_json},
                          {"pt_det_mean", TaggedValue::estimate(e.pt_det_mean, e.pt_det_mean_se).to_json()},
                          {"d_min", TaggedValue::estimate(e.d_min, 0).to_json()},
                          {"d_max", TaggedValue::estimate(e.d_max, 0).to_json()},
                          {"implication_violations", e.implication_violations},
                          {"precision_checked", e.precision_checked},
                          {"precision_disagreements", e.precision_disagreements}};
                if (cache) {
                    cache->store(key, o.json);
                }
            }
            const Json& p = o.json["p_d_positive"];
            o.text = TaggedValue{p["value"], false, 0, p["standard_error"]}.to_text();
            return o;
        };
    });

    // study
    auto* study = app.add_subcommand("study", "asymptotic studies");
    std::string study_kind, summary_out, unit_method = "table";
    long alpha_max = 101;
    int k_min = 1, k_max = 0;
    study->add_option("kind", study_kind, "ratio | rebit | logratio | unitslope | diagonal | table")->required();
    study->add_option("--k", k, "k for the ratio study");
    study->add_option("--alpha-max", alpha_max)->capture_default_str();
    study->add_option("--k-min", k_min)->capture_default_str();
    study->add_option("--k-max", k_max, "defaults: 200 (rebit, logratio), 8 (unitslope), 4 (diagonal)");
    study->add_option("--method", unit_method, "unitslope: table | recurrence | density | mc")->capture_default_str();
    study->add_option("--alpha", alpha_text, "unitslope: alpha")->capture_default_str();
    study->add_option("--samples", samples, "unitslope mc: samples per k")->capture_default_str();
    study->add_option("--input", input_path, "table: CSV or JSON (x, y) points");
    study->add_option("--summary-out", summary_out, "with --format csv: write the JSON fit summary here");
    study->callback([&] {
        default_format = "csv";
        action = [&] {
            StudyResult r;
            if (study_kind == "ratio") {
                r = ratio_study_alpha(k, alpha_max, cfg.precision);
            } else if (study_kind == "rebit") {
                r = rebit_loglog_study(k_max ? k_max : 200, std::max(cfg.precision, 50));
            } else if (study_kind == "logratio") {
                r = log_ratio_study(k_max ? k_max : 200, std::max(cfg.precision, 50));
            } else if (study_kind == "unitslope") {
                UnitSlopeOptions u;
                u.method = parse_unit_slope_method(unit_method);
                u.alpha = parse_rational(alpha_text);
                u.k_min = k_min;
                u.k_max = k_max ? k_max : 8;
                u.precision = cfg.precision;
                u.degree = cfg.degree;
                u.samples = samples;
                u.seed = cfg.seed;
                r = unit_slope_study(u);
            } else if (study_kind == "diagonal") {
                r = diagonal_study(k_max ? k_max : 4, cfg.degree, cfg.precision);
            } else if (study_kind == "table") {
                if (input_path.empty()) {
                    throw UsageError("study table needs --input");
                }
                std::ifstream in(input_path);
                if (!in) {
                    throw UsageError("cannot open '" + input_path + "'");
                }
                std::vector<std::pair<PrecReal, PrecReal>> pts;
                for (const auto& [x, y] : read_points(in)) {
                    pts.emplace_back(exact_prec(x, cfg.precision), exact_prec(y, cfg.precision));
                }
                r = table_study("table", std::move(pts));
            } else {
                throw UsageError("unknown study '" + study_kind + "'");
            }
            CommandOutput o;
            o.table = study_table(r);
            o.json = fit_json(r);
            o.json["table"] = o.table->to_json();
            if (!summary_out.empty()) {
                std::ofstream s(summary_out);
                if (!s) {
                    throw UsageError("cannot write '" + summary_out + "'");
                }
                s << fit_json(r).dump(2) << '\n';
            }
            return o;
        };
    });

    // rationalize
    auto* rat = app.add_subcommand("rationalize", "smallest-denominator rational inside a decimal's error ball");
    std::string value_text;
    int digits = 0;
    long long rat_max_den = 1000000;
    rat->add_option("--value", value_text)->required();
    rat->add_option("--digits", digits, "certified significant digits of --value")->required();
    rat->add_option("--max-den", rat_max_den)->capture_default_str();
    rat->callback([&] {
        action = [&] {
            if (digits < 1) {
                throw UsageError("--digits must be positive");
            }
            const int prec = std::max(cfg.precision, digits + 5);
            WorkingPrecision wp(prec + kGuardDigits);
            const PrecReal v{to_real(parse_rational(value_text)), prec, digits, std::nullopt};
            const auto r = rationalize(v, rat_max_den);
            if (!r) {
                throw ConvergenceError("no rational with denominator <= " + std::to_string(rat_max_den)
                                       + " lies within the error ball");
            }
            CommandOutput o;
            o.json = {{"input", value_text}, {"digits", digits}, {"max_den", rat_max_den}, {"rational", tagged(*r)}};
            o.text = to_string(*r);
            return o;
        };
    });

    // figure
    auto* figure = app.add_subcommand("figure", "plot data as CSV");
    std::string figure_name, alpha_min_text = "1", alpha_max_text = "10", alpha_step_text = "1";
    int fig_k_min = -1, fig_k_max = 4;
    figure->add_option("name", figure_name, "raw | log | dual")->required();
    figure->add_option("--alpha-min", alpha_min_text)->capture_default_str();
    figure->add_option("--alpha-max", alpha_max_text)->capture_default_str();
    figure->add_option("--alpha-step", alpha_step_text)->capture_default_str();
    figure->add_option("--k-min", fig_k_min)->capture_default_str();
    figure->add_option("--k-max", fig_k_max, "raw/log: highest k; dual: highest k (default 200)");
    figure->callback([&] {
        default_format = "csv";
        action = [&] {
            CommandOutput o;
            if (figure_name == "dual") {
                const int kmax = figure->count("--k-max") ? fig_k_max : 200;
                const StudyResult r = rebit_loglog_study(kmax, std::max(cfg.precision, 50));
                TaggedTable t({"k", "log_neg_log_p"});
                for (const auto& [x, y] : r.table) {
                    t.add_row({TaggedValue::of(exact_rational(x.value)), TaggedValue::of(y)});
                }
                o.json = fit_json(r);
                o.json["table"] = t.to_json();
                o.table = std::move(t);
                return o;
            }
            if (figure_name != "raw" && figure_name != "log") {
                throw UsageError("figure name must be raw, log or dual");
            }
            if (fig_k_min < -1 || fig_k_max > 4 || fig_k_min > fig_k_max) {
                throw RangeError("raw/log figures cover -1 <= k <= 4");
            }
            const BigRational a0 = parse_rational(alpha_min_text), a1 = parse_rational(alpha_max_text),
                              step = parse_rational(alpha_step_text);
            if (step <= 0 || a0 > a1 || a0 <= 0) {
                throw RangeError("need 0 < alpha-min <= alpha-max and alpha-step > 0");
            }
            std::vector<std::string> cols{"alpha"};
            for (int kk = fig_k_min; kk <= fig_k_max; ++kk) cols.push_back(k_column(kk));
            TaggedTable t(cols);
            for (BigRational a = a0; a <= a1; a += step) {
                std::vector<TaggedValue> row{TaggedValue::of(a)};
                for (int kk = fig_k_min; kk <= fig_k_max; ++kk) {
                    TaggedValue v = q_value(kk, a, cfg, "auto");
                    if (figure_name == "log") {
                        const PrecReal x = v.exact ? exact_prec(parse_rational(v.text), cfg.precision)
                                                   : [&] {
                                                         WorkingPrecision wp(cfg.precision + kGuardDigits);
                                                         return PrecReal{Real(v.text), cfg.precision, v.certified_digits,
                                                                         std::nullopt};
                                                     }();
                        v = TaggedValue::of(detail::real_log(x));
                    }
                    row.push_back(std::move(v));
                }
                t.add_row(std::move(row));
            }
            o.json = {{"figure", figure_name}, {"table", t.to_json()}};
            o.table = std::move(t);
            return o;
        };
    });

    try {
        app.parse(argc, argv);
        cfg.validate();
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return exit_usage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    CommandOutput result;
    try {
        result = action();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_computation;
    }

    const std::string format = cfg.format.empty() ? default_format : cfg.format;
    std::ostringstream buf;
    if (format == "json") {
        buf << result.json.dump(2) << '\n';
    } else if (format == "csv" || result.text.empty()) {
        if (result.table) {
            result.table->write_csv(buf);
        } else {
            err << "usage error: this command has no tabular output; use --format text or json\n";
            return exit_usage;
        }
    } else {
        buf << result.text;
        if (!result.text.empty() && result.text.back() != '\n') {
            buf << '\n';
        }
    }
    if (cfg.out.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(cfg.out, std::ios::trunc);
        if (!f || !(f << buf.str())) {
            err << "error: cannot write '" << cfg.out << "'\n";
            return exit_computation;
        }
    }
    return exit_ok;
}

} // namespace sepkit

// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [1 2 3 4a 4b 5 6 7 8] [--n4b N]
//
// With no criteria listed all of them run. The exit status is non-zero when
// any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sepkit/sepkit.hpp"

using namespace sepkit;

namespace {

BigRational R(const char* s) { return parse_rational(s); }

// Collects failed checks for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::ostringstream notes;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) failures.push_back(what);
    }
};

double as_double(const PrecReal& x) { return x.value.convert_to<double>(); }
double as_double(const BigRational& x) { return x.convert_to<double>(); }

bool within_sigma(double est, double se, double exact, double k) { return std::abs(est - exact) <= k * se; }

std::string fmt(double x, int digits = 8)
{
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

unsigned n4b = 15801;

void criterion_1(Check& c)
{
    c.expect(q_from_recurrence(0, 1) == R("4/33"), "Q(0,1) != 4/33");
    c.expect(q_from_recurrence(0, 2) == R("13/323"), "Q(0,2) != 13/323");
    const std::vector<const char*> q1{"1/14", "4/33", "45/286", "1553/8398", "3073/14858", "8348/37145"};
    for (int k = -1; k <= 4; ++k) {
        const BigRational v = q_from_recurrence(k, 1);
        c.expect(v == R(q1[k + 1]), "Q(" + std::to_string(k) + ",1) = " + to_string(v));
    }
    c.notes << "Q(0,2) = " << to_string(q_from_recurrence(0, 2));
}

void criterion_2(Check& c)
{
    const auto t = concise_term_exact(0, 1);
    c.expect(t && *t == R("863/10659"), "concise_term(0,1) != 863/10659");
    c.expect(R("4/33") - R("13/323") == R("863/10659"), "4/33 - 13/323 != 863/10659");
    const PrecReal q = concise_Q(0, 1, 60);
    const int cd = q.certified_digits.value_or(0);
    c.expect(cd >= 50, "concise_Q(0,1) certified to " + std::to_string(cd) + " digits");
    std::optional<BigRational> r;
    try {
        r = rationalize(q, 1000);
    } catch (const std::exception& e) {
        c.expect(false, std::string("rationalize: ") + e.what());
    }
    c.expect(r && *r == R("4/33"), "concise_Q(0,1) does not rationalize to 4/33");
    c.notes << "concise_Q(0,1) certified_digits=" << cd;
}

void criterion_3(Check& c)
{
    c.expect(rebit_total_prob(0) == R("29/64"), "rebit_total_prob(0) != 29/64");
    c.expect(rebit_total_prob(0) / 2 == R("29/128"), "29/64 / 2 != 29/128");
    c.expect(rebit_total_prob(1) == R("515/768"), "rebit_total_prob(1) != 515/768");
    const McEstimate e = mc_estimate(1, Field::real, 10000000, 20240601);
    const double exact = as_double(R("515/768"));
    c.expect(within_sigma(e.p_pt_positive, e.p_pt_positive_se, exact, 4),
             "real k=1 MC total separability " + fmt(e.p_pt_positive) + " not within 4 sigma of 515/768");
    c.notes << "MC " << fmt(e.p_pt_positive) << " +- " << fmt(e.p_pt_positive_se, 3) << " vs " << fmt(exact)
            << " (" << fmt((e.p_pt_positive - exact) / e.p_pt_positive_se, 3) << " sigma)";
}

struct DensityCase {
    int k;
    const char* alpha;
    const char* target;
};

const std::vector<DensityCase> density_cases{{0, "1", "4/33"}, {0, "1/2", "29/128"}, {1, "1", "45/286"}};

void criterion_4a(Check& c)
{
    for (const auto& dc : density_cases) {
        const BigRational target = R(dc.target);
        double prev = 1;
        c.notes << "(" << dc.k << "," << dc.alpha << "):";
        for (unsigned N : {100u, 400u, 1600u}) {
            const ProbabilityEstimate e = estimate_probability(dc.k, R(dc.alpha), N);
            WorkingPrecision wp(40);
            const double err = Real(abs(e.value.value - to_real(target))).convert_to<double>();
            c.expect(err <= prev, std::string("error grew at N=") + std::to_string(N) + " for " + dc.target);
            c.notes << " N=" << N << " err=" << fmt(err, 3);
            prev = err;
        }
        c.notes << "; ";
    }
}

void criterion_4b(Check& c)
{
    c.notes << "N=" << n4b << ":";
    for (const auto& dc : density_cases) {
        const ProbabilityEstimate e = estimate_probability(dc.k, R(dc.alpha), n4b);
        std::string outcome;
        try {
            auto r = rationalize(e.value, 1000000);
            outcome = r ? to_string(*r) : "no candidate";
            c.expect(r && *r == R(dc.target), std::string(dc.target) + ": rationalized to " + outcome);
        } catch (const AmbiguityError&) {
            outcome = "ambiguous";
            c.expect(false, std::string(dc.target) + ": error ball not narrow enough for a unique rational");
        }
        WorkingPrecision wp(40);
        c.notes << " " << dc.target << " -> " << outcome << " (certified_digits="
                << e.value.certified_digits.value_or(0)
                << ", true error=" << fmt(Real(abs(e.value.value - to_real(R(dc.target)))).convert_to<double>(), 3)
                << ")";
    }
}

void criterion_5(Check& c)
{
    const auto g2 = anchor_g2_points(0, 85);
    const auto eq = guess_first_order(g2, 19);
    c.expect(eq.has_value(), "no equation found for k=0 from 85 values");
    const Polynomial q0 = q_polynomial(0).poly;
    c.expect(q0.coeffs() == std::vector<BigRational>{63000, 410694, 1042015, 1289125, 779750, 185000},
             "stored k=0 factor differs from 185000a^5+...+63000");
    if (eq) {
        c.expect(eq->p0.divisible_by(q0), "guessed p0 lacks the q_0 factor");
        c.notes << "guessed degrees (" << eq->p0.degree() << "," << eq->p1.degree() << "," << eq->p2.degree()
                << "); ";
    }
    for (int k = -1; k <= 4; ++k) {
        try {
            const auto pts = anchor_g2_points(k, 5);
            const AnsatzFit fit = fit_ansatz(k, {pts.begin(), pts.begin() + 3}, {pts.begin() + 3, pts.end()});
            c.expect(fit.equation.p0.divisible_by(q_polynomial(k).poly), "k=" + std::to_string(k) + " p0 lacks q_k");
        } catch (const std::exception& e) {
            c.expect(false, "fit_ansatz k=" + std::to_string(k) + ": " + e.what());
        }
    }
    const AnsatzFit f0 = fitted_ansatz(0);
    c.expect(f0.equation.p2.divisible_by(Polynomial{1, 5}) && !f0.equation.p2.divisible_by(Polynomial{6, 5}),
             "k=0 p2 does not carry (1+5a) in place of (6+5a)");
    c.expect(fitted_ansatz(4).equation.p0.divisible_by(Polynomial{9, 4}), "k=4 p0 lacks (9+4a)");
    c.notes << "ansatz validated on 2 held-out points for k=-1..4";
}

void criterion_6(Check& c)
{
    const StudyResult r = ratio_study_alpha(-1, 101);
    const double t = as_double(r.table.back().second);
    c.expect(std::abs(t - 0.419810) < 5e-7, "k=-1 terminal ratio " + fmt(t, 10));
    const StudyResult s = rebit_loglog_study(200);
    const double slope = as_double(s.fit->slope);
    c.expect(std::abs(slope - -0.523280) <= 1e-4, "rebit slope " + fmt(slope, 10) + " vs -0.523280");
    c.expect(std::abs(slope - std::log(16.0 / 27)) <= 2e-4, "rebit slope " + fmt(slope, 10) + " vs log(16/27)");
    c.notes << "terminal ratio " << fmt(t, 7) << ", slope " << fmt(slope, 9) << ", log(16/27) "
            << fmt(std::log(16.0 / 27), 9);
}

void criterion_7(Check& c)
{
    const McEstimate e = mc_estimate(0, Field::complex, 1000000, 7);
    c.expect(within_sigma(e.p_d_positive, e.p_d_positive_se, 4.0 / 33, 3), "complex P(D>0) = " + fmt(e.p_d_positive));
    c.expect(within_sigma(e.d_moments[0], e.d_moments_se[0], -2.0 / 969, 3), "E[D] = " + fmt(e.d_moments[0]));
    c.expect(within_sigma(e.pt_det_mean, e.pt_det_mean_se, -7.0 / 3876, 3), "E[|PT|] = " + fmt(e.pt_det_mean));
    const McEstimate r = mc_estimate(0, Field::real, 1000000, 8);
    c.expect(within_sigma(r.p_d_positive, r.p_d_positive_se, 29.0 / 128, 3), "real P(D>0) = " + fmt(r.p_d_positive));
    c.notes << "z-scores: " << fmt((e.p_d_positive - 4.0 / 33) / e.p_d_positive_se, 3) << ", "
            << fmt((e.d_moments[0] + 2.0 / 969) / e.d_moments_se[0], 3) << ", "
            << fmt((e.pt_det_mean + 7.0 / 3876) / e.pt_det_mean_se, 3) << ", "
            << fmt((r.p_d_positive - 29.0 / 128) / r.p_d_positive_se, 3);
}

Polynomial random_poly(std::mt19937_64& rng, int degree)
{
    std::uniform_int_distribution<long long> coef(-9, 9);
    std::vector<BigRational> v;
    for (int i = 0; i <= degree; ++i) v.emplace_back(coef(rng));
    if (v.back() == 0) v.back() = 1;
    return Polynomial(v);
}

void criterion_8(Check& c)
{
    for (int k : {-1, 0, 1, 2}) {
        for (const char* a : {"1/2", "1", "2"}) {
            c.expect(hankel_positive(moment_sequence(k, R(a), 20)),
                     "Hankel matrix not PSD at k=" + std::to_string(k) + " alpha=" + a);
        }
    }
    for (const char* a : {"1", "3/2", "2", "5/2", "3"}) {
        const BigRational alpha = R(a);
        const PrecReal lhs = concise_term(0, alpha, 40);
        const PrecReal rhs = concise_Q(0, alpha, 40) - concise_Q(0, alpha + 1, 40);
        WorkingPrecision wp(70);
        const Real tol = pow(Real(10), Real(lhs.abs_error_log10())) + pow(Real(10), Real(rhs.abs_error_log10()));
        c.expect(abs(lhs.value - rhs.value) <= tol && tol < Real("1e-30"), std::string("telescoping at alpha=") + a);
    }
    for (int k = -1; k <= 20; ++k) c.expect(g1(k, 1L) == 1, "g1(" + std::to_string(k) + ",1) != 1");

    std::mt19937_64 rng(8);
    int done = 0;
    while (done < 100) {
        const int d = static_cast<int>(rng() % 5);
        DifferenceEquation eq{0, random_poly(rng, d), random_poly(rng, d), random_poly(rng, d), 1,
                              BigRational(static_cast<long long>(rng() % 7) + 1, 3)};
        bool ok = true;
        for (long a = 1; a <= 61 && ok; ++a) ok = eq.p2(BigRational(a)) != 0;
        if (!ok) continue;
        const auto seq = iterate(eq, 60);
        if (std::all_of(seq.begin(), seq.end(), [&](const BigRational& v) { return v == seq[0]; })) continue;
        std::vector<std::pair<BigRational, BigRational>> pts;
        for (long i = 0; i <= 60; ++i) pts.emplace_back(BigRational(i + 1), seq[i]);
        const auto g = guess_first_order(pts, 4);
        c.expect(g && iterate(DifferenceEquation{0, g->p0, g->p1, g->p2, 1, seq[0]}, 60) == seq,
                 "round trip failed for random equation " + std::to_string(done));
        ++done;
    }

    auto stream = substream(8, 0);
    std::uint64_t violations = 0, involution = 0;
    for (int i = 0; i < 100000; ++i) {
        const ComplexMatrix4 rho = sample_density(0, i % 2 ? Field::complex : Field::real, stream);
        const ComplexMatrix4 pt = partial_transpose(rho);
        involution += partial_transpose(pt) != rho;
        const double det_pt = determinant4(pt).real();
        violations += (det_pt - determinant4(rho).real() > 0) && !(det_pt > 0);
    }
    c.expect(involution == 0, "partial transpose is not an involution on " + std::to_string(involution) + " samples");
    c.expect(violations == 0, "D > 0 without |PT| > 0 on " + std::to_string(violations) + " samples");
    c.notes << "100 random recurrences, 1e5 samples";
}

struct Criterion {
    std::string id;
    std::string title;
    double budget_seconds; // 0: no runtime limit
    std::function<void(Check&)> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {"1", "exact recurrence values", 1, criterion_1},
        {"2", "concise-formula identities", 10, criterion_2},
        {"3", "rebit closed form and real Monte Carlo", 300, criterion_3},
        {"4a", "density monotone refinement", 600, criterion_4a},
        {"4b", "density rationalization", 0, criterion_4b},
        {"5", "recurrence reconstruction", 300, criterion_5},
        {"6", "asymptotic ratio and rebit slope", 60, criterion_6},
        {"7", "Monte Carlo oracle", 600, criterion_7},
        {"8", "property suites", 300, criterion_8},
    };
    std::vector<std::string> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--n4b" && i + 1 < argc) {
            n4b = static_cast<unsigned>(std::stoul(argv[++i]));
            if (n4b > 15801) {
                std::cerr << "--n4b is limited to 15801\n";
                return 2;
            }
        } else {
            selected.push_back(a);
        }
    }
    for (const auto& s : selected) {
        if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.id == s; })) {
            std::cerr << "unknown criterion '" << s << "'\n";
            return 2;
        }
    }
    int failed = 0;
    for (const auto& crit : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), crit.id) == selected.end()) continue;
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            crit.run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (crit.budget_seconds > 0 && secs > crit.budget_seconds) {
            c.failures.push_back("runtime " + fmt(secs, 3) + " s exceeds " + fmt(crit.budget_seconds, 3) + " s");
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << crit.id << " (" << crit.title << ", " << fmt(secs, 3)
                  << " s): " << c.notes.str();
        for (const auto& f : c.failures) std::cout << "\n    " << f;
        std::cout << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

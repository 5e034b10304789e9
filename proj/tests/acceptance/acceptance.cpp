// Acceptance checks.  Each criterion prints one line:
//   criterion <n> <name>: PASS|FAIL  <measured values>
// Run one criterion with --criterion <n>, or all of them with no arguments.
// The exit status is nonzero when any selected criterion fails.

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "primelab/errors.hpp"
#include "primelab/exactdist.hpp"
#include "primelab/generators.hpp"
#include "primelab/harness.hpp"
#include "primelab/metrics.hpp"
#include "primelab/ntheory.hpp"
#include "primelab/report.hpp"
#include "primelab/rng.hpp"

using namespace primelab;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [fail]");
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

GenConfig config(Algorithm algo, Nat x) {
    GenConfig c;
    c.algorithm = algo;
    c.x = x;
    c.seed = kSeed;
    return c;
}

double chi2_critical(unsigned df, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), alpha));
}

FiniteDist<double> empirical(const PrimeGenerator& gen, Nat pi_x, std::uint64_t runs) {
    return empirical_dist<double>(pi_x, run_trials(gen, runs, 0).outputs);
}

FiniteDist<Rational> random_pmf(std::mt19937_64& rng) {
    std::uniform_int_distribution<Nat> size_dist(1, 64);
    std::uniform_int_distribution<unsigned long> weight_dist(0, 1000);
    const Nat space = size_dist(rng);
    std::uniform_int_distribution<Nat> stored_dist(1, space);
    const Nat stored = stored_dist(rng);
    std::vector<unsigned long> w(stored);
    unsigned long total = 0;
    while (total == 0) {
        total = 0;
        for (auto& v : w) {
            v = weight_dist(rng) * (weight_dist(rng) % 4 == 0 ? 0 : 1);
            total += v;
        }
    }
    std::vector<FiniteDist<Rational>::Outcome> outcomes;
    for (Nat i = 0; i < stored; ++i) {
        Rational m(w[i], total);
        m.canonicalize();
        outcomes.emplace_back(i, m);
    }
    return FiniteDist<Rational>(space, std::move(outcomes));
}

Outcome criterion1() {
    Outcome out;
    std::mt19937_64 rng(kSeed);
    int relations_ok = 0;
    int oracle_ok = 0;
    constexpr int kCases = 1000;
    for (int i = 0; i < kCases; ++i) {
        const auto d = random_pmf(rng);
        const auto m = metrics_of(d);
        const Rational s(static_cast<unsigned long>(d.space_size()));
        const Rational u = 1 / s;
        const bool direct = m.beta == u + m.delta2_sq && m.gamma * m.gamma <= m.beta && m.beta <= m.gamma &&
                            m.gamma <= u + m.delta1 && m.delta1 * m.delta1 <= m.delta2_sq * s;
        if (direct && check_relations(m).all()) {
            ++relations_ok;
        }
        oracle::Pmf pmf;
        for (const auto& [o, mass] : d.outcomes()) {
            pmf[o] = mass;
        }
        const auto ref = oracle::metrics(pmf, d.space_size());
        if (ref.delta1 == m.delta1 && ref.delta2_sq == m.delta2_sq && ref.beta == m.beta && ref.gamma == m.gamma) {
            ++oracle_ok;
        }
    }
    out.check(relations_ok == kCases, "relations hold exactly in " + std::to_string(relations_ok) + "/1000");
    out.check(oracle_ok == kCases, "metrics match oracle in " + std::to_string(oracle_ok) + "/1000");
    return out;
}

Outcome criterion2() {
    Outcome out;
    auto small = make_shared_table(30);
    const auto exact = exact_dist_basic<Rational>(*small, 30, 6);
    bool hand = exact.dist.space_size() == 10;
    for (Nat p : {7, 13, 19}) {
        hand = hand && exact.dist.mass_of(p) == Rational(1, 6);
    }
    for (Nat p : {5, 11, 17, 23, 29}) {
        hand = hand && exact.dist.mass_of(p) == Rational(1, 10);
    }
    hand = hand && exact.dist.mass_of(2) == 0 && exact.dist.mass_of(3) == 0;
    out.check(hand, "x=30 q=6 masses match hand derivation");
    const auto m = metrics_of(exact.dist);
    out.check(m.delta1 == Rational(2, 5), "delta1=" + m.delta1.get_str() + " (want 2/5)");

    auto table = make_shared_table(1000);
    GenConfig c = config(Algorithm::Basic, 1000);
    c.modulus_mode = ModulusMode::Explicit;
    c.q = 30;
    const PrimeGenerator gen(c, table);
    const auto law = to_double(exact_dist_basic<Rational>(*table, 1000, 30).dist);
    const double tv = tv_between(empirical(gen, table->prime_count_upto(1000), 1'000'000), law);
    out.check(tv < 0.01, "x=1000 q=30 TV(empirical 1e6, exact)=" + fmt(tv) + " < 0.01");
    return out;
}

Outcome criterion3() {
    Outcome out;
    auto table = make_shared_table(1'000'000);
    GenConfig c = config(Algorithm::Basic, 1'000'000);
    c.epsilon = 0.3;
    BenchmarkOptions opt;
    opt.threads = 0;
    opt.table = table;
    const auto r = benchmark(c, 10'000, opt);
    const Nat q = r.modulus.value_or(0);
    out.check(q == 2310, "q=" + std::to_string(q));
    const double density = static_cast<double>(euler_phi(q)) / static_cast<double>(q);
    const double lx = std::log(1e6);
    const double want_iter = density * lx;
    const double want_bits = 0.3 * density * lx * lx / std::numbers::ln2;
    const double iter_err = std::abs(r.mean_iterations - want_iter) / want_iter;
    const double bits_err = std::abs(r.mean_loop_bits - want_bits) / want_bits;
    out.check(iter_err <= 0.10, "mean iterations " + fmt(r.mean_iterations) + " vs " + fmt(want_iter) +
                                    " (rel err " + fmt(iter_err) + " <= 0.10)");
    out.check(bits_err <= 0.25, "mean loop bits " + fmt(r.mean_loop_bits) + " vs " + fmt(want_bits) +
                                    " (rel err " + fmt(bits_err) + " <= 0.25)");
    out.detail << "; total bits " << fmt(r.mean_bits) << ", information bits " << fmt(r.mean_information_bits)
               << ", effective epsilon " << fmt(r.effective_epsilon.value_or(0.0));
    return out;
}

Outcome criterion4() {
    Outcome out;
    auto table = make_shared_table(1'000'000);
    BenchmarkOptions opt;
    opt.threads = 0;
    opt.table = table;
    GenConfig basic = config(Algorithm::Basic, 1'000'000);
    basic.epsilon = 0.3;
    const auto rb = benchmark(basic, 10'000, opt);
    const auto rt = benchmark(config(Algorithm::Trivial, 1'000'000), 10'000, opt);
    const double ratio = rb.mean_bits / rt.mean_bits;
    out.check(ratio < 0.5, "basic/trivial generation bits " + fmt(rb.mean_bits) + "/" + fmt(rt.mean_bits) + " = " +
                               fmt(ratio) + " < 0.5");

    GenConfig uncond = config(Algorithm::Uncond, 1'000'000);
    uncond.A = 2.0;
    const auto ru = benchmark(uncond, 10'000, opt);
    const double per_u = ru.mean_loop_bits / ru.mean_iterations;
    const double per_b = rb.mean_loop_bits / rb.mean_iterations;
    out.check(per_u < per_b, "bits per iteration uncond " + fmt(per_u) + " < basic " + fmt(per_b));
    return out;
}

Outcome criterion5() {
    Outcome out;
    auto table = make_shared_table(10'000'000);
    const auto audit = primeinc_audit(table, 1'000'000, 100'000, kSeed, 0);
    out.check(audit.bound_holds, "exact delta1 " + fmt(audit.delta1) + " > (ln x/x) F = " + fmt(audit.lower_bound) +
                                     " (F=" + std::to_string(audit.F) + ")");
    const auto census = gap_census(*table, 10'000'000, {2.0});
    const double norm = census.normalized.front();
    const double share = static_cast<double>(census.F_values.front()) / static_cast<double>(census.pi_x);
    out.check(norm >= 0.78 && norm <= 0.95,
              "normalized census at lambda=2, x=1e7: " + fmt(norm) + " in [0.78, 0.95] (reference " +
                  fmt(census.reference.front()) + ", F/pi(x) " + fmt(share) + ")");
    out.check(audit.twin_ratio < 0.5, "twin-upper ratio " + fmt(audit.twin_ratio) + " < 0.5 (empirical " +
                                          fmt(audit.empirical_twin_fraction) + ", uniform " +
                                          fmt(audit.uniform_twin_fraction) + ")");
    return out;
}

Outcome criterion6() {
    Outcome out;
    auto table = make_shared_table(5000);
    const auto exact = exact_dist_uncond_nofallback<Rational>(*table, 200, 1.0);
    out.check(exact.dist.total_mass() == 1, "x=200 A=1 total mass " + exact.dist.total_mass().get_str());
    const auto ref = oracle::uncond(200, oracle::uncond_Q(200, 1.0), std::nullopt);
    bool same = true;
    for (const auto& [p, mass] : exact.dist.outcomes()) {
        const auto it = ref.find(p);
        same = same && (it == ref.end() ? mass == 0 : it->second == mass);
    }
    out.check(same, "matches enumeration oracle");

    // Runs that draw an empty (q, a) pair never terminate; a 1000-iteration cap discards
    // them, which is the conditioning the exact law applies.  A non-empty class here has at
    // most 11 candidates, so it survives 1000 draws unhit with probability below 1e-40.
    GenConfig c = config(Algorithm::UncondNoFallback, 200);
    c.A = 1.0;
    c.iteration_cap = 1000;
    const PrimeGenerator gen(c, table);
    constexpr std::uint64_t kRuns = 10'000'000;
    std::map<Nat, std::uint64_t> counts;
    std::uint64_t discarded = 0;
    for (std::uint64_t i = 0; i < kRuns; ++i) {
        try {
            ++counts[gen.run_trial(i).prime];
        } catch (const NonTerminationError&) {
            ++discarded;
        }
    }
    const auto observed = empirical_dist<double>(table->prime_count_upto(200), counts);
    const double tv = tv_between(observed, to_double(exact.dist));
    out.check(tv < 0.01, "TV(empirical 1e7, exact)=" + fmt(tv) + " < 0.01 (" + std::to_string(discarded) +
                             " runs on empty pairs discarded)");

    const auto d1 = metrics_of(exact_dist_uncond_nofallback<Rational>(*table, 5000, 1.0).dist).delta1;
    const auto d3 = metrics_of(exact_dist_uncond_nofallback<Rational>(*table, 5000, 3.0).dist).delta1;
    out.check(d3 < d1, "x=5000 delta1(A=3)=" + fmt(d3.get_d()) + " < delta1(A=1)=" + fmt(d1.get_d()));
    return out;
}

Outcome criterion7() {
    Outcome out;
    auto table = make_shared_table(30);

    GenConfig c = config(Algorithm::ErhFallback, 30);
    c.modulus_mode = ModulusMode::Explicit;
    c.q = 25;
    const PrimeGenerator gen(c, table);
    const auto empty = exact_dist_basic<Rational>(*table, 30, 25).empty_classes.size();
    const auto agg = run_trials(gen, 10'000, 0);
    bool primes_ok = true;
    for (const auto& [p, n] : agg.outputs) {
        primes_ok = primes_ok && p <= 30 && table->is_prime(p);
    }
    out.check(empty > 0 && agg.trials == 10'000 && agg.fallbacks > 0 && primes_ok,
              "q=25 with " + std::to_string(empty) + " empty classes: 10000 runs terminated, " +
                  std::to_string(agg.fallbacks) + " via fallback");

    const auto basic = exact_dist_basic<Rational>(*table, 30, 6);
    const Rational basic_d1 = metrics_of(basic.dist).delta1;
    for (std::uint64_t T : {1, 10, 100}) {
        const Rational d1 = metrics_of(exact_dist_erh_fallback<Rational>(*table, 30, 6, T).dist).delta1;
        out.check(d1 <= basic_d1, "T=" + std::to_string(T) + " delta1 " + fmt(d1.get_d()) +
                                      " <= basic " + fmt(basic_d1.get_d()));
    }
    const auto limit = exact_dist_erh_fallback<double>(*table, 30, 6, 10'000);
    const double gap = tv_between(limit.dist, to_double(basic.dist));
    out.check(gap < 1e-12, "T=10000 distance to basic " + fmt(gap) + " < 1e-12");
    return out;
}

Outcome criterion8() {
    Outcome out;
    auto table = make_shared_table(100);
    out.check(table->prime_count_upto(100) == 25, "pi(100)=" + std::to_string(table->prime_count_upto(100)));
    out.check(count_ap_primes(*table, 3, 1) == 11, "pi(100;3,1)=" + std::to_string(count_ap_primes(*table, 3, 1)));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double phi_ratio = static_cast<double>(totient_partial_sum(10'000)) / (3e8 / pi2);
    out.check(phi_ratio >= 0.99 && phi_ratio <= 1.01, "Phi(1e4) ratio " + fmt(phi_ratio));
    const double f_ratio = static_cast<double>(pair_count(10'000)) / (9.0 / (4.0 * pi2) * 1e8);
    out.check(f_ratio >= 0.95 && f_ratio <= 1.05, "F(1e4) ratio " + fmt(f_ratio));

    const Modulus m = make_modulus(30);
    CountingBitSource src(kSeed);
    std::map<Nat, std::uint64_t> counts;
    constexpr std::uint64_t kDraws = 100'000;
    for (std::uint64_t i = 0; i < kDraws; ++i) {
        ++counts[sample_unit(src, m, UnitMethod::JoyePaillier)];
    }
    double chi2 = 0.0;
    const double expect = static_cast<double>(kDraws) / static_cast<double>(m.phi);
    bool units_only = counts.size() == m.phi;
    for (const auto& [a, n] : counts) {
        units_only = units_only && std::gcd(a, Nat{30}) == 1;
        chi2 += (static_cast<double>(n) - expect) * (static_cast<double>(n) - expect) / expect;
    }
    const double crit = chi2_critical(static_cast<unsigned>(m.phi - 1), 1e-6);
    out.check(units_only && chi2 < crit, "Joye-Paillier chi2 over (Z/30Z)* " + fmt(chi2) + " < " + fmt(crit));
    return out;
}

Outcome criterion9() {
    Outcome out;
    auto table = make_shared_table(10'000);
    for (const Algorithm algo : {Algorithm::Trivial, Algorithm::PrimeInc, Algorithm::Basic, Algorithm::ErhFallback,
                                 Algorithm::Uncond, Algorithm::UncondNoFallback}) {
        GenConfig c = config(algo, 10'000);
        if (uses_fixed_modulus(algo)) {
            c.epsilon = 0.3;
        }
        if (uses_random_modulus(algo)) {
            c.A = 2.0;
        }
        BenchmarkOptions opt;
        opt.keep_trials = true;
        opt.with_metrics = true;
        opt.threads = 1;
        const std::string first = to_json(benchmark(c, 5000, opt)).dump(2);
        const std::string second = to_json(benchmark(c, 5000, opt)).dump(2);
        opt.threads = 4;
        opt.table = table;
        const std::string threaded = to_json(benchmark(c, 5000, opt)).dump(2);
        out.check(first == second && first == threaded,
                  std::string(to_string(algo)) + " " + std::to_string(first.size()) + " bytes identical");
    }
    return out;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"collision and min-entropy relations", criterion1},
        {"fixed-modulus generator against its exact law", criterion2},
        {"iteration and bit budget", criterion3},
        {"randomness savings", criterion4},
        {"PRIMEINC bias", criterion5},
        {"random-modulus closed form", criterion6},
        {"fallback correctness", criterion7},
        {"number-theory core", criterion8},
        {"reproducible reports", criterion9},
    };

    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            const int n = std::atoi(argv[++i]);
            if (n < 1 || n > static_cast<int>(criteria.size())) {
                std::cerr << "unknown criterion " << argv[i] << "\n";
                return 2;
            }
            selected.push_back(static_cast<std::size_t>(n - 1));
        } else {
            std::cerr << "usage: " << argv[0] << " [--criterion N]...\n";
            return 2;
        }
    }
    if (selected.empty()) {
        for (std::size_t i = 0; i < criteria.size(); ++i) {
            selected.push_back(i);
        }
    }

    bool all = true;
    for (const std::size_t i : selected) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.check(false, std::string(error_kind(e)) + ": " + e.what());
        }
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        all = all && out.pass;
        std::cout << "criterion " << (i + 1) << " " << criteria[i].name << ": " << (out.pass ? "PASS" : "FAIL")
                  << "  " << out.detail.str() << " (" << fmt(took.count()) << " s)" << std::endl;
    }
    return all ? 0 : 1;
}

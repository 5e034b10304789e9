#include "primelab/harness.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "primelab/errors.hpp"

namespace primelab {

namespace {

struct BlockResult {
    TrialAggregate agg;
    std::vector<TrialRecord> records;
    std::exception_ptr error;
    std::uint64_t failed_trial = 0;
};

void run_block(const PrimeGenerator& gen, std::uint64_t first, std::uint64_t last, bool keep, BlockResult& out) {
    for (std::uint64_t i = first; i < last; ++i) {
        GenResult r;
        try {
            r = gen.run_trial(i);
        } catch (...) {
            out.error = std::current_exception();
            out.failed_trial = i;
            return;
        }
        const Telemetry& t = r.telemetry;
        ++out.agg.trials;
        out.agg.iterations += t.loop_iterations;
        out.agg.primality_tests += t.primality_tests;
        out.agg.bits += t.bits_consumed;
        out.agg.setup_bits += t.setup_bits;
        out.agg.information_bits += t.information_bits;
        out.agg.fallbacks += t.fallback_entered ? 1 : 0;
        ++out.agg.outputs[r.prime];
        if (keep) {
            out.records.push_back({i, r.prime, t});
        }
    }
}

[[noreturn]] void rethrow_with_trial(const std::exception_ptr& error, std::uint64_t trial) {
    try {
        std::rethrow_exception(error);
    } catch (const std::exception& e) {
        throw TrialError(trial, error_kind(e), e.what());
    }
}

double ln(Nat x) { return std::log(static_cast<double>(x)); }

}  // namespace

TrialAggregate run_trials(const PrimeGenerator& gen, std::uint64_t trials, unsigned threads,
                          std::vector<TrialRecord>* records) {
    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<BlockResult> results(blocks);
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> first_failed{blocks};

    auto worker = [&] {
        while (true) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks || b > first_failed.load()) {
                return;
            }
            const std::uint64_t lo = b * kTrialBlock;
            run_block(gen, lo, std::min(trials, lo + kTrialBlock), records != nullptr, results[b]);
            if (results[b].error) {
                std::uint64_t seen = first_failed.load();
                while (b < seen && !first_failed.compare_exchange_weak(seen, b)) {
                }
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(blocks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    TrialAggregate total;
    for (auto& r : results) {
        if (r.error) {
            rethrow_with_trial(r.error, r.failed_trial);
        }
        total.trials += r.agg.trials;
        total.iterations += r.agg.iterations;
        total.primality_tests += r.agg.primality_tests;
        total.bits += r.agg.bits;
        total.setup_bits += r.agg.setup_bits;
        total.information_bits += r.agg.information_bits;
        total.fallbacks += r.agg.fallbacks;
        for (const auto& [p, c] : r.agg.outputs) {
            total.outputs[p] += c;
        }
        if (records) {
            records->insert(records->end(), r.records.begin(), r.records.end());
        }
    }
    return total;
}

std::pair<std::optional<double>, std::optional<double>> predicted_costs(const PrimeGenerator& gen) {
    const GenConfig& cfg = gen.config();
    const double lx = ln(cfg.x);
    switch (cfg.algorithm) {
        case Algorithm::Trivial:
            return {lx, lx * lx / std::log(2.0)};
        case Algorithm::PrimeInc:
            return {std::nullopt, std::nullopt};
        case Algorithm::Basic:
        case Algorithm::ErhFallback: {
            const Modulus& m = *gen.modulus();
            const double density = static_cast<double>(m.phi) / static_cast<double>(m.q);
            const double eps = cfg.epsilon.value_or(1.0 - std::log(static_cast<double>(m.q)) / lx);
            return {density * lx, eps * density * lx * lx / std::log(2.0)};
        }
        case Algorithm::Uncond:
        case Algorithm::UncondNoFallback: {
            // Redrawing both q and a on a gcd failure selects q with weight phi(q)/q.
            const Nat Q = gen.modulus_range();
            const auto phi = totient_table(Q);
            double weighted = 0.0;
            double total = 0.0;
            for (Nat q = Q / 2 + 1; q <= Q; ++q) {
                const double w = static_cast<double>(phi[q]) / static_cast<double>(q);
                weighted += w * w;
                total += w;
            }
            const double density = weighted / total;
            return {density * lx, *cfg.A * density * lx * std::log(lx) / std::log(2.0)};
        }
    }
    return {std::nullopt, std::nullopt};
}

RunReport benchmark(const GenConfig& cfg, std::uint64_t trials, const BenchmarkOptions& options) {
    if (trials == 0) {
        throw DomainError("benchmark needs at least one trial");
    }
    std::shared_ptr<const PrimeTable> table = options.table;
    if (options.with_metrics && (!table || !table->covers(cfg.x))) {
        table = make_shared_table(cfg.x);
    }
    const PrimeGenerator gen(cfg, table);

    RunReport report;
    report.config = gen.config();
    report.trials = trials;
    const TrialAggregate agg =
        run_trials(gen, trials, options.threads, options.keep_trials ? &report.per_trial : nullptr);
    const double n = static_cast<double>(trials);
    report.mean_iterations = static_cast<double>(agg.iterations) / n;
    report.mean_bits = static_cast<double>(agg.bits) / n;
    report.mean_loop_bits = static_cast<double>(agg.bits - agg.setup_bits) / n;
    report.mean_information_bits = agg.information_bits / n;
    report.mean_primality_tests = static_cast<double>(agg.primality_tests) / n;
    report.fallback_rate = static_cast<double>(agg.fallbacks) / n;
    if (gen.modulus()) {
        report.modulus = gen.modulus()->q;
        report.effective_epsilon = 1.0 - std::log(static_cast<double>(gen.modulus()->q)) / ln(cfg.x);
    }
    if (uses_random_modulus(cfg.algorithm)) {
        report.modulus_range = gen.modulus_range();
    }
    std::tie(report.predicted_iterations, report.predicted_bits) = predicted_costs(gen);
    if (options.with_metrics) {
        const Nat pi_x = table->prime_count_upto(cfg.x);
        report.metrics = metrics_of(empirical_dist<double>(pi_x, agg.outputs));
    }
    return report;
}

Nat gap_count_upto(const PrimeTable& table, Nat x, double h) {
    if (x > table.bound()) {
        throw DomainError("x exceeds the prime table bound");
    }
    const auto primes = table.primes().first(table.prime_count_upto(x));
    Nat count = 0;
    for (std::size_t i = 1; i < primes.size(); ++i) {
        if (static_cast<double>(primes[i] - primes[i - 1]) <= h) {
            ++count;
        }
    }
    return count;
}

GapCensus gap_census(const PrimeTable& table, Nat x, const std::vector<double>& lambdas) {
    if (x < 100) {
        throw DomainError("gap_census needs x >= 100");
    }
    GapCensus census;
    census.x = x;
    census.pi_x = table.prime_count_upto(x);
    census.lambdas = lambdas;
    const double lx = ln(x);
    for (const double lambda : lambdas) {
        if (!(lambda >= 0.0)) {
            throw DomainError("gap_census: lambda must be >= 0");
        }
        const Nat F = gap_count_upto(table, x, lambda * lx);
        census.F_values.push_back(F);
        census.normalized.push_back(static_cast<double>(F) * lx / static_cast<double>(x));
        census.reference.push_back(1.0 - std::exp(-lambda));
    }
    return census;
}

bool exceeds_log_bound(const Rational& value, Nat x, Nat F) {
    for (mpfr_prec_t prec = 128; prec <= (1 << 16); prec *= 2) {
        mpfr_t lo, hi;
        mpfr_inits2(prec, lo, hi, static_cast<mpfr_ptr>(nullptr));
        // lo <= ln(x) F / x <= hi
        mpfr_set_ui(lo, static_cast<unsigned long>(x), MPFR_RNDN);
        mpfr_set_ui(hi, static_cast<unsigned long>(x), MPFR_RNDN);
        mpfr_log(lo, lo, MPFR_RNDD);
        mpfr_log(hi, hi, MPFR_RNDU);
        mpfr_mul_ui(lo, lo, static_cast<unsigned long>(F), MPFR_RNDD);
        mpfr_mul_ui(hi, hi, static_cast<unsigned long>(F), MPFR_RNDU);
        mpfr_div_ui(lo, lo, static_cast<unsigned long>(x), MPFR_RNDD);
        mpfr_div_ui(hi, hi, static_cast<unsigned long>(x), MPFR_RNDU);
        const int above_hi = mpfr_cmp_q(hi, value.get_mpq_t()) < 0;
        const int not_above_lo = mpfr_cmp_q(lo, value.get_mpq_t()) >= 0;
        mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr));
        if (above_hi) {
            return true;
        }
        if (not_above_lo) {
            return false;
        }
    }
    throw ResourceLimitError("exceeds_log_bound: comparison undecided at 65536 bits");
}

PrimeIncAudit primeinc_audit(const std::shared_ptr<const PrimeTable>& table, Nat x, std::uint64_t trials,
                             std::uint64_t seed, unsigned threads) {
    if (!table || !table->covers(x) || x < 3) {
        throw DomainError("primeinc_audit needs x >= 3 within the prime table");
    }
    const auto primes = table->primes().first(table->prime_count_upto(x));
    PrimeIncAudit audit;
    audit.x = x;
    audit.pi_x = primes.size();
    audit.p_max = primes.back();

    // Delta1 = sum |d(p)/p_max - 1/pi(x)| = sum |d(p) pi(x) - p_max| / (p_max pi(x)).
    mpz_class numerator = 0;
    Nat previous = 0;
    Nat twin_mass = 0;
    for (const Nat p : primes) {
        const Nat d = p - previous;
        const Nat scaled = d * audit.pi_x;
        numerator += mpz_class(static_cast<unsigned long>(scaled > audit.p_max ? scaled - audit.p_max : audit.p_max - scaled));
        if (previous != 0 && d == 2) {  // p - 2 prime
            ++audit.twin_uppers;
            twin_mass += d;
        }
        previous = p;
    }
    audit.exact_delta1 = Rational(numerator, mpz_class(static_cast<unsigned long>(audit.p_max)) *
                                                 mpz_class(static_cast<unsigned long>(audit.pi_x)));
    audit.exact_delta1.canonicalize();
    audit.delta1 = audit.exact_delta1.get_d();

    const double lx = ln(x);
    audit.gap_threshold = 2.0 * lx;
    audit.F = gap_count_upto(*table, x, audit.gap_threshold);
    audit.lower_bound = lx * static_cast<double>(audit.F) / static_cast<double>(x);
    audit.bound_holds = exceeds_log_bound(audit.exact_delta1, x, audit.F);

    audit.uniform_twin_fraction = static_cast<double>(audit.twin_uppers) / static_cast<double>(audit.pi_x);
    audit.exact_twin_fraction = static_cast<double>(twin_mass) / static_cast<double>(audit.p_max);

    audit.trials = trials;
    audit.seed = seed;
    if (trials > 0) {
        GenConfig cfg;
        cfg.algorithm = Algorithm::PrimeInc;
        cfg.x = x;
        cfg.seed = seed;
        const PrimeGenerator gen(cfg, table);
        const TrialAggregate agg = run_trials(gen, trials, threads);
        std::uint64_t hits = 0;
        for (const auto& [p, c] : agg.outputs) {
            if (p > 3 && table->is_prime(p - 2)) {
                hits += c;
            }
        }
        audit.empirical_twin_fraction = static_cast<double>(hits) / static_cast<double>(trials);
        if (audit.uniform_twin_fraction > 0.0) {
            audit.twin_ratio = audit.empirical_twin_fraction / audit.uniform_twin_fraction;
        }
    }
    return audit;
}

ErrorProfile error_term_profile(const PrimeTable& table, Nat x, Nat q, std::optional<double> tau) {
    const ClassProfile cp = class_profile(table, x, q);
    ErrorProfile profile;
    profile.x = x;
    profile.q = q;
    profile.phi = cp.phi;
    profile.pi_x = cp.pi_x;
    profile.units = cp.units;
    profile.counts = cp.counts;
    profile.errors = cp.error_terms;
    profile.tau = tau.value_or(std::sqrt(static_cast<double>(cp.pi_x) / static_cast<double>(cp.phi)));
    Nat above = 0;
    for (const double e : cp.error_terms) {
        profile.max_error = std::max(profile.max_error, e);
        profile.mean_error += e;
        profile.sum_sq += e * e;
        above += e > profile.tau ? 1 : 0;
    }
    const double n = static_cast<double>(cp.error_terms.size());
    profile.mean_error /= n;
    profile.alpha = static_cast<double>(above) / n;
    return profile;
}

ErrorRangeProfile error_term_range_profile(const PrimeTable& table, Nat x, double A) {
    if (x > table.bound()) {
        throw DomainError("x exceeds the prime table bound");
    }
    ErrorRangeProfile profile;
    profile.x = x;
    profile.A = A;
    profile.Q = uncond_modulus_range(x, A);
    const auto primes = table.primes().first(table.prime_count_upto(x));
    const double pi_x = static_cast<double>(primes.size());
    const long double work = static_cast<long double>(profile.Q / 2) * pi_x;
    if (work > static_cast<long double>(kDefaultWorkCap)) {
        throw ResourceLimitError("error_term_range_profile: work above cap; use a larger A or a smaller x");
    }
    const auto phi = totient_table(profile.Q);
    std::vector<std::uint32_t> counts;
    for (Nat q = profile.Q / 2 + 1; q <= profile.Q; ++q) {
        counts.assign(q, 0);
        for (const Nat p : primes) {
            ++counts[p % q];
        }
        const double expected = pi_x / static_cast<double>(phi[q]);
        for (Nat a = 1; a < q; ++a) {
            if (std::gcd(a, q) == 1) {
                const double e = static_cast<double>(counts[a]) - expected;
                profile.double_sum += e * e;
            }
        }
        profile.pairs += phi[q];
    }
    const double Qd = static_cast<double>(profile.Q);
    profile.normalizer = static_cast<double>(x) * Qd / std::log(Qd);
    profile.ratio = profile.double_sum / profile.normalizer;
    return profile;
}

}  // namespace primelab

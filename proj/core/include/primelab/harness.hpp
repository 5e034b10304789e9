#pragma once

/// Experiment orchestration: resource benchmarks, the PRIMEINC bias audit, the
/// gap census and residue-class error profiles.
///
/// Trial i of a run with master seed s draws generation bits from Philox4x32-10
/// keyed by s on stream i, and Miller-Rabin bases (if any) from the policy seed on
/// stream i | 2^63.  Trials are folded in blocks of kTrialBlock in index order, so
/// results do not depend on the number of worker threads.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "primelab/exactdist.hpp"
#include "primelab/generators.hpp"
#include "primelab/metrics.hpp"

namespace primelab {

inline constexpr std::uint64_t kTrialBlock = 4096;

struct TrialRecord {
    std::uint64_t index = 0;
    Nat prime = 0;
    Telemetry telemetry;

    bool operator==(const TrialRecord&) const = default;
};

struct RunReport {
    GenConfig config;
    std::uint64_t trials = 0;
    double mean_iterations = 0.0;
    double mean_bits = 0.0;
    double mean_loop_bits = 0.0;
    double mean_information_bits = 0.0;
    double mean_primality_tests = 0.0;
    double fallback_rate = 0.0;
    std::optional<Nat> modulus;            // fixed-modulus variants
    std::optional<Nat> modulus_range;      // Q for the random-modulus variants
    std::optional<double> effective_epsilon;
    std::optional<double> predicted_iterations;
    std::optional<double> predicted_bits;
    std::optional<DistMetrics<double>> metrics;  // of the empirical output distribution
    std::vector<TrialRecord> per_trial;

    bool operator==(const RunReport&) const = default;
};

struct BenchmarkOptions {
    bool keep_trials = false;
    bool with_metrics = false;
    unsigned threads = 1;  // 0 = hardware concurrency
    std::shared_ptr<const PrimeTable> table;  // built on demand when with_metrics is set
};

/// Sum of telemetry over a batch of trials plus the output histogram.
struct TrialAggregate {
    std::uint64_t trials = 0;
    std::uint64_t iterations = 0;
    std::uint64_t primality_tests = 0;
    std::uint64_t bits = 0;
    std::uint64_t setup_bits = 0;
    double information_bits = 0.0;
    std::uint64_t fallbacks = 0;
    std::map<Nat, std::uint64_t> outputs;
};

/// Runs trials [0, trials) of `gen`.  Errors carry the failing trial index.
TrialAggregate run_trials(const PrimeGenerator& gen, std::uint64_t trials, unsigned threads = 1,
                          std::vector<TrialRecord>* records = nullptr);

RunReport benchmark(const GenConfig& cfg, std::uint64_t trials, const BenchmarkOptions& options = {});

/// predicted_iterations / predicted_bits for a configuration; empty for PRIMEINC.
std::pair<std::optional<double>, std::optional<double>> predicted_costs(const PrimeGenerator& gen);

struct GapCensus {
    Nat x = 0;
    Nat pi_x = 0;
    std::vector<double> lambdas;
    std::vector<Nat> F_values;         // F_{lambda ln x}(x)
    std::vector<double> normalized;    // F ln x / x
    std::vector<double> reference;     // 1 - e^{-lambda}
};

/// Primes p <= x whose gap to the previous prime is <= h (p = 2 has no predecessor).
Nat gap_count_upto(const PrimeTable& table, Nat x, double h);

GapCensus gap_census(const PrimeTable& table, Nat x, const std::vector<double>& lambdas);

struct PrimeIncAudit {
    Nat x = 0;
    Nat pi_x = 0;
    Nat p_max = 0;
    Rational exact_delta1;
    double delta1 = 0.0;
    double gap_threshold = 0.0;  // 2 ln x
    Nat F = 0;                   // F_{2 ln x}(x)
    double lower_bound = 0.0;    // (ln x / x) F
    bool bound_holds = false;    // delta1 > lower_bound, decided exactly
    Nat twin_uppers = 0;         // primes p <= x with p - 2 prime
    double uniform_twin_fraction = 0.0;
    double exact_twin_fraction = 0.0;  // under the exact PRIMEINC distribution
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double empirical_twin_fraction = 0.0;
    double twin_ratio = 0.0;     // empirical / uniform
};

/// True iff value > (ln x) F / x, decided with interval arithmetic (never by rounding).
bool exceeds_log_bound(const Rational& value, Nat x, Nat F);

PrimeIncAudit primeinc_audit(const std::shared_ptr<const PrimeTable>& table, Nat x, std::uint64_t trials,
                             std::uint64_t seed, unsigned threads = 1);

struct ErrorProfile {
    Nat x = 0;
    Nat q = 0;
    Nat phi = 0;
    Nat pi_x = 0;
    std::vector<Nat> units;
    std::vector<Nat> counts;
    std::vector<double> errors;
    double max_error = 0.0;
    double mean_error = 0.0;
    double sum_sq = 0.0;
    double tau = 0.0;
    double alpha = 0.0;  // fraction of units with E > tau
};

/// Fixed modulus; tau defaults to sqrt(pi(x)/phi(q)).
ErrorProfile error_term_profile(const PrimeTable& table, Nat x, Nat q, std::optional<double> tau = std::nullopt);

struct ErrorRangeProfile {
    Nat x = 0;
    double A = 0.0;
    Nat Q = 0;
    Nat pairs = 0;             // F(Q)
    double double_sum = 0.0;   // sum over Q/2 < q <= Q, a unit, of E(x;q,a)^2
    double normalizer = 0.0;   // x Q / ln Q
    double ratio = 0.0;
};

ErrorRangeProfile error_term_range_profile(const PrimeTable& table, Nat x, double A);

}  // namespace primelab

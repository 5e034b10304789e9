#pragma once

/// Prime generators: the trivial sampler, PRIMEINC, and four residue-class
/// generators (basic, ERH fallback, unconditional with and without fallback).
/// Every generator returns the prime together with the resources it used.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "primelab/ntheory.hpp"
#include "primelab/rng.hpp"

namespace primelab {

enum class Algorithm { Trivial, PrimeInc, Basic, ErhFallback, Uncond, UncondNoFallback };
enum class ModulusMode { Primorial, PowerOfTwo, Explicit };
enum class UnitMethod { Rejection, JoyePaillier };

std::string_view to_string(Algorithm a);
std::string_view to_string(ModulusMode m);
std::string_view to_string(UnitMethod m);
Algorithm parse_algorithm(std::string_view s);
ModulusMode parse_modulus_mode(std::string_view s);
UnitMethod parse_unit_method(std::string_view s);

bool uses_fixed_modulus(Algorithm a);
bool uses_random_modulus(Algorithm a);

struct GenConfig {
    Algorithm algorithm = Algorithm::Basic;
    Nat x = 0;                              // primes are <= x
    std::optional<double> epsilon;          // Basic, ErhFallback (unless modulus is explicit)
    ModulusMode modulus_mode = ModulusMode::Primorial;
    std::optional<Nat> q;                   // Explicit modulus
    std::optional<double> A;                // Uncond, UncondNoFallback
    std::optional<std::uint64_t> T_override;
    std::uint64_t seed = 0;
    PrimalityPolicy primality;
    UnitMethod unit_method = UnitMethod::JoyePaillier;
    std::optional<std::uint64_t> iteration_cap;

    /// Throws ConfigError describing the first problem found.
    void validate() const;

    bool operator==(const GenConfig&) const = default;
};

struct Telemetry {
    std::uint64_t loop_iterations = 0;  // candidates examined, fallback included
    std::uint64_t primality_tests = 0;
    std::uint64_t bits_consumed = 0;    // all generation bits, setup included
    std::uint64_t setup_bits = 0;       // bits spent choosing the modulus and unit
    double information_bits = 0.0;      // sum of log2(range) over generation draws
    bool fallback_entered = false;
    Nat chosen_q = 0;
    Nat chosen_a = 0;

    std::uint64_t loop_bits() const { return bits_consumed - setup_bits; }

    bool operator==(const Telemetry&) const = default;
};

struct GenResult {
    Nat prime = 0;
    Telemetry telemetry;
};

/// Largest admissible modulus <= x^(1 - epsilon) for the mode, or the validated explicit q.
/// Throws ConfigError when the bound is below 3 or the resulting q is outside [2, x).
Modulus select_modulus(Nat x, double epsilon, ModulusMode mode, std::optional<Nat> explicit_q = std::nullopt);

/// Uniform unit of Z/qZ as an element of {1, ..., q-1}.
Nat sample_unit(CountingBitSource& src, const Modulus& q, UnitMethod method);

/// Q = 2 * floor(x / (2 (ln x)^A)); throws ConfigError when Q < 4.
Nat uncond_modulus_range(Nat x, double A);

/// ceil((ln x)^2).
std::uint64_t default_fallback_T(Nat x);

/// 10^6 * ln x, rounded up.
std::uint64_t default_iteration_cap(Nat x);

/// A validated configuration with its modulus, Q and T resolved once.
class PrimeGenerator {
public:
    explicit PrimeGenerator(GenConfig cfg, std::shared_ptr<const PrimeTable> table = nullptr);

    /// One run drawing generation bits from `src` and primality verdicts from `tester`.
    GenResult operator()(CountingBitSource& src, PrimalityTester& tester) const;

    /// Trial `index` with its source and tester derived from the configured seed.
    GenResult run_trial(std::uint64_t index) const;

    const GenConfig& config() const { return cfg_; }
    const std::optional<Modulus>& modulus() const { return modulus_; }
    Nat modulus_range() const { return Q_; }
    std::uint64_t fallback_T() const { return T_; }
    std::uint64_t iteration_cap() const { return cap_; }
    const std::shared_ptr<const PrimeTable>& table() const { return table_; }

private:
    GenResult trivial(CountingBitSource& src, PrimalityTester& tester, Telemetry t) const;
    GenResult primeinc(CountingBitSource& src, PrimalityTester& tester) const;
    GenResult fixed_modulus(CountingBitSource& src, PrimalityTester& tester) const;
    GenResult random_modulus(CountingBitSource& src, PrimalityTester& tester) const;

    GenConfig cfg_;
    std::shared_ptr<const PrimeTable> table_;
    std::optional<Modulus> modulus_;
    Nat Q_ = 0;
    std::uint64_t T_ = 0;
    std::uint64_t cap_ = 0;
};

GenResult gen_trivial(const GenConfig& cfg, CountingBitSource& src);
GenResult gen_primeinc(const GenConfig& cfg, CountingBitSource& src);
GenResult gen_basic(const GenConfig& cfg, CountingBitSource& src);
GenResult gen_erh_fallback(const GenConfig& cfg, CountingBitSource& src);
GenResult gen_uncond(const GenConfig& cfg, CountingBitSource& src);
GenResult gen_uncond_nofallback(const GenConfig& cfg, CountingBitSource& src);

}  // namespace primelab

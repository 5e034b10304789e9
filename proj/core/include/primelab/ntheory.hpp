#pragma once

/// Exact number theory at desk scale: sieving, primes in residue classes,
/// totients, primorials and primality testing.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace primelab {

using Nat = std::uint64_t;
__extension__ typedef unsigned __int128 WideNat;

inline constexpr Nat kDefaultSieveCap = Nat{1} << 31;

/// Above this bound the sieve runs segment by segment.
inline constexpr Nat kSegmentedSieveThreshold = 10'000'000;

/// Deterministic Miller-Rabin with the first 13 prime bases is exact below this value
/// (3317044064679887385961981).
WideNat deterministic_witness_limit();

/// Exact primality for every integer in [0, bound].  Immutable after construction.
class PrimeTable {
public:
    Nat bound() const { return bound_; }

    /// All primes <= bound in increasing order.
    std::span<const std::uint32_t> primes() const { return primes_; }
    std::size_t prime_count() const { return primes_.size(); }

    /// Requires n <= bound(); throws DomainError otherwise.
    bool is_prime(Nat n) const;
    bool covers(Nat n) const { return n <= bound_; }

    /// pi(y) for y <= bound().
    Nat prime_count_upto(Nat y) const;

private:
    friend PrimeTable sieve(Nat bound, Nat cap);

    PrimeTable(Nat bound, std::vector<std::uint64_t> odd_bits, std::vector<std::uint32_t> primes)
        : bound_(bound), odd_bits_(std::move(odd_bits)), primes_(std::move(primes)) {}

    Nat bound_;
    std::vector<std::uint64_t> odd_bits_;  // bit i set <=> 2i+1 is prime
    std::vector<std::uint32_t> primes_;
};

/// Sieve of Eratosthenes over [0, bound]; segmented above kSegmentedSieveThreshold.
/// Throws DomainError for bound < 2, ResourceLimitError for bound > cap.
PrimeTable sieve(Nat bound, Nat cap = kDefaultSieveCap);

/// Shared handle, used wherever several generators or reports read one table.
std::shared_ptr<const PrimeTable> make_shared_table(Nat bound, Nat cap = kDefaultSieveCap);

/// pi(limit; q, a) for every residue a in [0, q), computed in one pass over the table.
class ResidueHistogram {
public:
    ResidueHistogram(const PrimeTable& table, Nat q, Nat limit);
    ResidueHistogram(const PrimeTable& table, Nat q) : ResidueHistogram(table, q, table.bound()) {}

    Nat modulus() const { return q_; }
    Nat limit() const { return limit_; }
    Nat count(Nat a) const;
    std::span<const std::uint32_t> counts() const { return counts_; }

private:
    Nat q_;
    Nat limit_;
    std::vector<std::uint32_t> counts_;
};

/// pi(bound; q, a).  q = 1 gives pi(bound).  a >= q is a DomainError.
Nat count_ap_primes(const PrimeTable& table, Nat q, Nat a);

/// The primes counted by count_ap_primes, ascending.
std::vector<Nat> residue_class_primes(const PrimeTable& table, Nat q, Nat a);

/// Largest product of the first k primes that does not exceed limit.
Nat primorial_below(Nat limit);

/// The prime following the largest prime factor of primorial_below(limit).
Nat next_primorial_prime(Nat limit);

/// phi(0..bound) with phi(0) = 0.
std::vector<std::uint32_t> totient_table(Nat bound);

/// Phi(bound) = sum_{q <= bound} phi(q).
Nat totient_partial_sum(Nat bound);

Nat euler_phi(Nat n);

/// q together with the data needed to sample units mod q.
struct Modulus {
    Nat q = 0;
    Nat phi = 0;
    Nat omega = 0;
    std::vector<std::pair<Nat, unsigned>> factorization;
    Nat carmichael = 0;
};

/// Factors q by trial division.  q < 2 is a DomainError.
Modulus make_modulus(Nat q);

Nat carmichael_lambda(const std::vector<std::pair<Nat, unsigned>>& factorization);

Nat mul_mod(Nat a, Nat b, Nat m);
Nat pow_mod(Nat base, Nat exp, Nat m);

struct PrimalityPolicy {
    enum class Kind { Exact, MillerRabin };

    Kind kind = Kind::Exact;
    unsigned rounds = 0;
    std::uint64_t seed = 0;

    static PrimalityPolicy exact() { return {}; }
    static PrimalityPolicy miller_rabin(unsigned rounds, std::uint64_t seed) {
        return {Kind::MillerRabin, rounds, seed};
    }

    bool operator==(const PrimalityPolicy&) const = default;
};

/// Single Miller-Rabin round with the given base; false means n is certainly composite.
bool miller_rabin_round(Nat n, Nat base);

/// Deterministic for every n < 2^64.
bool is_prime_deterministic(Nat n);

/// Exact: deterministic witnesses.  MillerRabin: `rounds` bases drawn from a stream
/// keyed by the policy seed; composite verdicts are always correct.
bool is_prime(Nat n, const PrimalityPolicy& policy);

/// Values up to deterministic_witness_limit() are decided exactly under the Exact
/// policy; larger values under Exact throw DomainError.
bool is_prime(WideNat n, const PrimalityPolicy& policy);

class PhiloxEngine;

/// Primality oracle used inside generator loops.  Exact lookups go through the table
/// when it covers n.  Miller-Rabin bases come from a private stream that is never
/// charged to the generation bit budget.
class PrimalityTester {
public:
    explicit PrimalityTester(PrimalityPolicy policy,
                             std::shared_ptr<const PrimeTable> table = nullptr,
                             std::uint64_t stream = 0);
    ~PrimalityTester();
    PrimalityTester(PrimalityTester&&) noexcept;
    PrimalityTester& operator=(PrimalityTester&&) noexcept;

    bool operator()(Nat n);

    const PrimalityPolicy& policy() const { return policy_; }

private:
    PrimalityPolicy policy_;
    std::shared_ptr<const PrimeTable> table_;
    std::unique_ptr<PhiloxEngine> bases_;
};

}  // namespace primelab

#include "primelab/ntheory.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "primelab/errors.hpp"
#include "primelab/rng.hpp"

namespace primelab {

namespace {

constexpr std::array<Nat, 13> kWitnessPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

constexpr std::size_t kSegmentOdds = std::size_t{1} << 18;

// Marks odd composites in the index window [lo, hi), where index i stands for 2i+1.
void mark_segment(std::vector<std::uint8_t>& composite, Nat lo, Nat hi,
                  const std::vector<std::uint32_t>& base_primes) {
    std::fill(composite.begin(), composite.begin() + static_cast<std::ptrdiff_t>(hi - lo), 0);
    const Nat first_value = 2 * lo + 1;
    const Nat last_value = 2 * (hi - 1) + 1;
    for (const std::uint32_t bp : base_primes) {
        const Nat p = bp;
        if (p == 2) {
            continue;
        }
        if (p * p > last_value) {
            break;
        }
        Nat start = std::max(p * p, (first_value + p - 1) / p * p);
        if (start % 2 == 0) {
            start += p;
        }
        for (Nat idx = (start - 1) / 2; idx < hi; idx += p) {
            composite[idx - lo] = 1;
        }
    }
}

std::vector<std::uint32_t> small_primes_upto(Nat n) {
    std::vector<std::uint8_t> composite(n + 1, 0);
    std::vector<std::uint32_t> primes;
    for (Nat i = 2; i <= n; ++i) {
        if (composite[i]) {
            continue;
        }
        primes.push_back(static_cast<std::uint32_t>(i));
        for (Nat j = i * i; j <= n; j += i) {
            composite[j] = 1;
        }
    }
    return primes;
}

mpz_class to_mpz(WideNat n) {
    mpz_class z;
    const std::array<std::uint64_t, 2> limbs{static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(n >> 64)};
    mpz_import(z.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, limbs.data());
    return z;
}

bool miller_rabin_round_wide(const mpz_class& n, const mpz_class& base) {
    const mpz_class n_minus_1 = n - 1;
    mpz_class d = n_minus_1;
    const auto s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    mpz_class y;
    mpz_powm(y.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (y == 1 || y == n_minus_1) {
        return true;
    }
    for (mp_bitcnt_t i = 1; i < s; ++i) {
        y = y * y % n;
        if (y == n_minus_1) {
            return true;
        }
    }
    return false;
}

}  // namespace

WideNat deterministic_witness_limit() {
    // 3317044064679887385961981 = 179817 * 2^64 + 5885577656943027709
    return (WideNat{179817} << 64) + WideNat{5885577656943027709ull};
}

// ---------------------------------------------------------------------------
// PrimeTable

bool PrimeTable::is_prime(Nat n) const {
    if (n > bound_) {
        throw DomainError("PrimeTable::is_prime: " + std::to_string(n) + " exceeds table bound " +
                          std::to_string(bound_));
    }
    if (n == 2) {
        return true;
    }
    if (n % 2 == 0) {
        return false;
    }
    const Nat i = n / 2;
    return (odd_bits_[i / 64] >> (i % 64)) & 1u;
}

Nat PrimeTable::prime_count_upto(Nat y) const {
    if (y > bound_) {
        throw DomainError("prime_count_upto: argument exceeds table bound");
    }
    return static_cast<Nat>(std::upper_bound(primes_.begin(), primes_.end(), y) - primes_.begin());
}

PrimeTable sieve(Nat bound, Nat cap) {
    if (bound < 2) {
        throw DomainError("sieve: bound must be >= 2");
    }
    if (bound > cap || bound > std::numeric_limits<std::uint32_t>::max()) {
        throw ResourceLimitError("sieve: bound " + std::to_string(bound) + " exceeds desk-scale cap " +
                                 std::to_string(std::min<Nat>(cap, std::numeric_limits<std::uint32_t>::max())));
    }

    const Nat root = static_cast<Nat>(std::sqrt(static_cast<long double>(bound))) + 1;
    const std::vector<std::uint32_t> base_primes = small_primes_upto(root);

    const Nat odd_count = bound / 2 + 1;  // indices 0..bound/2 cover odd values <= bound (+1 slack)
    std::vector<std::uint64_t> odd_bits(odd_count / 64 + 1, 0);
    std::vector<std::uint32_t> primes;
    primes.reserve(static_cast<std::size_t>(1.3 * static_cast<double>(bound) /
                                            std::max(1.0, std::log(static_cast<double>(bound)))) + 16);
    primes.push_back(2);

    const std::size_t segment = bound <= kSegmentedSieveThreshold ? odd_count : kSegmentOdds;
    std::vector<std::uint8_t> composite(segment);
    for (Nat lo = 0; lo < odd_count; lo += segment) {
        const Nat hi = std::min<Nat>(odd_count, lo + segment);
        mark_segment(composite, lo, hi, base_primes);
        for (Nat idx = std::max<Nat>(lo, 1); idx < hi; ++idx) {
            const Nat value = 2 * idx + 1;
            if (value > bound) {
                break;
            }
            if (!composite[idx - lo]) {
                odd_bits[idx / 64] |= std::uint64_t{1} << (idx % 64);
                primes.push_back(static_cast<std::uint32_t>(value));
            }
        }
    }
    primes.shrink_to_fit();
    return PrimeTable(bound, std::move(odd_bits), std::move(primes));
}

std::shared_ptr<const PrimeTable> make_shared_table(Nat bound, Nat cap) {
    return std::make_shared<const PrimeTable>(sieve(bound, cap));
}

// ---------------------------------------------------------------------------
// Residue classes

ResidueHistogram::ResidueHistogram(const PrimeTable& table, Nat q, Nat limit) : q_(q), limit_(limit) {
    if (q == 0) {
        throw DomainError("ResidueHistogram: modulus must be >= 1");
    }
    if (limit > table.bound()) {
        throw DomainError("ResidueHistogram: limit exceeds table bound");
    }
    counts_.assign(q, 0);
    for (const std::uint32_t p : table.primes()) {
        if (p > limit) {
            break;
        }
        ++counts_[p % q];
    }
}

Nat ResidueHistogram::count(Nat a) const {
    if (a >= q_) {
        throw DomainError("ResidueHistogram::count: residue must be < modulus");
    }
    return counts_[a];
}

namespace {

void check_class(Nat q, Nat a) {
    if (q == 0) {
        throw DomainError("modulus must be >= 1");
    }
    if (a >= q) {
        throw DomainError("residue " + std::to_string(a) + " must be < modulus " + std::to_string(q));
    }
}

}  // namespace

Nat count_ap_primes(const PrimeTable& table, Nat q, Nat a) {
    check_class(q, a);
    if (q == 1) {
        return table.prime_count();
    }
    return static_cast<Nat>(std::count_if(table.primes().begin(), table.primes().end(),
                                          [&](std::uint32_t p) { return p % q == a; }));
}

std::vector<Nat> residue_class_primes(const PrimeTable& table, Nat q, Nat a) {
    check_class(q, a);
    std::vector<Nat> out;
    for (const std::uint32_t p : table.primes()) {
        if (p % q == a) {
            out.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Primorials and totients

namespace {

// Walks primes 2, 3, 5, ... while the running product stays <= limit.
std::pair<Nat, Nat> primorial_walk(Nat limit) {
    if (limit < 2) {
        throw DomainError("primorial_below: limit must be >= 2");
    }
    Nat product = 1;
    Nat candidate = 2;
    while (true) {
        if (is_prime_deterministic(candidate)) {
            if (product > limit / candidate) {
                return {product, candidate};
            }
            product *= candidate;
        }
        ++candidate;
    }
}

}  // namespace

Nat primorial_below(Nat limit) { return primorial_walk(limit).first; }

Nat next_primorial_prime(Nat limit) { return primorial_walk(limit).second; }

std::vector<std::uint32_t> totient_table(Nat bound) {
    if (bound > kDefaultSieveCap) {
        throw ResourceLimitError("totient_table: bound exceeds desk-scale cap");
    }
    std::vector<std::uint32_t> phi(bound + 1);
    std::iota(phi.begin(), phi.end(), 0u);
    for (Nat p = 2; p <= bound; ++p) {
        if (phi[p] != p) {
            continue;  // already reduced by a smaller prime, so composite
        }
        for (Nat m = p; m <= bound; m += p) {
            phi[m] -= phi[m] / static_cast<std::uint32_t>(p);
        }
    }
    return phi;
}

Nat totient_partial_sum(Nat bound) {
    if (bound < 1) {
        throw DomainError("totient_partial_sum: bound must be >= 1");
    }
    const auto phi = totient_table(bound);
    return std::accumulate(phi.begin() + 1, phi.end(), Nat{0});
}

namespace {

std::vector<std::pair<Nat, unsigned>> factorize(Nat n) {
    std::vector<std::pair<Nat, unsigned>> factors;
    for (Nat p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) {
            continue;
        }
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        factors.emplace_back(p, e);
    }
    if (n > 1) {
        factors.emplace_back(n, 1u);
    }
    return factors;
}

}  // namespace

Nat euler_phi(Nat n) {
    if (n == 0) {
        return 0;
    }
    Nat phi = n;
    for (const auto& [p, e] : factorize(n)) {
        phi = phi / p * (p - 1);
    }
    return phi;
}

Nat carmichael_lambda(const std::vector<std::pair<Nat, unsigned>>& factorization) {
    Nat lambda = 1;
    for (const auto& [p, e] : factorization) {
        Nat part;
        if (p == 2) {
            part = e == 1 ? 1 : e == 2 ? 2 : Nat{1} << (e - 2);
        } else {
            part = p - 1;
            for (unsigned i = 1; i < e; ++i) {
                part *= p;
            }
        }
        lambda = std::lcm(lambda, part);
    }
    return lambda;
}

Modulus make_modulus(Nat q) {
    if (q < 2) {
        throw DomainError("modulus must be >= 2");
    }
    Modulus m;
    m.q = q;
    m.factorization = factorize(q);
    m.omega = m.factorization.size();
    m.phi = q;
    for (const auto& [p, e] : m.factorization) {
        m.phi = m.phi / p * (p - 1);
    }
    m.carmichael = carmichael_lambda(m.factorization);
    return m;
}

// ---------------------------------------------------------------------------
// Primality

Nat mul_mod(Nat a, Nat b, Nat m) {
    return static_cast<Nat>(static_cast<WideNat>(a) * b % m);
}

Nat pow_mod(Nat base, Nat exp, Nat m) {
    if (m == 1) {
        return 0;
    }
    Nat result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool miller_rabin_round(Nat n, Nat base) {
    base %= n;
    if (base == 0) {
        return true;
    }
    Nat d = n - 1;
    unsigned s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    Nat y = pow_mod(base, d, n);
    if (y == 1 || y == n - 1) {
        return true;
    }
    for (unsigned i = 1; i < s; ++i) {
        y = mul_mod(y, y, n);
        if (y == n - 1) {
            return true;
        }
    }
    return false;
}

bool is_prime_deterministic(Nat n) {
    if (n < 2) {
        return false;
    }
    for (const Nat p : kWitnessPrimes) {
        if (n % p == 0) {
            return n == p;
        }
    }
    if (n < 41 * 41) {
        return true;
    }
    // The first twelve primes are a complete witness set below 3.18e23 > 2^64.
    for (std::size_t i = 0; i < 12; ++i) {
        if (!miller_rabin_round(n, kWitnessPrimes[i])) {
            return false;
        }
    }
    return true;
}

namespace {

bool miller_rabin_random(Nat n, unsigned rounds, PhiloxEngine& engine) {
    if (rounds == 0) {
        throw DomainError("Miller-Rabin policy needs at least one round");
    }
    if (n < 2) {
        return false;
    }
    if (n < 4) {
        return true;
    }
    if (n % 2 == 0) {
        return false;
    }
    if (n == 5) {
        return true;
    }
    for (unsigned r = 0; r < rounds; ++r) {
        const Nat base = 2 + engine() % (n - 3);  // [2, n-2]
        if (!miller_rabin_round(n, base)) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool is_prime(Nat n, const PrimalityPolicy& policy) {
    if (policy.kind == PrimalityPolicy::Kind::Exact) {
        return is_prime_deterministic(n);
    }
    PhiloxEngine engine(policy.seed, n);
    return miller_rabin_random(n, policy.rounds, engine);
}

bool is_prime(WideNat n, const PrimalityPolicy& policy) {
    if (n <= std::numeric_limits<Nat>::max()) {
        return is_prime(static_cast<Nat>(n), policy);
    }
    for (const Nat p : kWitnessPrimes) {
        if (n % p == 0) {
            return false;
        }
    }
    const mpz_class z = to_mpz(n);
    if (policy.kind == PrimalityPolicy::Kind::Exact) {
        if (n >= deterministic_witness_limit()) {
            throw DomainError("is_prime: no deterministic witness set covers values >= 3.317e24");
        }
        return std::all_of(kWitnessPrimes.begin(), kWitnessPrimes.end(),
                           [&](Nat p) { return miller_rabin_round_wide(z, mpz_class(static_cast<unsigned long>(p))); });
    }
    if (policy.rounds == 0) {
        throw DomainError("Miller-Rabin policy needs at least one round");
    }
    PhiloxEngine engine(policy.seed, static_cast<std::uint64_t>(n) ^ static_cast<std::uint64_t>(n >> 64));
    const mpz_class span = z - 3;
    for (unsigned r = 0; r < policy.rounds; ++r) {
        mpz_class raw = mpz_class(static_cast<unsigned long>(engine()));
        raw <<= 64;
        raw += mpz_class(static_cast<unsigned long>(engine()));
        const mpz_class base = 2 + raw % span;
        if (!miller_rabin_round_wide(z, base)) {
            return false;
        }
    }
    return true;
}

PrimalityTester::PrimalityTester(PrimalityPolicy policy, std::shared_ptr<const PrimeTable> table,
                                 std::uint64_t stream)
    : policy_(policy), table_(std::move(table)) {
    if (policy_.kind == PrimalityPolicy::Kind::MillerRabin) {
        if (policy_.rounds == 0) {
            throw DomainError("Miller-Rabin policy needs at least one round");
        }
        // Top bit keeps base-selection streams apart from generation streams under one key.
        bases_ = std::make_unique<PhiloxEngine>(policy_.seed, stream | (std::uint64_t{1} << 63));
    }
}

PrimalityTester::~PrimalityTester() = default;
PrimalityTester::PrimalityTester(PrimalityTester&&) noexcept = default;
PrimalityTester& PrimalityTester::operator=(PrimalityTester&&) noexcept = default;

bool PrimalityTester::operator()(Nat n) {
    if (policy_.kind == PrimalityPolicy::Kind::Exact) {
        if (table_ && table_->covers(n)) {
            return table_->is_prime(n);
        }
        return is_prime_deterministic(n);
    }
    return miller_rabin_random(n, policy_.rounds, *bases_);
}

}  // namespace primelab

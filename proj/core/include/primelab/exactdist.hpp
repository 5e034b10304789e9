#pragma once

/// Closed-form output distributions of every generator, evaluated exactly from a
/// prime table.  These are the reference the Monte Carlo runs are checked against.
///
/// Each distribution lives on the primes <= x (|S| = pi(x)); primes a generator can
/// never output are stored with explicit mass 0.

#include <cstdint>
#include <vector>

#include "primelab/metrics.hpp"
#include "primelab/ntheory.hpp"

namespace primelab {

/// Default cap on (number of moduli) x pi(x) residue lookups for the unconditional variants.
inline constexpr std::uint64_t kDefaultWorkCap = 10'000'000'000ull;

/// Rational arithmetic is used up to this x unless the caller asks otherwise.
inline constexpr Nat kRationalBackendLimit = 1'000;

struct ClassProfile {
    Nat x = 0;
    Nat q = 0;
    Nat phi = 0;
    Nat pi_x = 0;
    std::vector<Nat> units;          // a in (Z/qZ)*, ascending
    std::vector<Nat> counts;         // pi(x; q, a), aligned with units
    Nat phi_star = 0;                // units whose class holds a prime
    std::vector<double> error_terms; // |pi(x;q,a) - pi(x)/phi(q)|

    Nat unit_total() const;
};

ClassProfile class_profile(const PrimeTable& table, Nat x, Nat q);

template <class Real>
struct ExactDist {
    FiniteDist<Real> dist;
    std::vector<Nat> empty_classes;  // units a with pi(x;q,a) = 0 (fixed-modulus variants)
    Nat weight_total = 0;            // phi(q), or F(Q) for the random-modulus variants
    Nat weight_nonempty = 0;         // phi*_x(q), or F*_x(Q)

    /// True when empty classes forced conditioning on a non-empty class.
    bool conditional() const { return weight_nonempty < weight_total; }
};

template <class Real>
ExactDist<Real> exact_dist_trivial(const PrimeTable& table, Nat x);

/// mass(p) = d(p) / p_max with d(2) = 2.
template <class Real>
ExactDist<Real> exact_dist_primeinc(const PrimeTable& table, Nat x);

/// mass(p) = 1 / (phi*(q) pi(x; q, p mod q)); conditional on non-empty classes when some are empty.
template <class Real>
ExactDist<Real> exact_dist_basic(const PrimeTable& table, Nat x, Nat q);

/// Residue loop capped at T attempts, then the trivial sampler.
template <class Real>
ExactDist<Real> exact_dist_erh_fallback(const PrimeTable& table, Nat x, Nat q, std::uint64_t T);

/// Law of the random pair (q, a), Q/2 < q <= Q, gcd(a, q) = 1.
enum class PairWeighting {
    AsSampled,  // q uniform, a uniform in [0, q), both redrawn on a gcd failure: Pr ~ 1/q
    Uniform,    // every pair equally likely
};

/// Random (q, a) and no fallback; pairs with an empty class are conditioned away.
/// Throws ResourceLimitError above work_cap.
template <class Real>
ExactDist<Real> exact_dist_uncond_nofallback(const PrimeTable& table, Nat x, double A,
                                             PairWeighting weighting = PairWeighting::AsSampled,
                                             std::uint64_t work_cap = kDefaultWorkCap);

/// Random (q, a) with the fallback after T residue attempts.
template <class Real>
ExactDist<Real> exact_dist_uncond(const PrimeTable& table, Nat x, double A, std::uint64_t T,
                                  PairWeighting weighting = PairWeighting::AsSampled,
                                  std::uint64_t work_cap = kDefaultWorkCap);

/// F(Q) = sum of phi(q) over Q/2 < q <= Q (Q even).
Nat pair_count(Nat Q);

extern template struct ExactDist<double>;
extern template struct ExactDist<Rational>;

}  // namespace primelab

#pragma once

// Reference implementations used only by the tests.  Everything here is written
// from first principles (trial division, explicit enumeration of every random
// choice a generator can make) and shares no code with the library.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Nat = std::uint64_t;
using Q = mpq_class;
using Pmf = std::map<Nat, Q>;

/// n/d in canonical form.
Q frac(Nat n, Nat d);

bool is_prime(Nat n);
std::vector<Nat> primes_upto(Nat x);
Nat prime_count(Nat x);
Nat prime_count_ap(Nat x, Nat q, Nat a);
Nat phi(Nat n);
Nat gcd(Nat a, Nat b);

/// 2 floor(x / (2 (ln x)^A)), recomputed here.
Nat uncond_Q(Nat x, double A);

Pmf trivial(Nat x);

/// Every start y in 1..x; starts past the largest prime are resampled.
Pmf primeinc(Nat x);

/// Unit a uniform, then t uniform until a + t q is prime; empty classes are conditioned away.
Pmf basic(Nat x, Nat q);

/// Step-by-step: at each of T attempts the still-searching mass splits over the class;
/// what is left after T attempts goes to the uniform sampler.
Pmf erh_fallback(Nat x, Nat q, Nat T);

/// (q, a) drawn by rejection from q in (Q/2, Q], a in [0, q) until gcd(a, q) = 1;
/// with T the fallback applies, without T empty pairs are conditioned away.
Pmf uncond(Nat x, Nat Qv, std::optional<Nat> T);

struct Metrics {
    Q delta1, delta2_sq, beta, gamma;
};

/// Against the uniform distribution on the primes <= x; missing primes have mass 0.
Metrics metrics(const Pmf& pmf, Nat space);

Q total(const Pmf& pmf);

}  // namespace oracle

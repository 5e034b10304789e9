#include "primelab/exactdist.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "primelab/errors.hpp"
#include "primelab/generators.hpp"

namespace primelab {

namespace {

std::span<const std::uint32_t> primes_upto(const PrimeTable& table, Nat x) {
    if (x > table.bound()) {
        throw DomainError("x = " + std::to_string(x) + " exceeds prime table bound " + std::to_string(table.bound()));
    }
    if (x < 2) {
        throw DomainError("x must be >= 2");
    }
    return table.primes().first(table.prime_count_upto(x));
}

template <class Real>
FiniteDist<Real> on_primes(std::span<const std::uint32_t> primes, std::vector<Real> mass) {
    std::vector<typename FiniteDist<Real>::Outcome> outcomes;
    outcomes.reserve(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        outcomes.emplace_back(primes[i], std::move(mass[i]));
    }
    return FiniteDist<Real>(primes.size(), std::move(outcomes));
}

template <class Real>
Real from_nat(Nat n) {
    if constexpr (is_exact_v<Real>) {
        return Real(mpz_class(static_cast<unsigned long>(n)));
    } else {
        return static_cast<double>(n);
    }
}

// Probability that one residue draw a + t q (t uniform in [0, floor((x-a)/q)]) is prime.
template <class Real>
Real success_probability(Nat x, Nat q, Nat a, Nat count) {
    return make_ratio<Real>(count, (x - a) / q + 1);
}

void check_work(Nat moduli, Nat pi_x, std::uint64_t cap) {
    const long double work = static_cast<long double>(moduli) * static_cast<long double>(pi_x);
    if (work > static_cast<long double>(cap)) {
        throw ResourceLimitError("exact distribution needs " + std::to_string(static_cast<double>(work)) +
                                 " class lookups, above the cap of " + std::to_string(cap) +
                                 "; use a larger A or a smaller x");
    }
}

}  // namespace

Nat ClassProfile::unit_total() const { return std::accumulate(counts.begin(), counts.end(), Nat{0}); }

ClassProfile class_profile(const PrimeTable& table, Nat x, Nat q) {
    primes_upto(table, x);
    const Modulus m = make_modulus(q);
    const ResidueHistogram hist(table, q, x);
    ClassProfile profile;
    profile.x = x;
    profile.q = q;
    profile.phi = m.phi;
    profile.pi_x = table.prime_count_upto(x);
    const double expected = static_cast<double>(profile.pi_x) / static_cast<double>(m.phi);
    for (Nat a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) {
            continue;
        }
        const Nat c = hist.count(a);
        profile.units.push_back(a);
        profile.counts.push_back(c);
        profile.error_terms.push_back(std::fabs(static_cast<double>(c) - expected));
        profile.phi_star += c > 0 ? 1 : 0;
    }
    return profile;
}

Nat pair_count(Nat Q) {
    if (Q < 2 || Q % 2 != 0) {
        throw DomainError("pair_count: Q must be even and >= 2");
    }
    const auto phi = totient_table(Q);
    return std::accumulate(phi.begin() + static_cast<std::ptrdiff_t>(Q / 2 + 1), phi.end(), Nat{0});
}

template <class Real>
ExactDist<Real> exact_dist_trivial(const PrimeTable& table, Nat x) {
    const auto primes = primes_upto(table, x);
    std::vector<Real> mass(primes.size(), make_ratio<Real>(1, primes.size()));
    return {on_primes(primes, std::move(mass)), {}, 1, 1};
}

template <class Real>
ExactDist<Real> exact_dist_primeinc(const PrimeTable& table, Nat x) {
    const auto primes = primes_upto(table, x);
    const Nat p_max = primes.back();
    std::vector<Real> mass;
    mass.reserve(primes.size());
    Nat previous = 0;
    for (const Nat p : primes) {
        mass.push_back(make_ratio<Real>(p - previous, p_max));  // d(2) = 2 - 0
        previous = p;
    }
    return {on_primes(primes, std::move(mass)), {}, 1, 1};
}

template <class Real>
ExactDist<Real> exact_dist_basic(const PrimeTable& table, Nat x, Nat q) {
    const auto primes = primes_upto(table, x);
    const ClassProfile profile = class_profile(table, x, q);
    if (profile.phi_star == 0) {
        throw DomainError("exact_dist_basic: no residue class mod " + std::to_string(q) + " holds a prime <= x");
    }
    std::vector<Nat> empty_classes;
    std::vector<Nat> class_count(q, 0);
    for (std::size_t i = 0; i < profile.units.size(); ++i) {
        class_count[profile.units[i]] = profile.counts[i];
        if (profile.counts[i] == 0) {
            empty_classes.push_back(profile.units[i]);
        }
    }
    std::vector<Real> mass;
    mass.reserve(primes.size());
    for (const Nat p : primes) {
        if (q % p == 0) {
            mass.emplace_back(0);
        } else {
            mass.push_back(make_ratio<Real>(1, profile.phi_star * class_count[p % q]));
        }
    }
    return {on_primes(primes, std::move(mass)), std::move(empty_classes), profile.phi, profile.phi_star};
}

template <class Real>
ExactDist<Real> exact_dist_erh_fallback(const PrimeTable& table, Nat x, Nat q, std::uint64_t T) {
    if (T == 0) {
        throw DomainError("exact_dist_erh_fallback: T must be >= 1");
    }
    const auto primes = primes_upto(table, x);
    const ClassProfile profile = class_profile(table, x, q);
    const Nat pi_x = primes.size();

    // Per unit class: probability all T residue draws miss, and the per-prime share if one hits.
    std::vector<Real> hit_share(q, Real(0));
    Real miss_total(0);
    std::vector<Nat> empty_classes;
    for (std::size_t i = 0; i < profile.units.size(); ++i) {
        const Nat a = profile.units[i];
        const Nat c = profile.counts[i];
        if (c == 0) {
            empty_classes.push_back(a);
            miss_total += Real(1);
            continue;
        }
        const Real miss = power<Real>(Real(1) - success_probability<Real>(x, q, a, c), T);
        miss_total += miss;
        hit_share[a] = (Real(1) - miss) / from_nat<Real>(c);
    }
    const Real inv_phi = make_ratio<Real>(1, profile.phi);
    const Real fallback_each = miss_total / from_nat<Real>(pi_x);
    std::vector<Real> mass;
    mass.reserve(pi_x);
    for (const Nat p : primes) {
        Real m = fallback_each;
        if (q % p != 0) {
            m += hit_share[p % q];
        }
        mass.push_back(m * inv_phi);
    }
    // The fallback makes every unit productive, so the mixture is never conditional.
    return {on_primes(primes, std::move(mass)), std::move(empty_classes), profile.phi, profile.phi};
}

namespace {

template <class Real>
ExactDist<Real> uncond_impl(const PrimeTable& table, Nat x, double A, std::optional<std::uint64_t> T,
                            PairWeighting weighting, std::uint64_t work_cap) {
    const auto primes = primes_upto(table, x);
    const Nat pi_x = primes.size();
    const Nat Q = uncond_modulus_range(x, A);
    check_work(Q / 2, pi_x, work_cap);

    std::vector<Real> acc(pi_x, Real(0));
    Nat F = 0, F_star = 0;
    Real weight_sum(0);
    Real miss_total(0);
    std::vector<std::uint32_t> counts;
    std::vector<Real> share;
    for (Nat q = Q / 2 + 1; q <= Q; ++q) {
        const Real w = weighting == PairWeighting::AsSampled ? make_ratio<Real>(1, q) : Real(1);
        counts.assign(q, 0);
        for (const Nat p : primes) {
            ++counts[p % q];
        }
        share.assign(q, Real(0));
        Nat pairs = 0;
        Nat nonempty = 0;
        for (Nat a = 1; a < q; ++a) {
            if (std::gcd(a, q) != 1) {
                continue;
            }
            ++pairs;
            const Nat c = counts[a];
            if (c == 0) {
                if (T) {
                    miss_total += w;
                }
                continue;
            }
            ++nonempty;
            if (T) {
                const Real miss = power<Real>(Real(1) - success_probability<Real>(x, q, a, c), *T);
                miss_total += w * miss;
                share[a] = w * (Real(1) - miss) / from_nat<Real>(c);
            } else {
                share[a] = w / from_nat<Real>(c);
            }
        }
        F += pairs;
        F_star += nonempty;
        weight_sum += w * from_nat<Real>(T ? pairs : nonempty);
        for (std::size_t i = 0; i < pi_x; ++i) {
            const Nat p = primes[i];
            if (q % p != 0) {
                acc[i] += share[p % q];
            }
        }
    }
    if (F_star == 0 && !T) {
        throw DomainError("exact_dist_uncond_nofallback: every residue class is empty");
    }

    std::vector<Real> mass;
    mass.reserve(pi_x);
    const Real fallback_each = miss_total / from_nat<Real>(pi_x);
    for (std::size_t i = 0; i < pi_x; ++i) {
        Real m = acc[i];
        if (T) {
            m += fallback_each;
        }
        mass.push_back(m / weight_sum);
    }
    return {on_primes(primes, std::move(mass)), {}, F, T ? F : F_star};
}

}  // namespace

template <class Real>
ExactDist<Real> exact_dist_uncond_nofallback(const PrimeTable& table, Nat x, double A, PairWeighting weighting,
                                             std::uint64_t work_cap) {
    return uncond_impl<Real>(table, x, A, std::nullopt, weighting, work_cap);
}

template <class Real>
ExactDist<Real> exact_dist_uncond(const PrimeTable& table, Nat x, double A, std::uint64_t T,
                                  PairWeighting weighting, std::uint64_t work_cap) {
    if (T == 0) {
        throw DomainError("exact_dist_uncond: T must be >= 1");
    }
    return uncond_impl<Real>(table, x, A, T, weighting, work_cap);
}

template struct ExactDist<double>;
template struct ExactDist<Rational>;

#define PRIMELAB_INSTANTIATE(Real)                                                                         \
    template ExactDist<Real> exact_dist_trivial<Real>(const PrimeTable&, Nat);                            \
    template ExactDist<Real> exact_dist_primeinc<Real>(const PrimeTable&, Nat);                           \
    template ExactDist<Real> exact_dist_basic<Real>(const PrimeTable&, Nat, Nat);                         \
    template ExactDist<Real> exact_dist_erh_fallback<Real>(const PrimeTable&, Nat, Nat, std::uint64_t);   \
    template ExactDist<Real> exact_dist_uncond_nofallback<Real>(const PrimeTable&, Nat, double,           \
                                                                PairWeighting, std::uint64_t);            \
    template ExactDist<Real> exact_dist_uncond<Real>(const PrimeTable&, Nat, double, std::uint64_t,       \
                                                     PairWeighting, std::uint64_t);

PRIMELAB_INSTANTIATE(double)
PRIMELAB_INSTANTIATE(Rational)

#undef PRIMELAB_INSTANTIATE

}  // namespace primelab

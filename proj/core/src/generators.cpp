#include "primelab/generators.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "primelab/errors.hpp"

namespace primelab {

namespace {

struct Named {
    std::string_view name;
    int value;
};

constexpr Named kAlgorithms[] = {
    {"trivial", static_cast<int>(Algorithm::Trivial)},
    {"primeinc", static_cast<int>(Algorithm::PrimeInc)},
    {"basic", static_cast<int>(Algorithm::Basic)},
    {"erh-fallback", static_cast<int>(Algorithm::ErhFallback)},
    {"uncond", static_cast<int>(Algorithm::Uncond)},
    {"uncond-nofallback", static_cast<int>(Algorithm::UncondNoFallback)},
};

constexpr Named kModulusModes[] = {
    {"primorial", static_cast<int>(ModulusMode::Primorial)},
    {"power-of-two", static_cast<int>(ModulusMode::PowerOfTwo)},
    {"explicit", static_cast<int>(ModulusMode::Explicit)},
};

constexpr Named kUnitMethods[] = {
    {"rejection", static_cast<int>(UnitMethod::Rejection)},
    {"joye-paillier", static_cast<int>(UnitMethod::JoyePaillier)},
};

template <std::size_t N>
std::string_view name_of(const Named (&table)[N], int value) {
    for (const auto& n : table) {
        if (n.value == value) {
            return n.name;
        }
    }
    return "?";
}

template <std::size_t N>
int parse_named(const Named (&table)[N], std::string_view s, std::string_view what) {
    for (const auto& n : table) {
        if (n.name == s) {
            return n.value;
        }
    }
    std::string choices;
    for (const auto& n : table) {
        choices += choices.empty() ? "" : ", ";
        choices += n.name;
    }
    throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "' (expected one of: " + choices + ")");
}

double natural_log(Nat x) { return std::log(static_cast<double>(x)); }

}  // namespace

std::string_view to_string(Algorithm a) { return name_of(kAlgorithms, static_cast<int>(a)); }
std::string_view to_string(ModulusMode m) { return name_of(kModulusModes, static_cast<int>(m)); }
std::string_view to_string(UnitMethod m) { return name_of(kUnitMethods, static_cast<int>(m)); }

Algorithm parse_algorithm(std::string_view s) {
    return static_cast<Algorithm>(parse_named(kAlgorithms, s, "algorithm"));
}
ModulusMode parse_modulus_mode(std::string_view s) {
    return static_cast<ModulusMode>(parse_named(kModulusModes, s, "modulus mode"));
}
UnitMethod parse_unit_method(std::string_view s) {
    return static_cast<UnitMethod>(parse_named(kUnitMethods, s, "unit method"));
}

bool uses_fixed_modulus(Algorithm a) { return a == Algorithm::Basic || a == Algorithm::ErhFallback; }
bool uses_random_modulus(Algorithm a) { return a == Algorithm::Uncond || a == Algorithm::UncondNoFallback; }

void GenConfig::validate() const {
    if (x < 2) {
        throw ConfigError("x must be >= 2");
    }
    if (uses_fixed_modulus(algorithm)) {
        if (modulus_mode == ModulusMode::Explicit) {
            if (!q) {
                throw ConfigError("explicit modulus mode needs q");
            }
        } else if (!epsilon || !(*epsilon > 0.0 && *epsilon < 1.0)) {
            throw ConfigError(std::string(to_string(algorithm)) + " needs epsilon in (0, 1)");
        }
    }
    if (uses_random_modulus(algorithm) && (!A || !(*A > 0.0))) {
        throw ConfigError(std::string(to_string(algorithm)) + " needs A > 0");
    }
    if (T_override && *T_override == 0) {
        throw ConfigError("T must be >= 1");
    }
    if (iteration_cap && *iteration_cap == 0) {
        throw ConfigError("iteration cap must be >= 1");
    }
    if (primality.kind == PrimalityPolicy::Kind::MillerRabin && primality.rounds == 0) {
        throw ConfigError("Miller-Rabin policy needs at least one round");
    }
}

Modulus select_modulus(Nat x, double epsilon, ModulusMode mode, std::optional<Nat> explicit_q) {
    Nat q = 0;
    if (mode == ModulusMode::Explicit) {
        if (!explicit_q) {
            throw ConfigError("explicit modulus mode needs q");
        }
        q = *explicit_q;
    } else {
        const long double bound = std::pow(static_cast<long double>(x), 1.0L - static_cast<long double>(epsilon));
        // Absorb rounding when x^(1-eps) is mathematically an integer.
        const long double nudged = bound * (1.0L + 1e-12L);
        if (nudged < 3.0L) {
            throw ConfigError("x^(1-epsilon) must be >= 3");
        }
        const Nat limit = static_cast<Nat>(std::floor(nudged));
        q = mode == ModulusMode::Primorial ? primorial_below(limit) : std::bit_floor(limit);
    }
    if (q < 2 || q >= x) {
        throw ConfigError("modulus q = " + std::to_string(q) + " must satisfy 2 <= q < x = " + std::to_string(x));
    }
    return make_modulus(q);
}

Nat sample_unit(CountingBitSource& src, const Modulus& m, UnitMethod method) {
    const Nat q = m.q;
    if (method == UnitMethod::Rejection) {
        while (true) {
            const Nat a = src.uniform_below(q);
            if (std::gcd(a, q) == 1) {
                return a;
            }
        }
    }
    // Each prime-power component where b is a non-unit gets a fresh uniform offset;
    // components where b is already a unit are left untouched because u vanishes there.
    Nat b = src.uniform_below(q);
    while (true) {
        const Nat u = (1 + q - pow_mod(b, m.carmichael, q)) % q;
        if (u == 0) {
            return b;
        }
        const Nat r = src.uniform_below(q);
        b = (b + mul_mod(r, u, q)) % q;
    }
}

Nat uncond_modulus_range(Nat x, double A) {
    const double scale = 2.0 * std::pow(natural_log(x), A);
    const Nat Q = 2 * static_cast<Nat>(std::floor(static_cast<double>(x) / scale));
    if (Q < 4) {
        throw ConfigError("Q = 2*floor(x/(2 (ln x)^A)) = " + std::to_string(Q) + " is below 4");
    }
    if (Q >= x) {
        throw ConfigError("Q must be below x");
    }
    return Q;
}

std::uint64_t default_fallback_T(Nat x) {
    const double l = natural_log(x);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(l * l)));
}

std::uint64_t default_iteration_cap(Nat x) {
    return static_cast<std::uint64_t>(std::ceil(1e6 * std::max(1.0, natural_log(x))));
}

// ---------------------------------------------------------------------------

PrimeGenerator::PrimeGenerator(GenConfig cfg, std::shared_ptr<const PrimeTable> table)
    : cfg_(std::move(cfg)), table_(std::move(table)) {
    cfg_.validate();
    if (uses_fixed_modulus(cfg_.algorithm)) {
        modulus_ = select_modulus(cfg_.x, cfg_.epsilon.value_or(0.0), cfg_.modulus_mode, cfg_.q);
    }
    if (uses_random_modulus(cfg_.algorithm)) {
        Q_ = uncond_modulus_range(cfg_.x, *cfg_.A);
    }
    T_ = cfg_.T_override.value_or(default_fallback_T(cfg_.x));
    cap_ = cfg_.iteration_cap.value_or(default_iteration_cap(cfg_.x));
}

namespace {

class Meter {
public:
    explicit Meter(const CountingBitSource& src)
        : src_(src), bits_(src.bits_consumed()), info_(src.information_bits()) {}

    void mark_setup(Telemetry& t) const { t.setup_bits = src_.bits_consumed() - bits_; }
    void finish(Telemetry& t) const {
        t.bits_consumed = src_.bits_consumed() - bits_;
        t.information_bits = src_.information_bits() - info_;
    }

private:
    const CountingBitSource& src_;
    std::uint64_t bits_;
    double info_;
};

[[noreturn]] void hit_cap(std::uint64_t cap) {
    throw NonTerminationError("iteration cap of " + std::to_string(cap) +
                              " reached; the chosen residue class may contain no prime <= x");
}

}  // namespace

GenResult PrimeGenerator::operator()(CountingBitSource& src, PrimalityTester& tester) const {
    const Meter meter(src);
    GenResult result;
    switch (cfg_.algorithm) {
        case Algorithm::Trivial:
            result = trivial(src, tester, Telemetry{});
            break;
        case Algorithm::PrimeInc:
            result = primeinc(src, tester);
            break;
        case Algorithm::Basic:
        case Algorithm::ErhFallback:
            result = fixed_modulus(src, tester);
            break;
        case Algorithm::Uncond:
        case Algorithm::UncondNoFallback:
            result = random_modulus(src, tester);
            break;
    }
    meter.finish(result.telemetry);
    return result;
}

GenResult PrimeGenerator::run_trial(std::uint64_t index) const {
    auto src = CountingBitSource::for_trial(cfg_.seed, index);
    PrimalityTester tester(cfg_.primality, table_, index);
    return (*this)(src, tester);
}

GenResult PrimeGenerator::trivial(CountingBitSource& src, PrimalityTester& tester, Telemetry t) const {
    while (true) {
        if (t.loop_iterations >= cap_) {
            hit_cap(cap_);
        }
        const Nat p = 1 + src.uniform_below(cfg_.x);
        ++t.loop_iterations;
        ++t.primality_tests;
        if (tester(p)) {
            return {p, t};
        }
    }
}

GenResult PrimeGenerator::primeinc(CountingBitSource& src, PrimalityTester& tester) const {
    Telemetry t;
    while (true) {
        const Nat y = 1 + src.uniform_below(cfg_.x);
        // Scan y, y+1, ... up to x; running past x means resampling y.
        for (Nat p = y; p <= cfg_.x; ++p) {
            if (t.loop_iterations >= cap_) {
                hit_cap(cap_);
            }
            ++t.loop_iterations;
            ++t.primality_tests;
            if (tester(p)) {
                return {p, t};
            }
        }
    }
}

GenResult PrimeGenerator::fixed_modulus(CountingBitSource& src, PrimalityTester& tester) const {
    const Meter meter(src);
    const Nat q = modulus_->q;
    Telemetry t;
    t.chosen_q = q;
    t.chosen_a = sample_unit(src, *modulus_, cfg_.unit_method);
    meter.mark_setup(t);

    const Nat a = t.chosen_a;
    const Nat range = (cfg_.x - a) / q + 1;
    const bool with_fallback = cfg_.algorithm == Algorithm::ErhFallback;
    while (true) {
        if (with_fallback && t.loop_iterations >= T_) {
            t.fallback_entered = true;
            return trivial(src, tester, t);
        }
        if (t.loop_iterations >= cap_) {
            hit_cap(cap_);
        }
        const Nat p = a + src.uniform_below(range) * q;
        ++t.loop_iterations;
        ++t.primality_tests;
        if (tester(p)) {
            return {p, t};
        }
    }
}

GenResult PrimeGenerator::random_modulus(CountingBitSource& src, PrimalityTester& tester) const {
    const Meter meter(src);
    Telemetry t;
    const Nat half = Q_ / 2;
    // A gcd failure redraws both q and a.
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= cap_) {
            hit_cap(cap_);
        }
        t.chosen_q = half + 1 + src.uniform_below(half);
        t.chosen_a = src.uniform_below(t.chosen_q);
        if (std::gcd(t.chosen_a, t.chosen_q) == 1) {
            break;
        }
    }
    meter.mark_setup(t);

    const Nat q = t.chosen_q;
    const Nat a = t.chosen_a;
    const Nat range = (cfg_.x - a) / q + 1;
    const bool with_fallback = cfg_.algorithm == Algorithm::Uncond;
    while (true) {
        if (with_fallback && t.loop_iterations >= T_) {
            t.fallback_entered = true;
            return trivial(src, tester, t);
        }
        if (t.loop_iterations >= cap_) {
            hit_cap(cap_);
        }
        const Nat p = a + src.uniform_below(range) * q;
        ++t.loop_iterations;
        ++t.primality_tests;
        if (tester(p)) {
            return {p, t};
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

GenResult run_as(const GenConfig& cfg, Algorithm algorithm, CountingBitSource& src) {
    GenConfig c = cfg;
    c.algorithm = algorithm;
    const PrimeGenerator gen(std::move(c));
    PrimalityTester tester(gen.config().primality, nullptr, src.stream());
    return gen(src, tester);
}

}  // namespace

GenResult gen_trivial(const GenConfig& cfg, CountingBitSource& src) { return run_as(cfg, Algorithm::Trivial, src); }
GenResult gen_primeinc(const GenConfig& cfg, CountingBitSource& src) { return run_as(cfg, Algorithm::PrimeInc, src); }
GenResult gen_basic(const GenConfig& cfg, CountingBitSource& src) { return run_as(cfg, Algorithm::Basic, src); }
GenResult gen_erh_fallback(const GenConfig& cfg, CountingBitSource& src) {
    return run_as(cfg, Algorithm::ErhFallback, src);
}
GenResult gen_uncond(const GenConfig& cfg, CountingBitSource& src) { return run_as(cfg, Algorithm::Uncond, src); }
GenResult gen_uncond_nofallback(const GenConfig& cfg, CountingBitSource& src) {
    return run_as(cfg, Algorithm::UncondNoFallback, src);
}

}  // namespace primelab

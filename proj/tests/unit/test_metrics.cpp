#include <doctest.h>

#include <numeric>
#include <random>

#include "oracle.hpp"
#include "primelab/errors.hpp"
#include "primelab/metrics.hpp"

using namespace primelab;

namespace {

Rational R(long n, long d = 1) { return make_ratio<Rational>(n, d); }

FiniteDist<Rational> point_mass(Nat space, Nat at) { return FiniteDist<Rational>(space, {{at, R(1)}}); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("uniform distribution") {
    std::vector<Nat> s(10);
    std::iota(s.begin(), s.end(), 0);
    const auto m = metrics_of(uniform_dist<Rational>(s));
    CHECK(m.delta1 == 0);
    CHECK(m.delta2_sq == 0);
    CHECK(m.beta == R(1, 10));
    CHECK(m.gamma == R(1, 10));
    CHECK(m.h2_bits == doctest::Approx(std::log2(10.0)));
    CHECK(m.hmin_bits == doctest::Approx(std::log2(10.0)));
}

TEST_CASE("point mass with omitted zeros") {
    const auto m = metrics_of(point_mass(4, 2));
    CHECK(m.delta1 == R(3, 2));
    CHECK(m.beta == 1);
    CHECK(m.gamma == 1);
    CHECK(m.delta2_sq == R(3, 4));
    CHECK(m.h2_bits == 0.0);
    CHECK(m.hmin_bits == 0.0);

    const auto md = metrics_of(FiniteDist<double>(4, {{2, 1.0}}));
    CHECK(md.delta1 == doctest::Approx(1.5));
}

TEST_CASE("explicit zeros and omitted zeros agree") {
    const FiniteDist<Rational> a(5, {{1, R(1, 2)}, {2, R(1, 2)}});
    const FiniteDist<Rational> b(5, {{0, R(0)}, {1, R(1, 2)}, {2, R(1, 2)}, {3, R(0)}, {4, R(0)}});
    CHECK(metrics_of(a) == metrics_of(b));
    CHECK(tv_between(a, b) == 0);
}

TEST_CASE("hand-computed residue distribution at x = 30, q = 6") {
    // 1/6 on 7, 13, 19; 1/10 on 5, 11, 17, 23, 29; 0 on 2, 3.
    std::vector<FiniteDist<Rational>::Outcome> o;
    for (Nat p : {7, 13, 19}) o.emplace_back(p, R(1, 6));
    for (Nat p : {5, 11, 17, 23, 29}) o.emplace_back(p, R(1, 10));
    o.emplace_back(2, R(0));
    o.emplace_back(3, R(0));
    const auto m = metrics_of(FiniteDist<Rational>(10, o));
    CHECK(m.delta1 == R(2, 5));
}

TEST_CASE("tv_between") {
    std::vector<Nat> s{2, 3, 5, 7};
    const auto u = uniform_dist<Rational>(s);
    CHECK(tv_between(u, u) == 0);
    CHECK(tv_between(point_mass(4, 2), point_mass(4, 3)) == 2);
    CHECK(tv_between(point_mass(4, 2), u) == metrics_of(point_mass(4, 2)).delta1);
    CHECK_THROWS_AS(tv_between(point_mass(4, 2), point_mass(5, 2)), DomainError);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(FiniteDist<Rational>(2, {{0, R(1, 2)}}), DomainError);
    CHECK_THROWS_AS(FiniteDist<Rational>(2, {{0, R(1, 2)}, {0, R(1, 2)}}), DomainError);
    CHECK_THROWS_AS(FiniteDist<Rational>(1, {{0, R(1, 2)}, {1, R(1, 2)}}), DomainError);
    CHECK_THROWS_AS(FiniteDist<Rational>(2, {{0, R(3, 2)}, {1, R(-1, 2)}}), DomainError);
    CHECK_NOTHROW(FiniteDist<double>(2, {{0, 0.5 + 1e-10}, {1, 0.5}}));
    CHECK_THROWS_AS(FiniteDist<double>(2, {{0, 0.5 + 1e-8}, {1, 0.5}}), DomainError);
    CHECK_THROWS_AS(metrics_of(FiniteDist<Rational>(3, {})), DomainError);
}

TEST_CASE("empirical distribution") {
    const auto e = empirical_dist<Rational>(4, {{2, 3}, {3, 1}, {5, 0}});
    CHECK(e.mass_of(2) == R(3, 4));
    CHECK(e.mass_of(3) == R(1, 4));
    CHECK(e.mass_of(5) == 0);
    CHECK(e.outcomes().size() == 2);
}

TEST_CASE("random rational distributions satisfy the collision and min-entropy relations exactly") {
    std::mt19937_64 gen(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
        const Nat space = 1 + gen() % 64;
        const Nat support = 1 + gen() % space;
        std::vector<unsigned long> w(support);
        unsigned long total = 0;
        for (auto& v : w) {
            v = gen() % 1000;
            total += v;
        }
        if (total == 0) {
            w[0] = 1;
            total = 1;
        }
        std::vector<FiniteDist<Rational>::Outcome> o;
        oracle::Pmf ref;
        for (Nat i = 0; i < support; ++i) {
            o.emplace_back(i * 3 + 1, R(static_cast<long>(w[i]), static_cast<long>(total)));
            ref[i * 3 + 1] = oracle::frac(w[i], total);
        }
        const auto m = metrics_of(FiniteDist<Rational>(space, o));
        const auto r = oracle::metrics(ref, space);
        REQUIRE(m.delta1 == r.delta1);
        REQUIRE(m.delta2_sq == r.delta2_sq);
        REQUIRE(m.beta == r.beta);
        REQUIRE(m.gamma == r.gamma);

        const Rational inv = R(1, static_cast<long>(space));
        CHECK(m.gamma * m.gamma <= m.beta);
        CHECK(m.beta == inv + m.delta2_sq);
        CHECK(m.beta <= m.gamma);
        CHECK(m.gamma <= inv + m.delta1);
        CHECK(m.delta1 * m.delta1 <= m.delta2_sq * Rational(static_cast<long>(space)));
        CHECK(check_relations(m).all());
    }
}

TEST_CASE("double backend relations") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Nat space = 1 + gen() % 500;
        std::vector<double> w(space);
        double total = 0;
        for (auto& v : w) {
            v = static_cast<double>(gen() % 10000);
            total += v;
        }
        if (total == 0) continue;
        std::vector<FiniteDist<double>::Outcome> o;
        for (Nat i = 0; i < space; ++i) o.emplace_back(i, w[i] / total);
        CHECK(check_relations(metrics_of(FiniteDist<double>(space, o))).all());
    }
}

TEST_CASE("check_relations flags a broken bundle") {
    DistMetrics<Rational> m = metrics_of(point_mass(4, 1));
    m.beta = R(1, 2);
    CHECK_FALSE(check_relations(m).all());
    CHECK_FALSE(check_relations(m).beta_identity);
}

TEST_CASE("to_double") {
    const auto d = to_double(point_mass(4, 2));
    CHECK(d.mass_of(2) == 1.0);
    CHECK(to_double(metrics_of(point_mass(4, 2))).delta1 == 1.5);
}

}  // TEST_SUITE

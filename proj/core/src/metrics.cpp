#include "primelab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "primelab/errors.hpp"

namespace primelab {

namespace {

template <class Real>
bool mass_total_ok(const Real& total) {
    if constexpr (is_exact_v<Real>) {
        return total == 1;
    } else {
        return std::fabs(total - 1.0) <= kFloatMassTolerance;
    }
}

}  // namespace

template <class Real>
FiniteDist<Real>::FiniteDist(Nat space_size, std::vector<Outcome> outcomes)
    : space_size_(space_size), outcomes_(std::move(outcomes)) {
    if (outcomes_.size() > space_size_) {
        throw DomainError("FiniteDist: more stored outcomes than the space holds");
    }
    std::sort(outcomes_.begin(), outcomes_.end(),
              [](const Outcome& l, const Outcome& r) { return l.first < r.first; });
    Real total(0);
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
        if (i > 0 && outcomes_[i].first == outcomes_[i - 1].first) {
            throw DomainError("FiniteDist: duplicate outcome " + std::to_string(outcomes_[i].first));
        }
        const Real& m = outcomes_[i].second;
        if (m < 0 || m > 1) {
            throw DomainError("FiniteDist: mass outside [0, 1] at outcome " + std::to_string(outcomes_[i].first));
        }
        total += m;
    }
    if (!mass_total_ok(total)) {
        throw DomainError("FiniteDist: total mass " + std::to_string(to_double(total)) + " is not 1");
    }
}

template <class Real>
Real FiniteDist<Real>::mass_of(Nat s) const {
    const auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), s,
                                     [](const Outcome& o, Nat v) { return o.first < v; });
    if (it == outcomes_.end() || it->first != s) {
        return Real(0);
    }
    return it->second;
}

template <class Real>
Real FiniteDist<Real>::total_mass() const {
    Real total(0);
    for (const auto& [s, m] : outcomes_) {
        total += m;
    }
    return total;
}

template class FiniteDist<double>;
template class FiniteDist<Rational>;

template <class Real>
RelationCheck check_relations(const DistMetrics<Real>& m) {
    RelationCheck c;
    const Real uniform = make_ratio<Real>(1, m.space_size);
    if constexpr (is_exact_v<Real>) {
        const Real size = Real(mpz_class(static_cast<unsigned long>(m.space_size)));
        c.gamma_sq_le_beta = m.gamma * m.gamma <= m.beta;
        c.beta_identity = m.beta == uniform + m.delta2_sq;
        c.beta_le_gamma = m.beta <= m.gamma;
        c.gamma_le_uniform_plus_delta1 = m.gamma <= uniform + m.delta1;
        c.delta1_le_delta2_sqrt_s = m.delta1 * m.delta1 <= m.delta2_sq * size;
    } else {
        constexpr double slack = 1e-9;
        c.gamma_sq_le_beta = m.gamma * m.gamma <= m.beta + slack;
        c.beta_identity = std::fabs(m.beta - (uniform + m.delta2_sq)) <= 1e-12;
        c.beta_le_gamma = m.beta <= m.gamma + slack;
        c.gamma_le_uniform_plus_delta1 = m.gamma <= uniform + m.delta1 + slack;
        c.delta1_le_delta2_sqrt_s =
            m.delta1 <= std::sqrt(m.delta2_sq * static_cast<double>(m.space_size)) + slack;
    }
    return c;
}

template <class Real>
DistMetrics<Real> metrics_of(const FiniteDist<Real>& dist) {
    const auto outcomes = dist.outcomes();
    const bool any_mass = std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.second > 0; });
    if (!any_mass || dist.space_size() == 0) {
        throw DomainError("metrics_of: empty support");
    }
    DistMetrics<Real> m;
    m.space_size = dist.space_size();
    const Real uniform = make_ratio<Real>(1, m.space_size);
    for (const auto& [s, mass] : outcomes) {
        const Real diff = mass - uniform;
        m.delta1 += abs_value(diff);
        m.delta2_sq += diff * diff;
        m.beta += mass * mass;
        if (mass > m.gamma) {
            m.gamma = mass;
        }
    }
    const Nat missing = m.space_size - outcomes.size();
    if (missing > 0) {
        m.delta1 += make_ratio<Real>(missing, m.space_size);
        if constexpr (is_exact_v<Real>) {
            m.delta2_sq += Real(mpz_class(static_cast<unsigned long>(missing)),
                                mpz_class(static_cast<unsigned long>(m.space_size)) *
                                    mpz_class(static_cast<unsigned long>(m.space_size)));
            m.delta2_sq.canonicalize();
        } else {
            m.delta2_sq += static_cast<double>(missing) / (static_cast<double>(m.space_size) * m.space_size);
        }
    }
    m.h2_bits = -std::log2(to_double(m.beta));
    m.hmin_bits = -std::log2(to_double(m.gamma));
    if (!check_relations(m).all()) {
        throw std::logic_error("metrics_of: collision/min-entropy relations violated");
    }
    return m;
}

template <class Real>
Real tv_between(const FiniteDist<Real>& a, const FiniteDist<Real>& b) {
    if (a.space_size() != b.space_size()) {
        throw DomainError("tv_between: distributions live on spaces of different size");
    }
    const auto lhs = a.outcomes();
    const auto rhs = b.outcomes();
    Real total(0);
    std::size_t i = 0, j = 0;
    while (i < lhs.size() || j < rhs.size()) {
        if (j == rhs.size() || (i < lhs.size() && lhs[i].first < rhs[j].first)) {
            total += lhs[i++].second;
        } else if (i == lhs.size() || rhs[j].first < lhs[i].first) {
            total += rhs[j++].second;
        } else {
            total += abs_value(Real(lhs[i++].second - rhs[j++].second));
        }
    }
    return total;
}

template <class Real>
FiniteDist<Real> uniform_dist(std::span<const Nat> outcomes) {
    std::vector<typename FiniteDist<Real>::Outcome> mass;
    mass.reserve(outcomes.size());
    const Real each = make_ratio<Real>(1, outcomes.size());
    for (const Nat s : outcomes) {
        mass.emplace_back(s, each);
    }
    return FiniteDist<Real>(outcomes.size(), std::move(mass));
}

template <class Real>
FiniteDist<Real> empirical_dist(Nat space_size, const std::map<Nat, std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (const auto& [s, c] : counts) {
        total += c;
    }
    if (total == 0) {
        throw DomainError("empirical_dist: no observations");
    }
    std::vector<typename FiniteDist<Real>::Outcome> mass;
    for (const auto& [s, c] : counts) {
        if (c > 0) {
            mass.emplace_back(s, make_ratio<Real>(c, total));
        }
    }
    return FiniteDist<Real>(space_size, std::move(mass));
}

FiniteDist<double> to_double(const FiniteDist<Rational>& dist) {
    std::vector<FiniteDist<double>::Outcome> mass;
    mass.reserve(dist.outcomes().size());
    for (const auto& [s, m] : dist.outcomes()) {
        mass.emplace_back(s, m.get_d());
    }
    return FiniteDist<double>(dist.space_size(), std::move(mass));
}

DistMetrics<double> to_double(const DistMetrics<Rational>& m) {
    return {m.delta1.get_d(), m.delta2_sq.get_d(), m.beta.get_d(), m.gamma.get_d(),
            m.h2_bits,        m.hmin_bits,         m.space_size};
}

template RelationCheck check_relations(const DistMetrics<double>&);
template RelationCheck check_relations(const DistMetrics<Rational>&);
template DistMetrics<double> metrics_of(const FiniteDist<double>&);
template DistMetrics<Rational> metrics_of(const FiniteDist<Rational>&);
template double tv_between(const FiniteDist<double>&, const FiniteDist<double>&);
template Rational tv_between(const FiniteDist<Rational>&, const FiniteDist<Rational>&);
template FiniteDist<double> uniform_dist(std::span<const Nat>);
template FiniteDist<Rational> uniform_dist(std::span<const Nat>);
template FiniteDist<double> empirical_dist(Nat, const std::map<Nat, std::uint64_t>&);
template FiniteDist<Rational> empirical_dist(Nat, const std::map<Nat, std::uint64_t>&);

}  // namespace primelab

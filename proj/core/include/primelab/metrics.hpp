#pragma once

/// Regularity measures of finite probability distributions.
///
/// All distances are taken against the uniform distribution on a space of
/// `space_size` outcomes.  Outcomes absent from the stored mass list have mass 0
/// but still count toward the space.  The l1 distance carries no 1/2 factor.

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "primelab/ntheory.hpp"
#include "primelab/rational.hpp"

namespace primelab {

inline constexpr double kFloatMassTolerance = 1e-9;

/// Probability mass function on a finite space.  Stored outcomes are sorted and unique.
template <class Real>
class FiniteDist {
public:
    using Outcome = std::pair<Nat, Real>;

    /// Validates: masses in [0, 1], total mass 1 (exactly for Rational, within 1e-9 for
    /// double), no duplicate outcomes, stored count <= space_size.  Throws DomainError.
    FiniteDist(Nat space_size, std::vector<Outcome> outcomes);

    Nat space_size() const { return space_size_; }
    std::span<const Outcome> outcomes() const { return outcomes_; }

    /// Mass of s, 0 when s is not stored.
    Real mass_of(Nat s) const;
    Real total_mass() const;

private:
    Nat space_size_;
    std::vector<Outcome> outcomes_;
};

template <class Real>
struct DistMetrics {
    Real delta1{};     // sum |Pr[s] - 1/|S||
    Real delta2_sq{};  // sum (Pr[s] - 1/|S|)^2
    Real beta{};       // collision probability
    Real gamma{};      // max mass
    double h2_bits = 0.0;
    double hmin_bits = 0.0;
    Nat space_size = 0;

    bool operator==(const DistMetrics&) const = default;
};

/// Outcome of checking the collision / min-entropy relations on one metrics bundle.
struct RelationCheck {
    bool gamma_sq_le_beta = false;
    bool beta_identity = false;  // beta == 1/|S| + delta2^2
    bool beta_le_gamma = false;
    bool gamma_le_uniform_plus_delta1 = false;
    bool delta1_le_delta2_sqrt_s = false;

    bool all() const {
        return gamma_sq_le_beta && beta_identity && beta_le_gamma && gamma_le_uniform_plus_delta1 &&
               delta1_le_delta2_sqrt_s;
    }
};

/// Exact for Rational.  For double the identity is checked to 1e-12 and the
/// inequalities with 1e-9 slack.
template <class Real>
RelationCheck check_relations(const DistMetrics<Real>& m);

/// Throws DomainError on empty support; throws std::logic_error if the computed
/// bundle violates check_relations.
template <class Real>
DistMetrics<Real> metrics_of(const FiniteDist<Real>& dist);

/// l1 distance between two distributions on the same space (no 1/2 factor, like delta1).
template <class Real>
Real tv_between(const FiniteDist<Real>& a, const FiniteDist<Real>& b);

template <class Real>
FiniteDist<Real> uniform_dist(std::span<const Nat> outcomes);

/// Relative frequencies; zero-count outcomes are dropped.
template <class Real>
FiniteDist<Real> empirical_dist(Nat space_size, const std::map<Nat, std::uint64_t>& counts);

FiniteDist<double> to_double(const FiniteDist<Rational>& dist);
DistMetrics<double> to_double(const DistMetrics<Rational>& m);
inline const FiniteDist<double>& to_double(const FiniteDist<double>& dist) { return dist; }
inline const DistMetrics<double>& to_double(const DistMetrics<double>& m) { return m; }

extern template class FiniteDist<double>;
extern template class FiniteDist<Rational>;

}  // namespace primelab

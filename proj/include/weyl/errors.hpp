#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

// Input outside an operation's stated domain (bad exponent, r <= 0, ...).
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Spectral data queried beyond the certified range t_trust.
struct trust_error : std::runtime_error {
    explicit trust_error(const std::string& what) : std::runtime_error(what) {}
};

// Eigensolver or other numeric kernel failed to converge.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested discretization exceeds the memory budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature did not reach the requested tolerance.
struct quadrature_error : std::runtime_error {
    explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

// Series outside its contraction regime.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Spectral parameter at or below a resolvent pole.
struct pole_error : std::runtime_error {
    explicit pole_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace weyl

#ifndef DEGENSIM_ERRORS_HPP
#define DEGENSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace degensim {

/// Invalid user-facing configuration (grid extents, tags, config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the admissible interval of a nonlinearity or reaction.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched vector/matrix dimensions.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative method exhausted its budget before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double final_residual)
        : std::runtime_error(what), final_residual(final_residual) {}
    double final_residual;
};

/// Linear solve inside a time step failed.
class LinearSolveError : public std::runtime_error {
public:
    LinearSolveError(const std::string& what, double final_residual)
        : std::runtime_error(what), final_residual(final_residual) {}
    double final_residual;
};

/// Damped Newton exhausted its iteration or damping budget.
class NewtonDivergence : public std::runtime_error {
public:
    NewtonDivergence(const std::string& what, double last_residual, int step_index = -1)
        : std::runtime_error(what), last_residual(last_residual), step_index(step_index) {}
    double last_residual;
    int step_index;
};

/// Picard sweeps exhausted or stopped contracting.
class PicardDivergence : public std::runtime_error {
public:
    PicardDivergence(const std::string& what, double last_distance)
        : std::runtime_error(what), last_distance(last_distance) {}
    double last_distance;
};

} // namespace degensim

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace fcc {

/// Bad arguments: size or kind mismatches, parameters out of range.
class invalid_input_error : public std::invalid_argument {
public:
    explicit invalid_input_error(const std::string& what_arg)
        : std::invalid_argument(what_arg) {}
};

/// Geometric preconditions violated: non-positive-definite matrix,
/// antipodal sphere points, off-manifold coordinates.
class geometry_error : public std::runtime_error {
public:
    explicit geometry_error(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// A statistic is undefined because the sample carries no variation
/// (for example, zero sample Frechet variance).
class degenerate_error : public std::runtime_error {
public:
    explicit degenerate_error(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// An iterative solver stopped before reaching its tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what_arg, int iterations_run,
                      double gradient_norm_at_stop)
        : std::runtime_error(what_arg),
          iterations(iterations_run),
          gradient_norm(gradient_norm_at_stop) {}

    int iterations;
    double gradient_norm;
};

/// File or stream failure; carries a 1-based line number when parsing.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what_arg, long line_number = 0)
        : std::runtime_error(line_number > 0 ? what_arg + " (line " + std::to_string(line_number) + ")"
                                             : what_arg),
          line(line_number) {}

    long line;
};

}  // namespace fcc

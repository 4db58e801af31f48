#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xplore {

// Malformed inputs: unknown ids, bad field values, unparsable files.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A well-formed level whose tiles do not fit together.
class ValidationError : public std::runtime_error {
public:
    struct Offense {
        int row = 0;
        int col = 0;
        int neighbor_row = 0;
        int neighbor_col = 0;
        std::string reason;
    };

    ValidationError(const std::string& what, std::vector<Offense> offenses)
        : std::runtime_error(what), offenses_(std::move(offenses)) {}

    const std::vector<Offense>& offenses() const noexcept { return offenses_; }

private:
    std::vector<Offense> offenses_;
};

// Wave function collapse ran out of restarts.
class ContradictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Queries that violate their preconditions (e.g. a ray origin outside the world).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace xplore

#pragma once

#include <stdexcept>
#include <string>

namespace pervolt {

/// A stability, admissibility or stationarity condition required by an
/// operation failed, or could not be decided from the available data.
class ConditionNotMet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative procedure exhausted its iteration budget.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pervolt

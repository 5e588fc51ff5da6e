#ifndef CAMUV_ERRORS_HPP
#define CAMUV_ERRORS_HPP

#include <stdexcept>

namespace camuv {

/// Violation of an internal invariant (never expected on valid inputs).
/// The CLI maps this to exit code 3; ordinary input errors map to 2.
struct internal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace camuv

#endif

#ifndef CAMUV_VERSION_HPP
#define CAMUV_VERSION_HPP

namespace camuv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace camuv

#endif

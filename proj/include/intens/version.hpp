#ifndef INTENS_VERSION_HPP
#define INTENS_VERSION_HPP

namespace intens {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace intens

#endif

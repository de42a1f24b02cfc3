#ifndef MVM_VERSION_HPP
#define MVM_VERSION_HPP

#include <string_view>

#define MVM_VERSION "0.1.0"

namespace mvm {
inline constexpr std::string_view library_version = MVM_VERSION;
}

#endif  // MVM_VERSION_HPP

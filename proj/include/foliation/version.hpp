#pragma once

namespace foliation {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace foliation

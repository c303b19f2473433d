#pragma once

namespace heatdeco {

inline constexpr const char* kVersion = "heatdeco 1.0.0";

}  // namespace heatdeco

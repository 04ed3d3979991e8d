#pragma once

#include <string>

namespace forge {

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace forge

#pragma once

#include <vector>

namespace sky {

using Point = std::vector<double>;

}  // namespace sky

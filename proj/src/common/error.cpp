#include "forge/common/error.hpp"

namespace forge {

namespace {
std::string describe_cycle(const std::vector<std::string>& path) {
    std::string out = "inclusion cycle: ";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += " -> ";
        out += path[i];
    }
    return out;
}
}  // namespace

CycleError::CycleError(std::vector<std::string> path)
    : Error(describe_cycle(path)), path_(std::move(path)) {}

}  // namespace forge

#pragma once

#include <json.hpp>

#include <string>

namespace firth::cli {

/// Serializes with every floating-point number printed as %.17g; non-finite
/// numbers become null. Object keys keep nlohmann's sorted order.
std::string dump_json(const nlohmann::json& value, int indent = 2);

}  // namespace firth::cli

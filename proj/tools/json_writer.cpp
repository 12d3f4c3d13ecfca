#include "json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <string_view>

namespace firth::cli {

namespace {

void write(const nlohmann::json& v, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + nlohmann::json(it.key()).dump() + ": ";
            write(it.value(), indent, depth + 1, out);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k > 0) out += ",\n";
            out += pad;
            write(v[k], indent, depth + 1, out);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            out += "null";
            return;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        out += buf;
        // keep the value a float when read back
        if (std::string_view(buf).find_first_of(".e") == std::string_view::npos) out += ".0";
        return;
    }
    default:
        out += v.dump();
        return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
    std::string out;
    write(value, indent, 0, out);
    out += "\n";
    return out;
}

}  // namespace firth::cli

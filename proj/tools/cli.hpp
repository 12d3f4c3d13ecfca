#pragma once

#include "firth/link.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace firth::cli {

inline constexpr const char* kSchemaVersion = "firth-fit/1";

enum class Subcommand { Fit, CheckSeparation, Verify };

struct RunSpec {
    Subcommand subcommand = Subcommand::Fit;
    std::optional<std::string> input;
    LinkKind link = LinkKind::Logit;
    bool penalized = true;
    double tol = 1e-8;
    int max_iter = 200;
    std::uint64_t seed = 7;
    std::optional<std::string> out;

    nlohmann::json to_json() const;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs one command line (program name excluded). JSON goes to `out` or to
/// the --out file, a short human-readable summary to `err`. Nothing is
/// written to the JSON sink unless the document is complete.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace firth::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace nlaffine {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalAbort = 3;

struct CommandOptions {
    std::string out_dir = ".";
    /// 0: machine parallelism.
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    bool force = false;
    bool interpolate = false;
};

/// Each command writes its artifacts into out_dir and diagnostics to `log`.
int cmd_solve(const std::string& config_path, const CommandOptions& opt, std::ostream& log);
int cmd_simulate(const std::string& config_path, const CommandOptions& opt, std::ostream& log);
int cmd_check(const std::string& config_path, const CommandOptions& opt, std::ostream& log);
int cmd_compare(const std::string& surface_path, const std::string& estimate_path,
                const CommandOptions& opt, std::ostream& log);

}  // namespace nlaffine

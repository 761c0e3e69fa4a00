#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace tcval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

/// Writes `content` to a temporary sibling of `path`, then renames it over
/// `path`, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Executes a parsed configuration. Result files go under cfg.output;
/// stdout receives command output, stderr timing and warnings.
void execute(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err);

/// Full command line: `tcval <command> --config <file> [--out <prefix>]
/// [--threads N]`. Returns 0 on success, 2 on configuration errors and 3 on
/// engine-domain errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcval::cli

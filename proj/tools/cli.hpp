// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace voxvis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

struct Job {
    std::filesystem::path labels;
    std::filesystem::path calib;
    std::filesystem::path out_dir;
};

// One job per non-blank line: `labels calib out_dir`, whitespace separated,
// `#` starts a comment. Relative paths resolve against `base`.
struct JobManifest {
    std::vector<Job> jobs;
};

[[nodiscard]] JobManifest parse_manifest(std::string_view text, const std::filesystem::path& base);
// Inputs that do not exist, in manifest order.
[[nodiscard]] std::vector<std::filesystem::path> missing_inputs(const JobManifest& manifest);

// Runs one command line (args[0] is the subcommand). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace voxvis::cli

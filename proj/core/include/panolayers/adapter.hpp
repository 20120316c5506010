// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/layer_parsing.hpp"

#include <chrono>
#include <string>
#include <sys/types.h>
#include <vector>

namespace panolayers {

/// A child process spoken to with newline-delimited JSON over its stdin and
/// stdout. One request in flight at a time; not thread-safe.
class AdapterProcess {
public:
    AdapterProcess(std::vector<std::string> argv, std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~AdapterProcess();

    AdapterProcess(const AdapterProcess &)            = delete;
    AdapterProcess &operator=(const AdapterProcess &) = delete;

    /// Sends one line, returns the next line of output (without the newline).
    /// Throws AdapterProtocol on timeout or when the child exits.
    std::string request(const std::string &line);

    bool running() const noexcept { return mPid > 0; }

private:
    void shutdown() noexcept;

    pid_t mPid   = -1;
    int mToChild = -1;
    int mFromChild = -1;
    std::chrono::milliseconds mTimeout;
    std::string mBuffer;
};

/// Request: {"labels": {"1": "tree", ...}, "image_path": "..."}.
nlohmann::json make_assignment_request(const SegmentMap &seg, const std::string &image_path);

/// Validates {"assignments": {"1": 1, ...}} against the ids of `seg`: every id
/// must be covered exactly once with a value in 0..3.
LayerAssignment parse_assignment_response(const std::string &line, const SegmentMap &seg);

LayerAssignment request_adapter_assignment(const SegmentMap &seg, const std::string &image_path,
                                           AdapterProcess &adapter);

} // namespace panolayers

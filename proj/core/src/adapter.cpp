// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/adapter.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace panolayers {
namespace {

void
close_fd(int &fd) noexcept {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

} // namespace

AdapterProcess::AdapterProcess(std::vector<std::string> argv, std::chrono::milliseconds timeout)
    : mTimeout(timeout) {
    if (argv.empty()) {
        throw Error(ErrorCode::Config, "adapter command is empty");
    }
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
        throw Error(ErrorCode::Io, std::string("pipe: ") + std::strerror(errno));
    }

    std::vector<char *> args;
    for (auto &a : argv) {
        args.push_back(a.data());
    }
    args.push_back(nullptr);

    mPid = ::fork();
    if (mPid < 0) {
        throw Error(ErrorCode::Io, std::string("fork: ") + std::strerror(errno));
    }
    if (mPid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    mToChild   = in_pipe[1];
    mFromChild = out_pipe[0];
    ::fcntl(mToChild, F_SETFD, FD_CLOEXEC);
    ::fcntl(mFromChild, F_SETFD, FD_CLOEXEC);
}

AdapterProcess::~AdapterProcess() { shutdown(); }

void
AdapterProcess::shutdown() noexcept {
    close_fd(mToChild);
    close_fd(mFromChild);
    if (mPid > 0) {
        int status = 0;
        // Give the child a moment to exit on EOF before killing it.
        for (int i = 0; i < 20; ++i) {
            if (::waitpid(mPid, &status, WNOHANG) == mPid) {
                mPid = -1;
                return;
            }
            ::usleep(5000);
        }
        ::kill(mPid, SIGKILL);
        ::waitpid(mPid, &status, 0);
        mPid = -1;
    }
}

std::string
AdapterProcess::request(const std::string &line) {
    if (mPid <= 0) {
        throw Error(ErrorCode::AdapterProtocol, "adapter process is not running");
    }
    const std::string payload = line + "\n";
    std::size_t written       = 0;
    const auto old_handler    = std::signal(SIGPIPE, SIG_IGN);
    while (written < payload.size()) {
        const ssize_t n = ::write(mToChild, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            std::signal(SIGPIPE, old_handler);
            shutdown();
            throw Error(ErrorCode::AdapterProtocol, "adapter closed its input");
        }
        written += static_cast<std::size_t>(n);
    }
    std::signal(SIGPIPE, old_handler);

    const auto deadline = std::chrono::steady_clock::now() + mTimeout;
    for (;;) {
        if (auto nl = mBuffer.find('\n'); nl != std::string::npos) {
            std::string out = mBuffer.substr(0, nl);
            mBuffer.erase(0, nl + 1);
            return out;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            shutdown();
            throw Error(ErrorCode::AdapterProtocol, "adapter timed out after " + std::to_string(mTimeout.count()) + " ms");
        }
        pollfd pfd{mFromChild, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) {
            continue;
        }
        if (ready <= 0) {
            continue;
        }
        char chunk[4096];
        const ssize_t n = ::read(mFromChild, chunk, sizeof(chunk));
        if (n <= 0) {
            shutdown();
            throw Error(ErrorCode::AdapterProtocol, "adapter exited without a response");
        }
        mBuffer.append(chunk, static_cast<std::size_t>(n));
    }
}

nlohmann::json
make_assignment_request(const SegmentMap &seg, const std::string &image_path) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto &[id, label] : seg.labels) {
        labels[std::to_string(id)] = label;
    }
    return {{"labels", labels}, {"image_path", image_path}};
}

LayerAssignment
parse_assignment_response(const std::string &line, const SegmentMap &seg) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::AdapterProtocol, std::string("malformed response: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignments") || !doc.at("assignments").is_object()) {
        throw Error(ErrorCode::AdapterProtocol, "response lacks an \"assignments\" object");
    }
    LayerAssignment out;
    for (const auto &[key, value] : doc.at("assignments").items()) {
        int id = 0;
        try {
            std::size_t used = 0;
            id               = std::stoi(key, &used);
            if (used != key.size()) {
                throw std::invalid_argument(key);
            }
        } catch (const std::exception &) {
            throw Error(ErrorCode::AdapterProtocol, "non-integer instance id \"" + key + "\"");
        }
        if (!seg.labels.contains(id)) {
            throw Error(ErrorCode::AdapterProtocol, "unknown instance id " + key);
        }
        std::optional<LayerIndex> layer;
        if (value.is_number_integer()) {
            layer = layer_from_int(value.get<long long>());
        }
        if (!layer) {
            throw Error(ErrorCode::AdapterProtocol, "layer value " + value.dump() + " for id " + key + " is not in 0..3");
        }
        out[id] = *layer;
    }
    for (const auto &[id, _] : seg.labels) {
        if (!out.contains(id)) {
            throw Error(ErrorCode::AdapterProtocol, "response does not cover instance id " + std::to_string(id));
        }
    }
    return out;
}

LayerAssignment
request_adapter_assignment(const SegmentMap &seg, const std::string &image_path, AdapterProcess &adapter) {
    const std::string reply = adapter.request(make_assignment_request(seg, image_path).dump());
    return parse_assignment_response(reply, seg);
}

} // namespace panolayers

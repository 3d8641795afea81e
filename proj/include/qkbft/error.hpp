// Copyright 2026 The qkbft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qkbft {

/// Broad failure category. The CLI maps each category to its own exit code.
enum class ErrorKind {
    InvalidArgument,
    Degenerate,
    Io,
    Parse,
    Pipeline,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline const char *to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
        return "invalid-argument";
    case ErrorKind::Degenerate:
        return "degenerate";
    case ErrorKind::Io:
        return "io";
    case ErrorKind::Parse:
        return "parse";
    case ErrorKind::Pipeline:
        return "pipeline";
    }
    return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string &what) {
    if (!cond) {
        throw Error(ErrorKind::InvalidArgument, what);
    }
}

} // namespace qkbft

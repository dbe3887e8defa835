// Copyright 2026 The rtquad Authors
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
#include <vector>

namespace rtquad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
   public:
    using Error::Error;
};

/// Two or more pole rates coincide, so the partial-fraction coefficients diverge.
class DegeneratePoles : public Error {
   public:
    using Error::Error;
};

class IncompatibleGrid : public Error {
   public:
    using Error::Error;
};

class UnsupportedMode : public Error {
   public:
    using Error::Error;
};

/// dt is too coarse to resolve one of the filter poles.
class UndersampledFilter : public Error {
   public:
    using Error::Error;
};

class IndexError : public Error {
   public:
    using Error::Error;
};

class InsufficientData : public Error {
   public:
    using Error::Error;
};

/// Malformed or unsupported file contents.
class FormatError : public Error {
   public:
    using Error::Error;
};

/// Configuration validation failure. Carries one message per offending field.
class ConfigError : public Error {
   public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string> &problems() const noexcept {
        return problems_;
    }

   private:
    std::vector<std::string> problems_;
};

}  // namespace rtquad

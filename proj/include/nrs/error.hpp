// Copyright 2026 The nrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NRS_ERROR_HPP
#define NRS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nrs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid sizes that violate a precondition or do not agree with each other.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Parameter values outside their admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated files, unsupported header tokens.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace nrs

#endif

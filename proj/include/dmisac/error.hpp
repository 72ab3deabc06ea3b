// SPDX-License-Identifier: Apache-2.0
//
// dmisac: bounds and estimators for distributed multi-static ISAC sensing
// Copyright (C) 2026 The dmisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace dmisac
{
    enum class ErrorCode
    {
        Validation,
        Parse,
        DegenerateGeometry,
        Precondition,
        SingularInformation,
        NumericFailure,
        Io
    };

    const char *to_string(ErrorCode code);

    // All library failures are reported through this exception. `field` names the
    // offending input (scenario field, node, parameter) when there is one.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &message, std::string field = {});

        ErrorCode code() const noexcept { return code_; }
        const std::string &field() const noexcept { return field_; }

    private:
        ErrorCode code_;
        std::string field_;
    };

    // Quadrature that did not reach its tolerance.
    class NumericFailure : public Error
    {
    public:
        NumericFailure(const std::string &message, double achieved_tolerance);
        double achieved_tolerance() const noexcept { return achieved_; }

    private:
        double achieved_;
    };
}

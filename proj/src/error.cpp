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

#include "dmisac/error.hpp"

#include <cstdio>

namespace dmisac
{
    namespace
    {
        std::string format_g(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3g", x);
            return buf;
        }
    }

    const char *to_string(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::Validation: return "validation";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::SingularInformation: return "singular-information";
        case ErrorCode::NumericFailure: return "numeric-failure";
        case ErrorCode::Io: return "io";
        }
        return "unknown";
    }

    Error::Error(ErrorCode code, const std::string &message, std::string field)
        : std::runtime_error(message), code_(code), field_(std::move(field))
    {
    }

    NumericFailure::NumericFailure(const std::string &message, double achieved_tolerance)
        : Error(ErrorCode::NumericFailure, message + " (achieved tolerance " + format_g(achieved_tolerance) + ")"),
          achieved_(achieved_tolerance)
    {
    }
}

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

#include <functional>

#include "dmisac/common.hpp"

namespace dmisac
{
    struct QuadratureResult
    {
        cplx value{};
        double error = 0.0;
        double l1 = 0.0;
    };

    // Adaptive 15-point Gauss-Kronrod on [a, b] with at most 2^max_depth panels. Throws
    // NumericFailure when the error estimate exceeds rel_tol * L1 norm.
    QuadratureResult integrate(const std::function<cplx(double)> &f, double a, double b, double rel_tol = 1e-12,
                               unsigned max_depth = 15);

    double integrate_real(const std::function<double(double)> &f, double a, double b, double rel_tol = 1e-12,
                          unsigned max_depth = 15);
}

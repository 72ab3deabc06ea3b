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

#include "dmisac/common.hpp"

namespace dmisac
{
    // Condition number of D J D with D = diag(|J_ii|^-1/2): the scaling-invariant figure of merit
    // for information matrices whose parameters carry very different units. Returns +inf for an
    // indefinite or singular matrix.
    double equilibrated_condition(const Eigen::MatrixXd &j);

    struct SymmetricInverse
    {
        Eigen::MatrixXd inverse;
        double condition = 0.0;
        double min_eigenvalue = 0.0; // of the equilibrated matrix
        bool pseudo = false;
    };

    // Inverse of a symmetric information matrix via pivoted LDL^T on the equilibrated matrix.
    // Above `max_condition` either throws SingularInformation or, with allow_pseudo, returns the
    // eigen-truncated pseudo-inverse and sets `pseudo`.
    SymmetricInverse symmetric_inverse(const Eigen::MatrixXd &j, double max_condition, bool allow_pseudo = false,
                                       const char *what = "information matrix");
}

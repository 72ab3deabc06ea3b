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

#include <string>

#include "dmisac/scenario.hpp"

namespace dmisac
{
    // JSON scenario documents; all field names carry their SI unit. Parse errors report the line,
    // validation errors the offending field path (e.g. "targets[0].rcs").
    Scenario scenario_from_json(const std::string &text, const std::string &source = "<string>");
    std::string scenario_to_json(const Scenario &scenario);

    Scenario load_scenario(const std::string &path);
    void save_scenario(const std::string &path, const Scenario &scenario);
}

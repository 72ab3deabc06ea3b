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
#include <vector>

// Minimal self-contained SVG charts for the CLI's tables.
namespace svg
{
    struct Series
    {
        std::string label;
        std::vector<double> x, y;
        bool dashed = false;
    };

    struct Panel
    {
        std::string title;
        std::string xlabel, ylabel;
        bool log_x = false;
        bool log_y = true;
        std::vector<Series> series;
    };

    // Panels laid out side by side.
    std::string line_chart(const std::vector<Panel> &panels);

    // Row-major values (ys.size() x xs.size()), drawn in dB relative to the maximum and clipped at floor_db.
    std::string heatmap(const std::string &title, const std::string &xlabel, const std::string &ylabel,
                        const std::vector<double> &xs, const std::vector<double> &ys,
                        const std::vector<double> &values, double floor_db = -40.0);
}

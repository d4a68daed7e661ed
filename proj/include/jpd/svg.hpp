// Copyright 2026 the jpdkit authors
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

#pragma once

#include <string>
#include <vector>

namespace jpd {

enum class SvgMarker { kNone, kCircle, kCross };

struct SvgSeries {
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f77b4";
    std::string label;
    bool line = true;
    SvgMarker marker = SvgMarker::kNone;
};

struct SvgPlot {
    int width = 680;
    int height = 460;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool invert_x = false;  // vowel-space style axes
    bool invert_y = false;
    std::vector<SvgSeries> series;
};

void write_svg(const std::string& path, const SvgPlot& plot);

}  // namespace jpd

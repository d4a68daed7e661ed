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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jpd/error.hpp"

namespace jpd {

// One row of the shared response schema. Simulated and audio-derived
// responses use the same columns, so everything downstream of this file is
// source-agnostic.
//
//   subject,stimulus,repetition,trial,time_s,f1_hz,f2_hz,f0_hz,flags
struct ResponseRow {
    int subject = 0;
    int stimulus = 0;
    int repetition = 0;
    int trial = 0;
    double time_s = 0.0;
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    double f0_hz = 0.0;
    std::string flags;
};

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline void write_responses_csv(const std::string& path,
                                const std::vector<ResponseRow>& rows) {
    std::ofstream out(path);
    if (!out) throw error("write_responses_csv: cannot open " + path);
    out << "subject,stimulus,repetition,trial,time_s,f1_hz,f2_hz,f0_hz,flags\n";
    for (const auto& r : rows)
        out << r.subject << ',' << r.stimulus << ',' << r.repetition << ',' << r.trial
            << ',' << csv_num(r.time_s) << ',' << csv_num(r.f1_hz) << ','
            << csv_num(r.f2_hz) << ',' << csv_num(r.f0_hz) << ',' << r.flags << '\n';
    if (!out) throw error("write_responses_csv: write failed: " + path);
}

inline std::vector<ResponseRow> read_responses_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("read_responses_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw data_error("read_responses_csv: empty file " + path);
    std::vector<ResponseRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() < 8)
            throw data_error("read_responses_csv: malformed row in " + path);
        ResponseRow r;
        r.subject = std::stoi(f[0]);
        r.stimulus = std::stoi(f[1]);
        r.repetition = std::stoi(f[2]);
        r.trial = std::stoi(f[3]);
        r.time_s = std::stod(f[4]);
        r.f1_hz = std::stod(f[5]);
        r.f2_hz = std::stod(f[6]);
        r.f0_hz = std::stod(f[7]);
        r.flags = f.size() > 8 ? f[8] : "";
        rows.push_back(r);
    }
    return rows;
}

}  // namespace jpd

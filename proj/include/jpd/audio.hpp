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

// Mono audio, float samples nominally in [-1, 1].
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0;

    double duration() const {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate
                                 : 0.0;
    }
};

// RIFF WAVE, PCM 16-bit signed little-endian, mono only.
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& wf);

// Windowed-sinc resampler (Hann window, 32 taps per side).
Waveform resample(const Waveform& wf, double new_rate);

// Scale so the peak sits at `peak_dbfs` (default -3 dBFS). Silence is
// returned unchanged.
void peak_normalize(Waveform& wf, double peak_dbfs = -3.0);

bool has_clipping(const Waveform& wf, double threshold = 0.999);
bool has_non_finite(const Waveform& wf);

}  // namespace jpd

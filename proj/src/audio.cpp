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

#include "jpd/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "jpd/error.hpp"

namespace jpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

void put_u16(std::ofstream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ofstream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF),
                       static_cast<char>((v >> 24) & 0xFF)};
    out.write(b, 4);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Waveform read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw audio_error("read_wav: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw audio_error("read_wav: not a RIFF WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t chunk_size = get_u32(bytes.data() + pos + 4);
        const unsigned char* body = bytes.data() + pos + 8;
        if (pos + 8 + chunk_size > bytes.size()) break;
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0 && chunk_size >= 16) {
            format = get_u16(body);
            channels = get_u16(body + 2);
            rate = get_u32(body + 4);
            bits = get_u16(body + 14);
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            data = body;
            data_size = chunk_size;
        }
        pos += 8 + chunk_size + (chunk_size & 1);
    }

    if (format != 1 || bits != 16)
        throw audio_error("read_wav: only 16-bit PCM is supported: " + path);
    if (channels != 1) throw audio_error("read_wav: only mono is supported: " + path);
    if (!data || rate == 0) throw audio_error("read_wav: missing data chunk: " + path);

    Waveform wf;
    wf.sample_rate = static_cast<double>(rate);
    const std::size_t n = data_size / 2;
    wf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t s =
            static_cast<std::int16_t>(get_u16(data + 2 * i));
        wf.samples[i] = static_cast<double>(s) / 32768.0;
    }
    return wf;
}

void write_wav(const std::string& path, const Waveform& wf) {
    if (wf.sample_rate <= 0.0) throw audio_error("write_wav: invalid sample rate");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw audio_error("write_wav: cannot open " + path);

    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(wf.sample_rate));
    const std::uint32_t data_size = static_cast<std::uint32_t>(wf.samples.size() * 2);

    out.write("RIFF", 4);
    put_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);  // byte rate
    put_u16(out, 2);         // block align
    put_u16(out, 16);        // bits
    out.write("data", 4);
    put_u32(out, data_size);
    for (double s : wf.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const std::int16_t v =
            static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(v));
    }
    if (!out) throw audio_error("write_wav: write failed: " + path);
}

Waveform resample(const Waveform& wf, double new_rate) {
    if (new_rate <= 0.0) throw audio_error("resample: invalid target rate");
    if (wf.samples.empty() || wf.sample_rate <= 0.0)
        throw audio_error("resample: empty input");
    if (std::abs(new_rate - wf.sample_rate) < 1e-9) return wf;

    const double ratio = new_rate / wf.sample_rate;
    const std::size_t out_n =
        static_cast<std::size_t>(std::floor(wf.samples.size() * ratio));
    // Cut off slightly below the smaller Nyquist to leave room for the
    // window's transition band.
    const double cutoff = 0.45 * std::min(1.0, ratio);
    constexpr int kTaps = 32;

    Waveform out;
    out.sample_rate = new_rate;
    out.samples.resize(out_n);
    const auto& x = wf.samples;
    const int n = static_cast<int>(x.size());

    for (std::size_t i = 0; i < out_n; ++i) {
        const double center = static_cast<double>(i) / ratio;
        const int k0 = static_cast<int>(std::floor(center)) - kTaps + 1;
        const int k1 = static_cast<int>(std::floor(center)) + kTaps;
        double acc = 0.0, wsum = 0.0;
        for (int k = std::max(0, k0); k <= std::min(n - 1, k1); ++k) {
            const double t = center - k;
            const double sinc =
                t == 0.0 ? 2.0 * cutoff : std::sin(2.0 * kPi * cutoff * t) / (kPi * t);
            const double win = 0.5 + 0.5 * std::cos(kPi * t / kTaps);
            acc += x[k] * sinc * win;
            wsum += sinc * win;
        }
        out.samples[i] = wsum != 0.0 ? acc / wsum : 0.0;
    }
    return out;
}

void peak_normalize(Waveform& wf, double peak_dbfs) {
    double peak = 0.0;
    for (double s : wf.samples) peak = std::max(peak, std::abs(s));
    if (peak <= 0.0) return;
    const double target = std::pow(10.0, peak_dbfs / 20.0);
    const double gain = target / peak;
    for (double& s : wf.samples) s *= gain;
}

bool has_clipping(const Waveform& wf, double threshold) {
    for (double s : wf.samples)
        if (std::abs(s) >= threshold) return true;
    return false;
}

bool has_non_finite(const Waveform& wf) {
    for (double s : wf.samples)
        if (!std::isfinite(s)) return true;
    return false;
}

}  // namespace jpd

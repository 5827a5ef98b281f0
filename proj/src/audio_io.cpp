// Copyright 2026 The advaudio Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advaudio/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace advaudio {

namespace {

constexpr double kFullScale = 32768.0;

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer decode_wav(const unsigned char* bytes, std::size_t size) {
    if (size < 12 || std::memcmp(bytes, "RIFF", 4) != 0 ||
        std::memcmp(bytes + 8, "WAVE", 4) != 0) {
        throw MalformedWav("not a RIFF/WAVE file");
    }

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= size) {
        const unsigned char* hdr = bytes + pos;
        uint32_t chunk_size = read_u32(hdr + 4);
        const unsigned char* body = hdr + 8;
        if (pos + 8 + chunk_size > size) {
            throw MalformedWav("chunk size exceeds file size");
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw MalformedWav("fmt chunk too small");
            format = read_u16(body);
            channels = read_u16(body + 2);
            rate = read_u32(body + 4);
            bits = read_u16(body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = body;
            data_size = chunk_size;
        }
        // chunks are word-aligned
        pos += 8 + chunk_size + (chunk_size & 1);
    }

    if (!have_fmt || data == nullptr) throw MalformedWav("missing fmt or data chunk");
    if (format != 1 || bits != 16) {
        throw UnsupportedEncoding("only 16-bit PCM is supported (format=" +
                                  std::to_string(format) + ", bits=" +
                                  std::to_string(bits) + ")");
    }
    if (channels == 0 || rate == 0) throw MalformedWav("zero channels or sample rate");

    std::size_t n_frames = data_size / (2 * channels);
    if (n_frames == 0) throw EmptyAudio("wav contains no samples");

    AudioBuffer buf;
    buf.sample_rate = static_cast<int>(rate);
    buf.samples.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + 2 * (i * channels + c);
            int16_t v = static_cast<int16_t>(read_u16(p));
            acc += static_cast<double>(v) / kFullScale;
        }
        buf.samples[i] = acc / channels;
    }
    return buf;
}

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_wav(bytes.data(), bytes.size());
}

std::vector<unsigned char> encode_wav(const AudioBuffer& buffer) {
    if (buffer.samples.empty()) throw EmptyAudio("refusing to write empty buffer");

    uint32_t data_size = static_cast<uint32_t>(buffer.samples.size() * 2);
    std::vector<unsigned char> out;
    out.reserve(44 + data_size);

    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<uint32_t>(buffer.sample_rate));
    put_u32(out, static_cast<uint32_t>(buffer.sample_rate) * 2);
    put_u16(out, 2);   // block align
    put_u16(out, 16);  // bits
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_size);

    for (double s : buffer.samples) {
        long q = std::lround(s * kFullScale);
        q = std::clamp(q, -32768L, 32767L);
        put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
    }
    return out;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
    std::vector<unsigned char> bytes = encode_wav(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoFailure("short write to " + path);
}

AudioBuffer resample_check(const AudioBuffer& buffer, int required_rate) {
    if (buffer.sample_rate != required_rate) {
        throw SampleRateMismatch(buffer.sample_rate, required_rate);
    }
    return buffer;
}

}  // namespace advaudio

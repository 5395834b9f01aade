#include "batnet/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "batnet/errors.hpp"

namespace batnet {

namespace {

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                       static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

}  // namespace

PcmBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError("cannot open " + path);

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw WavError(path + ": not a RIFF file");
    read_u32(in);  // riff size, unused
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw WavError(path + ": not a WAVE file");

    PcmBuffer pcm;
    bool have_fmt = false;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;

    while (in.read(tag, 4)) {
        const std::uint32_t size = read_u32(in);
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            const std::uint16_t format = read_u16(in);
            channels = read_u16(in);
            pcm.sample_rate_hz = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            bits = read_u16(in);
            if (size > 16) in.seekg(size - 16, std::ios::cur);
            if (format != 1) throw WavError(path + ": only PCM format supported");
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw WavError(path + ": data chunk before fmt");
            if (channels != 1) throw WavError(path + ": only mono supported");
            if (bits != 16) throw WavError(path + ": only 16-bit samples supported");
            const std::size_t count = size / 2;
            pcm.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const std::int16_t s = static_cast<std::int16_t>(read_u16(in));
                pcm.samples[i] = s / 32768.0;
            }
            if (!in) throw WavError(path + ": truncated data chunk");
            return pcm;
        } else {
            in.seekg(size + (size & 1), std::ios::cur);  // skip unknown chunk
        }
    }
    throw WavError(path + ": no data chunk");
}

void write_wav(const std::string& path, const PcmBuffer& pcm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WavError("cannot open " + path + " for writing");

    const std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.samples.size() * 2);
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(pcm.sample_rate_hz));

    out.write("RIFF", 4);
    write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, 1);  // mono
    write_u32(out, rate);
    write_u32(out, rate * 2);  // byte rate
    write_u16(out, 2);         // block align
    write_u16(out, 16);        // bits per sample
    out.write("data", 4);
    write_u32(out, data_bytes);

    for (double x : pcm.samples) {
        // Round half away from zero, then clamp.
        long v = std::lround(x * 32768.0);
        if (v > 32767) v = 32767;
        if (v < -32768) v = -32768;
        write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    if (!out) throw WavError(path + ": write failed");
}

}  // namespace batnet

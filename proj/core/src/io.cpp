#include "pet/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pet/errors.hpp"

namespace pet {

namespace {

constexpr bool host_little_endian() { return std::endian::native == std::endian::little; }

void byteswap32(void* p, size_t count) {
    auto* b = static_cast<uint8_t*>(p);
    for (size_t i = 0; i < count; ++i, b += 4) {
        std::swap(b[0], b[3]);
        std::swap(b[1], b[2]);
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    return f;
}

// Reads one whitespace-delimited token, skipping comments is not needed for
// our strict formats.
std::string next_token(std::istream& in) {
    std::string t;
    if (!(in >> t)) throw IoError("unexpected end of header");
    return t;
}

uint32_t read_u32le(std::istream& in) {
    uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("truncated header");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void write_u32le(std::ostream& out, uint32_t v) {
    const uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void read_f32_payload(std::istream& in, float* dst, size_t count, bool file_little) {
    in.read(reinterpret_cast<char*>(dst), std::streamsize(count * 4));
    if (size_t(in.gcount()) != count * 4) throw IoError("truncated float payload");
    if (file_little != host_little_endian()) byteswap32(dst, count);
}

void write_f32_payload(std::ostream& out, const float* src, size_t count, bool file_little) {
    if (file_little == host_little_endian()) {
        out.write(reinterpret_cast<const char*>(src), std::streamsize(count * 4));
        return;
    }
    std::vector<float> tmp(src, src + count);
    byteswap32(tmp.data(), count);
    out.write(reinterpret_cast<const char*>(tmp.data()), std::streamsize(count * 4));
}

} // namespace

// ---- PFM ---------------------------------------------------------------

ImageF read_pfm(const std::string& path) {
    std::ifstream f = open_in(path);
    const std::string magic = next_token(f);
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw IoError("'" + path + "': not a PFM file (bad magic)");
    int w = 0, h = 0;
    double scale = 0.0;
    try {
        w = std::stoi(next_token(f));
        h = std::stoi(next_token(f));
        scale = std::stod(next_token(f));
    } catch (const std::exception&) {
        throw IoError("'" + path + "': malformed PFM header");
    }
    if (w <= 0 || h <= 0) throw IoError("'" + path + "': bad PFM dimensions");
    if (scale == 0.0) throw IoError("'" + path + "': zero PFM scale");
    f.get();  // single whitespace after the scale

    ImageF img(w, h, channels);
    const bool little = scale < 0.0;
    std::vector<float> row(size_t(w) * channels);
    for (int y = 0; y < h; ++y) {
        read_f32_payload(f, row.data(), row.size(), little);
        // PFM rows are stored bottom-up
        std::memcpy(img.pixel(0, h - 1 - y), row.data(), row.size() * 4);
    }
    for (float& v : img.data) {
        if (!std::isfinite(v)) throw IoError("'" + path + "': non-finite sample in PFM");
        v = float(v * std::abs(scale));
    }
    return img;
}

void write_pfm(const std::string& path, const ImageF& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ConfigError("write_pfm: images must have 1 or 3 channels");
    if (img.empty()) throw ConfigError("write_pfm: empty image");
    std::ofstream f = open_out(path);
    char header[64];
    std::snprintf(header, sizeof header, "%s\n%d %d\n-1.000000\n",
                  img.channels == 3 ? "PF" : "Pf", img.width, img.height);
    f << header;
    const size_t rowlen = size_t(img.width) * img.channels;
    for (int y = img.height - 1; y >= 0; --y)
        write_f32_payload(f, img.pixel(0, y), rowlen, true);
    if (!f) throw IoError("write_pfm: write failed for '" + path + "'");
}

// ---- estimate stacks ---------------------------------------------------

namespace {
constexpr char kStackMagic[4] = {'P', 'E', 'S', '1'};
constexpr uint32_t kFlagAlpha = 1u;
constexpr uint32_t kFlagBeta = 2u;
} // namespace

EstimateStack read_stack(const std::string& path) {
    std::ifstream f = open_in(path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kStackMagic, 4) != 0)
        throw IoError("'" + path + "': not a stack file (bad magic)");
    const uint32_t w = read_u32le(f), h = read_u32le(f), c = read_u32le(f);
    const uint32_t m = read_u32le(f), flags = read_u32le(f);
    if (w == 0 || h == 0 || (c != 1 && c != 3) || m == 0 || m > 65535)
        throw IoError("'" + path + "': bad stack header");

    EstimateStack s{int(w), int(h), int(c), int(m)};
    const size_t plane = size_t(w) * h * c;
    std::vector<float> buf(plane);
    for (uint32_t k = 0; k < m; ++k) {
        read_f32_payload(f, buf.data(), plane, true);
        for (uint32_t y = 0; y < h; ++y)
            for (uint32_t x = 0; x < w; ++x)
                std::memcpy(s.estimate(int(x), int(y), int(k)),
                            &buf[(size_t(y) * w + x) * c], size_t(c) * 4);
    }
    if (flags & kFlagAlpha) {
        s.aux.alpha = ImageF(int(w), int(h), int(c));
        read_f32_payload(f, s.aux.alpha.data.data(), plane, true);
    }
    if (flags & kFlagBeta) {
        s.aux.beta = ImageF(int(w), int(h), int(c));
        read_f32_payload(f, s.aux.beta.data.data(), plane, true);
    }
    for (float v : s.data)
        if (!std::isfinite(v)) throw IoError("'" + path + "': non-finite sample in stack");
    return s;
}

void write_stack(const std::string& path, const EstimateStack& stack) {
    if (stack.ragged())
        throw ConfigError("write_stack: ragged stacks cannot be serialized");
    if (stack.m > 65535) throw ConfigError("write_stack: M too large");
    std::ofstream f = open_out(path);
    f.write(kStackMagic, 4);
    write_u32le(f, uint32_t(stack.width));
    write_u32le(f, uint32_t(stack.height));
    write_u32le(f, uint32_t(stack.channels));
    write_u32le(f, uint32_t(stack.m));
    uint32_t flags = 0;
    if (!stack.aux.alpha.empty()) flags |= kFlagAlpha;
    if (!stack.aux.beta.empty()) flags |= kFlagBeta;
    write_u32le(f, flags);

    const size_t plane = size_t(stack.width) * stack.height * stack.channels;
    std::vector<float> buf(plane);
    for (int k = 0; k < stack.m; ++k) {
        for (int y = 0; y < stack.height; ++y)
            for (int x = 0; x < stack.width; ++x)
                std::memcpy(&buf[(size_t(y) * stack.width + x) * stack.channels],
                            stack.estimate(x, y, k), size_t(stack.channels) * 4);
        write_f32_payload(f, buf.data(), plane, true);
    }
    if (flags & kFlagAlpha) write_f32_payload(f, stack.aux.alpha.data.data(), plane, true);
    if (flags & kFlagBeta) write_f32_payload(f, stack.aux.beta.data.data(), plane, true);
    if (!f) throw IoError("write_stack: write failed for '" + path + "'");
}

// ---- PGM16 -------------------------------------------------------------

void write_pgm16(const std::string& path, int w, int h, const std::vector<uint16_t>& v) {
    if (w <= 0 || h <= 0 || v.size() != size_t(w) * h)
        throw ConfigError("write_pgm16: bad dimensions");
    std::ofstream f = open_out(path);
    char header[48];
    std::snprintf(header, sizeof header, "P5\n%d %d\n65535\n", w, h);
    f << header;
    std::vector<uint8_t> bytes(v.size() * 2);
    for (size_t i = 0; i < v.size(); ++i) {
        bytes[2 * i] = uint8_t(v[i] >> 8);  // big-endian per PGM
        bytes[2 * i + 1] = uint8_t(v[i] & 0xff);
    }
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) throw IoError("write_pgm16: write failed for '" + path + "'");
}

std::vector<uint16_t> read_pgm16(const std::string& path, int& w, int& h) {
    std::ifstream f = open_in(path);
    if (next_token(f) != "P5") throw IoError("'" + path + "': not a P5 PGM");
    int maxval = 0;
    try {
        w = std::stoi(next_token(f));
        h = std::stoi(next_token(f));
        maxval = std::stoi(next_token(f));
    } catch (const std::exception&) {
        throw IoError("'" + path + "': malformed PGM header");
    }
    if (w <= 0 || h <= 0 || maxval != 65535)
        throw IoError("'" + path + "': expected a 16-bit PGM");
    f.get();
    std::vector<uint8_t> bytes(size_t(w) * h * 2);
    f.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (size_t(f.gcount()) != bytes.size()) throw IoError("'" + path + "': truncated PGM payload");
    std::vector<uint16_t> v(size_t(w) * h);
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = uint16_t(uint16_t(bytes[2 * i]) << 8 | bytes[2 * i + 1]);
    return v;
}

void write_mask(const std::string& path, const DitherMask& mask) {
    if (mask.ranks.size() > 65536)
        throw ConfigError("write_mask: rank range exceeds 16-bit PGM");
    std::vector<uint16_t> v(mask.ranks.begin(), mask.ranks.end());
    write_pgm16(path, mask.width, mask.height, v);
}

DitherMask read_mask(const std::string& path) {
    DitherMask mask;
    std::vector<uint16_t> v = read_pgm16(path, mask.width, mask.height);
    mask.ranks.assign(v.begin(), v.end());
    // validate the rank bijection
    std::vector<uint8_t> seen(mask.ranks.size(), 0);
    for (uint32_t r : mask.ranks) {
        if (r >= mask.ranks.size() || seen[r])
            throw IoError("'" + path + "': mask ranks are not a permutation");
        seen[r] = 1;
    }
    refresh_thresholds(mask);
    return mask;
}

void write_selection(const std::string& path, const SelectionImage& sel) {
    write_pgm16(path, sel.width, sel.height, sel.sel);
}

SelectionImage read_selection(const std::string& path) {
    SelectionImage s;
    s.sel = read_pgm16(path, s.width, s.height);
    return s;
}

// ---- permutations ------------------------------------------------------

void write_permutation_csv(const std::string& path, const Permutation& p) {
    std::ofstream f = open_out(path);
    f << "index,source\n";
    for (size_t i = 0; i < p.source.size(); ++i) f << i << ',' << p.source[i] << '\n';
    if (!f) throw IoError("write_permutation_csv: write failed for '" + path + "'");
}

Permutation read_permutation_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("index,source", 0) != 0)
        throw IoError("'" + path + "': missing permutation CSV header");
    std::vector<uint32_t> src;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw IoError("'" + path + "': malformed CSV row");
        try {
            const size_t idx = std::stoul(line.substr(0, comma));
            if (idx != src.size()) throw IoError("'" + path + "': CSV rows out of order");
            src.push_back(uint32_t(std::stoul(line.substr(comma + 1))));
        } catch (const IoError&) {
            throw;
        } catch (const std::exception&) {
            throw IoError("'" + path + "': malformed CSV row");
        }
    }
    Permutation p;
    p.source = std::move(src);
    // caller owns width/height; stored flat. Infer a square if possible.
    p.width = int(p.source.size());
    p.height = 1;
    if (!p.is_bijection()) throw IoError("'" + path + "': permutation is not a bijection");
    return p;
}

void write_displacement_map(const std::string& path, const Permutation& p) {
    if (p.width <= 0 || p.height <= 0 || p.width > 32767 || p.height > 32767)
        throw ConfigError("write_displacement_map: bad permutation dimensions");
    std::vector<uint16_t> v(size_t(p.width) * p.height * 2);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) {
            const int s = int(p.source[size_t(y) * p.width + x]);
            const int dx = s % p.width - x;
            const int dy = s / p.width - y;
            v[size_t(y) * p.width + x] = uint16_t(dx + 32768);
            v[size_t(p.height + y) * p.width + x] = uint16_t(dy + 32768);
        }
    write_pgm16(path, p.width, 2 * p.height, v);
}

// ---- PPM preview -------------------------------------------------------

void write_ppm(const std::string& path, const ImageF& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ConfigError("write_ppm: images must have 1 or 3 channels");
    std::ofstream f = open_out(path);
    char header[48];
    std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", img.width, img.height);
    f << header;
    std::vector<uint8_t> row(size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const float v = img.at(x, y, img.channels == 3 ? c : 0);
                const float cl = std::min(1.0f, std::max(0.0f, v));
                row[size_t(x) * 3 + size_t(c)] = uint8_t(std::lround(cl * 255.0f));
            }
        }
        f.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!f) throw IoError("write_ppm: write failed for '" + path + "'");
}

// ---- CSV ---------------------------------------------------------------

void write_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ofstream f = open_out(path);
    f << "sweep,energy\n";
    char buf[64];
    for (size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
        f << buf;
    }
    if (!f) throw IoError("write_trace_csv: write failed for '" + path + "'");
}

// ---- misc --------------------------------------------------------------

std::string file_hash_hex(const std::string& path) {
    std::ifstream f = open_in(path);
    uint64_t hash = 0xcbf29ce484222325ull;
    char buf[4096];
    while (f) {
        f.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            hash ^= uint8_t(buf[i]);
            hash *= 0x100000001b3ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(out);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f = open_in(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f = open_out(path);
    f << text;
    if (!f) throw IoError("write_text_file: write failed for '" + path + "'");
}

} // namespace pet

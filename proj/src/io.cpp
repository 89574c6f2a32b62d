#include "gtomo/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <png.h>

namespace gtomo::io {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

fs::path sidecar_path(const fs::path& payload) {
    fs::path p = payload;
    p += ".json";
    return p;
}

void write_raw_f32(const fs::path& path, std::span<const float> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (float v : values) {
            std::uint32_t u;
            std::memcpy(&u, &v, 4);
            u = byteswap32(u);
            out.write(reinterpret_cast<const char*>(&u), 4);
        }
    }
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::vector<float> read_raw_f32(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % 4 != 0) throw IoError("'" + path.string() + "' is not a float32 stream");
    std::vector<float> values(bytes / 4);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("short read from '" + path.string() + "'");
    if constexpr (std::endian::native == std::endian::big) {
        for (float& v : values) {
            std::uint32_t u;
            std::memcpy(&u, &v, 4);
            u = byteswap32(u);
            std::memcpy(&v, &u, 4);
        }
    }
    return values;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

void write_png(const fs::path& path, const Image& img, float lo, float hi) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
    if (!fp) throw IoError("cannot open '" + path.string() + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng error while writing '" + path.string() + "'");
    }
    const int n = img.n();
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const float scale = hi > lo ? 255.0f / (hi - lo) : 0.0f;
    std::vector<png_byte> row(static_cast<std::size_t>(n));
    // Row 0 of the PNG is the top of the picture; put the largest x2 there.
    for (int x2 = n - 1; x2 >= 0; --x2) {
        for (int x1 = 0; x1 < n; ++x1) {
            const float v = std::clamp((img.at(x1, x2) - lo) * scale, 0.0f, 255.0f);
            row[static_cast<std::size_t>(x1)] = static_cast<png_byte>(v + 0.5f);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png(const fs::path& path, const Image& img) {
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    write_png(path, img, *lo, *hi);
}

std::string digest_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gtomo::io

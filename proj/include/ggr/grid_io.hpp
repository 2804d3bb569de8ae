#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "ggr/grid.hpp"

namespace ggr
{
    // GGR1 layout, little-endian, no padding:
    //   "GGR1" | u32 version (=1) | u8 rank | u8 dtype |
    //   rank x (u64 extent, f64 spacing, f64 origin) | f64 payload, row-major
    // Complex payloads interleave (re, im).

    enum class GridDtype : std::uint8_t
    {
        real64 = 0,
        complex128 = 1,
    };

    inline constexpr std::uint32_t grid_format_version = 1;

    using AnyGrid = std::variant<RealGrid, ComplexGrid>;

    std::string encode_grid(const RealGrid& grid);
    std::string encode_grid(const ComplexGrid& grid);
    AnyGrid decode_grid(std::string_view bytes);

    void write_grid(const std::filesystem::path& path, const RealGrid& grid);
    void write_grid(const std::filesystem::path& path, const ComplexGrid& grid);
    AnyGrid read_grid(const std::filesystem::path& path);
    RealGrid read_real_grid(const std::filesystem::path& path);
    ComplexGrid read_complex_grid(const std::filesystem::path& path);

    /// Writes to a sibling temp file and renames it over `path`.
    void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
    std::string read_file(const std::filesystem::path& path);
}  // namespace ggr

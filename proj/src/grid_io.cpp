#include "ggr/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ggr
{
    namespace
    {
        constexpr char magic[4] = {'G', 'G', 'R', '1'};

        void put_u64(std::string& out, std::uint64_t v, int bytes)
        {
            for (int b = 0; b < bytes; ++b)
                out.push_back(char((v >> (8 * b)) & 0xffu));
        }

        void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v), 8); }

        class Reader
        {
        public:
            explicit Reader(std::string_view bytes) : bytes_(bytes) {}

            std::uint64_t u(int width, const char* field)
            {
                if (pos_ + std::size_t(width) > bytes_.size())
                    fail(ErrorKind::io, std::string("grid file: truncated header at ") + field);
                std::uint64_t v = 0;
                for (int b = 0; b < width; ++b)
                    v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_ + std::size_t(b)])) << (8 * b);
                pos_ += std::size_t(width);
                return v;
            }

            double f64(const char* field) { return std::bit_cast<double>(u(8, field)); }

            std::size_t remaining() const { return bytes_.size() - pos_; }

        private:
            std::string_view bytes_;
            std::size_t pos_ = 0;
        };

        std::string header(const GridGeometry& g, GridDtype dtype)
        {
            std::string out(magic, 4);
            put_u64(out, grid_format_version, 4);
            put_u64(out, g.rank(), 1);
            put_u64(out, std::uint8_t(dtype), 1);
            for (std::size_t a = 0; a < g.rank(); ++a)
            {
                put_u64(out, g.extent(a), 8);
                put_f64(out, g.spacing()[a]);
                put_f64(out, g.origin()[a]);
            }
            return out;
        }
    }  // namespace

    std::string encode_grid(const RealGrid& grid)
    {
        require(grid.geometry().rank() <= 255, "grid file: rank does not fit in a byte");
        std::string out = header(grid.geometry(), GridDtype::real64);
        out.reserve(out.size() + 8 * grid.size());
        for (double v : grid.values())
        {
            require(std::isfinite(v), "grid file: values must be finite");
            put_f64(out, v);
        }
        return out;
    }

    std::string encode_grid(const ComplexGrid& grid)
    {
        require(grid.geometry().rank() <= 255, "grid file: rank does not fit in a byte");
        std::string out = header(grid.geometry(), GridDtype::complex128);
        out.reserve(out.size() + 16 * grid.size());
        for (const Complex& v : grid.values())
        {
            require(std::isfinite(v.real()) && std::isfinite(v.imag()), "grid file: values must be finite");
            put_f64(out, v.real());
            put_f64(out, v.imag());
        }
        return out;
    }

    AnyGrid decode_grid(std::string_view bytes)
    {
        if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0)
            fail(ErrorKind::io, "grid file: bad magic, expected GGR1");
        Reader in(bytes.substr(4));
        const auto version = in.u(4, "version");
        if (version != grid_format_version)
            fail(ErrorKind::io, "grid file: unsupported version " + std::to_string(version));
        const auto rank = std::size_t(in.u(1, "rank"));
        const auto dtype = in.u(1, "dtype");
        if (rank == 0)
            fail(ErrorKind::io, "grid file: rank must be positive");
        if (dtype > 1)
            fail(ErrorKind::io, "grid file: unknown dtype " + std::to_string(dtype));

        std::vector<std::size_t> extents(rank);
        std::vector<double> spacing(rank), origin(rank);
        std::size_t count = 1;
        for (std::size_t a = 0; a < rank; ++a)
        {
            const auto e = in.u(8, "extent");
            spacing[a] = in.f64("spacing");
            origin[a] = in.f64("origin");
            if (e < 2 || e > (std::uint64_t(1) << 40))
                fail(ErrorKind::io, "grid file: implausible extent " + std::to_string(e));
            extents[a] = std::size_t(e);
            count *= extents[a];
            if (count > (std::size_t(1) << 40))
                fail(ErrorKind::io, "grid file: implausible sample count");
        }
        GridGeometry geometry = [&] {
            try
            {
                return GridGeometry(extents, spacing, origin);
            }
            catch (const Error& e)
            {
                fail(ErrorKind::io, std::string("grid file: malformed header: ") + e.what());
            }
        }();

        const std::size_t per = dtype == 0 ? 1 : 2;
        if (in.remaining() != 8 * per * count)
            fail(ErrorKind::io, in.remaining() < 8 * per * count ? "grid file: truncated payload"
                                                                  : "grid file: trailing bytes after payload");
        if (dtype == 0)
        {
            std::vector<double> values(count);
            for (auto& v : values)
                v = in.f64("payload");
            return RealGrid(std::move(geometry), std::move(values));
        }
        std::vector<Complex> values(count);
        for (auto& v : values)
        {
            const double re = in.f64("payload");
            const double im = in.f64("payload");
            v = Complex(re, im);
        }
        return ComplexGrid(std::move(geometry), std::move(values));
    }

    void write_file_atomic(const std::filesystem::path& path, std::string_view bytes)
    {
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
            out.write(bytes.data(), std::streamsize(bytes.size()));
            out.flush();
            if (!out)
                fail(ErrorKind::io, "write failed for " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec)
        {
            std::filesystem::remove(tmp, ec);
            fail(ErrorKind::io, "cannot rename into " + path.string());
        }
    }

    std::string read_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(ErrorKind::io, "cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad())
            fail(ErrorKind::io, "read failed for " + path.string());
        return std::move(ss).str();
    }

    void write_grid(const std::filesystem::path& path, const RealGrid& grid) { write_file_atomic(path, encode_grid(grid)); }

    void write_grid(const std::filesystem::path& path, const ComplexGrid& grid)
    {
        write_file_atomic(path, encode_grid(grid));
    }

    AnyGrid read_grid(const std::filesystem::path& path) { return decode_grid(read_file(path)); }

    RealGrid read_real_grid(const std::filesystem::path& path)
    {
        auto g = read_grid(path);
        if (!std::holds_alternative<RealGrid>(g))
            fail(ErrorKind::io, path.string() + ": expected a real64 grid");
        return std::get<RealGrid>(std::move(g));
    }

    ComplexGrid read_complex_grid(const std::filesystem::path& path)
    {
        auto g = read_grid(path);
        if (!std::holds_alternative<ComplexGrid>(g))
            fail(ErrorKind::io, path.string() + ": expected a complex128 grid");
        return std::get<ComplexGrid>(std::move(g));
    }
}  // namespace ggr

#include "nsch/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <iterator>
#include <span>
#include <type_traits>
#include <sstream>
#include <vector>

#include "nsch/errors.hpp"

namespace nsch {

namespace {

constexpr char kMagic[8] = {'N', 'S', 'C', 'H', '0', '0', '0', '1'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8;

constexpr std::array<double DiagnosticsRecord::*, 15> kColumns = {
    &DiagnosticsRecord::t,          &DiagnosticsRecord::mass,       &DiagnosticsRecord::E_total,
    &DiagnosticsRecord::E_kin,      &DiagnosticsRecord::E_free,     &DiagnosticsRecord::D_visc,
    &DiagnosticsRecord::D_chem,     &DiagnosticsRecord::u_L2,       &DiagnosticsRecord::grad_mu_L2,
    &DiagnosticsRecord::grad_mu_H1, &DiagnosticsRecord::phi_min,    &DiagnosticsRecord::phi_max,
    &DiagnosticsRecord::sep_delta,  &DiagnosticsRecord::stat_mu_residual, &DiagnosticsRecord::energy_defect,
};

template <class T>
void put_le(std::vector<char>& buf, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    auto bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(U); ++b) {
        buf.push_back(static_cast<char>(bits & 0xffu));
        bits >>= 8;
    }
}

template <class T>
T get_le(const char* p) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = 0;
    for (std::size_t b = sizeof(U); b-- > 0;) {
        bits = (bits << 8) | static_cast<unsigned char>(p[b]);
    }
    return std::bit_cast<T>(bits);
}

void put_array(std::vector<char>& buf, std::span<const double> values) {
    for (double v : values) put_le(buf, v);
}

void get_array(const char*& p, std::span<double> values) {
    for (double& v : values) {
        v = get_le<double>(p);
        p += 8;
    }
}

std::vector<char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read error on " + path.string());
    return data;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_row(const DiagnosticsRecord& r) {
    std::string row;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (c) row += ',';
        row += format_double(r.*kColumns[c]);
    }
    return row;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << csv_header << '\n';
}

void CsvWriter::write(const DiagnosticsRecord& r) {
    out_ << csv_row(r) << '\n';
    if (!out_) throw IoError("write error on " + path_.string());
}

void CsvWriter::flush() {
    out_.flush();
    if (!out_) throw IoError("write error on " + path_.string());
}

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series) {
    CsvWriter w(path);
    for (const auto& r : series) w.write(r);
    w.flush();
}

DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path) {
    const auto data = read_all(path);
    std::string_view text(data.data(), data.size());
    DiagnosticsSeries out;
    bool header = true;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (header) {
            if (line != csv_header) throw IoError(path.string() + ": unexpected CSV header");
            header = false;
            continue;
        }
        DiagnosticsRecord r;
        std::size_t c = 0;
        while (true) {
            const auto comma = line.find(',');
            const std::string_view cell = line.substr(0, comma);
            if (c >= kColumns.size()) throw IoError(path.string() + ": too many columns on line " + std::to_string(line_no));
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), r.*kColumns[c]);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw IoError(path.string() + ": malformed value on line " + std::to_string(line_no));
            }
            ++c;
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (c != kColumns.size()) throw IoError(path.string() + ": too few columns on line " + std::to_string(line_no));
        out.push_back(r);
    }
    if (header) throw IoError(path.string() + ": empty CSV file");
    return out;
}

std::size_t snapshot_byte_size(int nx, int ny) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    return kHeaderBytes + 8 * (3 * n + static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(nx) * (ny + 1));
}

void write_snapshot(const std::filesystem::path& path, const State& state) {
    const Grid& g = state.grid();
    std::vector<char> buf;
    buf.reserve(snapshot_byte_size(g.nx(), g.ny()));
    buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
    put_le(buf, static_cast<std::uint32_t>(g.nx()));
    put_le(buf, static_cast<std::uint32_t>(g.ny()));
    put_le(buf, state.t);
    put_array(buf, state.phi.values());
    put_array(buf, state.mu.values());
    put_array(buf, state.p.values());
    put_array(buf, state.u.ux());
    put_array(buf, state.u.uy());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write error on " + path.string());
}

State read_snapshot(const std::filesystem::path& path, double lx, double ly) {
    const auto data = read_all(path);
    if (data.size() < kHeaderBytes || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
        throw IoError(path.string() + ": not a snapshot file (bad magic)");
    }
    const auto nx = get_le<std::uint32_t>(data.data() + 8);
    const auto ny = get_le<std::uint32_t>(data.data() + 12);
    if (nx == 0 || ny == 0 || nx > (1u << 20) || ny > (1u << 20)) {
        throw IoError(path.string() + ": invalid resolution in header");
    }
    if (data.size() != snapshot_byte_size(static_cast<int>(nx), static_cast<int>(ny))) {
        throw IoError(path.string() + ": size does not match header");
    }
    State s(Grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly));
    s.t = get_le<double>(data.data() + 16);
    const char* p = data.data() + kHeaderBytes;
    get_array(p, s.phi.values());
    get_array(p, s.mu.values());
    get_array(p, s.p.values());
    get_array(p, s.u.ux());
    get_array(p, s.u.uy());
    return s;
}

State read_snapshot(const std::filesystem::path& path, const Grid& grid) {
    State s = read_snapshot(path, grid.lx(), grid.ly());
    if (s.grid().nx() != grid.nx() || s.grid().ny() != grid.ny()) {
        throw GridMismatch(path.string() + ": snapshot resolution differs from the configured grid");
    }
    return s;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

}  // namespace nsch

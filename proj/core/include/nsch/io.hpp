#pragma once

// Diagnostics CSV and binary snapshot files.
//
// Snapshot layout: the 8 bytes "NSCH0001", then little-endian u32 nx, u32 ny,
// f64 t, followed by f64 arrays phi, mu, p (nx*ny each), ux ((nx+1)*ny) and
// uy (nx*(ny+1)) in grid index order.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "nsch/diagnostics.hpp"
#include "nsch/state.hpp"

namespace nsch {

inline constexpr std::string_view csv_header =
    "t,mass,E_total,E_kin,E_free,D_visc,D_chem,u_L2,grad_mu_L2,grad_mu_H1,phi_min,phi_max,sep_delta,"
    "stat_mu_residual,energy_defect";

/// Shortest round-trip formatting with at most 17 significant digits.
std::string format_double(double v);
std::string csv_row(const DiagnosticsRecord& r);

/// Streams rows to a file; the header is written on construction.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void write(const DiagnosticsRecord& r);
    void flush();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series);
/// Throws IoError on a missing file, a wrong header or a malformed row.
DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path);

std::size_t snapshot_byte_size(int nx, int ny);
void write_snapshot(const std::filesystem::path& path, const State& state);
/// Rebuilds the state on a grid with the stored resolution and the given side
/// lengths. Throws IoError for a bad magic or a size mismatch.
State read_snapshot(const std::filesystem::path& path, double lx, double ly);
/// Same, requiring the stored resolution to match `grid` (GridMismatch otherwise).
State read_snapshot(const std::filesystem::path& path, const Grid& grid);

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace nsch

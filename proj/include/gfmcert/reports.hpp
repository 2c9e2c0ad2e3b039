#pragma once

/**
 * Deterministic report rendering: JSON and CSV serializations of certificate
 * reports, proof traces, stability verdicts and simulation results, a
 * human-readable certificate table, and an SVG heatmap of feasibility
 * regions.  All floating-point values are fixed at 12 significant digits so
 * identical inputs produce byte-identical artifacts.
 */

#include <string>

#include "gfmcert/certificates.hpp"
#include "gfmcert/closedloop.hpp"
#include "gfmcert/passivity.hpp"
#include "gfmcert/state_space.hpp"

namespace gfmcert {

/// Fixed 12-significant-digit decimal rendering (locale independent).
std::string format_sig(double v);

std::string certificate_report_json(const CertificateReport& rep);
/// Aligned human-readable summary table of the same report.
std::string certificate_report_table(const CertificateReport& rep);

std::string trace_json(const CertificateTrace& trace);

std::string verdict_json(const StabilityVerdict& v);
/// One row per eigenvalue: re, im, controllable, observable, structural.
std::string poles_csv(const StabilityVerdict& v);

/// time column plus one column per output signal.
std::string sim_csv(const SimResult& r);
std::string sim_metadata_json(const SimResult& r);

std::string fvt_json(const FvtReport& rep);

/// Rows are τ̃ values, columns α values; cells are 0/1 feasibility.
std::string region_csv(const RegionGrid& grid);
/// Static heatmap with axis annotations.
std::string region_svg(const RegionGrid& grid, const std::string& title);

/// Write content to path, creating parent directories as needed.
void write_file(const std::string& path, const std::string& content);

}  // namespace gfmcert

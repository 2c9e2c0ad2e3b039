#include "gfmcert/reports.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gfmcert {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Round to 12 significant digits before storing, so the JSON writer emits a
/// stable decimal form for any input.
double sig12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

ordered_json condition_json(const ConditionResult& r) {
    return ordered_json{{"pass", r.pass},
                        {"margin", sig12(r.margin)},
                        {"near_boundary", r.near_boundary}};
}

ordered_json converter_json(const ConverterCertificate& c) {
    ordered_json j;
    j["coupling"] = ordered_json{{"alpha_p", sig12(c.coupling.alpha_p)},
                                 {"alpha_q", sig12(c.coupling.alpha_q)},
                                 {"tau_p_tilde", sig12(c.coupling.tau_p_tilde)},
                                 {"tau_q_tilde", sig12(c.coupling.tau_q_tilde)}};
    const char* names[4] = {"a", "b", "c", "d"};
    for (int k = 0; k < 4; ++k) {
        j["active"][names[k]] = condition_json(c.active[static_cast<size_t>(k)]);
        j["reactive"][names[k]] = condition_json(c.reactive[static_cast<size_t>(k)]);
    }
    j["corollary"] = ordered_json{{"alpha_q_bound", c.corollary_alpha_q},
                                  {"tau_p_positive", c.corollary_tau_p}};
    j["dynamic_pass"] = c.dynamic_pass;
    j["level1_pass"] = c.level1_pass;
    j["level2_pass"] = c.level2_pass;
    return j;
}

}  // namespace

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string certificate_report_json(const CertificateReport& rep) {
    ordered_json j;
    j["coefficients"] =
        ordered_json{{"rho", sig12(rep.coeffs.rho)},    {"vmax", sig12(rep.coeffs.vmax)},
                     {"c1", sig12(rep.coeffs.c1)},      {"c2", sig12(rep.coeffs.c2)},
                     {"c3", sig12(rep.coeffs.c3)},      {"c4", sig12(rep.coeffs.c4)},
                     {"c5", sig12(rep.coeffs.c5)},      {"c6", sig12(rep.coeffs.c6)},
                     {"c7", sig12(rep.coeffs.c7)},      {"c8", sig12(rep.coeffs.c8)},
                     {"c9", sig12(rep.coeffs.c9)},      {"degenerate", rep.coeffs.degenerate}};
    j["converters"] = ordered_json::array();
    for (const auto& c : rep.converters) j["converters"].push_back(converter_json(c));
    j["dynamic_pass"] = rep.dynamic_pass;
    j["level1_pass"] = rep.level1_pass;
    j["level2_pass"] = rep.level2_pass;
    return j.dump(2) + "\n";
}

std::string certificate_report_table(const CertificateReport& rep) {
    std::ostringstream os;
    os << "certificate evaluation (rho = " << format_sig(rep.coeffs.rho)
       << ", vmax = " << format_sig(rep.coeffs.vmax) << ")\n";
    os << "node  alpha_p      alpha_q      p:a b c d  q:a b c d  dyn  lvl1 lvl2\n";
    for (size_t i = 0; i < rep.converters.size(); ++i) {
        const auto& c = rep.converters[i];
        char line[160];
        std::snprintf(line, sizeof(line),
                      "%-5zu %-12.6g %-12.6g %c %c %c %c    %c %c %c %c    %-4s %-4s %-4s\n",
                      i + 1, c.coupling.alpha_p, c.coupling.alpha_q,
                      c.active[0].pass ? 'P' : 'F', c.active[1].pass ? 'P' : 'F',
                      c.active[2].pass ? 'P' : 'F', c.active[3].pass ? 'P' : 'F',
                      c.reactive[0].pass ? 'P' : 'F', c.reactive[1].pass ? 'P' : 'F',
                      c.reactive[2].pass ? 'P' : 'F', c.reactive[3].pass ? 'P' : 'F',
                      c.dynamic_pass ? "pass" : "FAIL", c.level1_pass ? "pass" : "FAIL",
                      c.level2_pass ? "pass" : "FAIL");
        os << line;
    }
    os << "overall: dynamic " << (rep.dynamic_pass ? "pass" : "FAIL") << ", level1 "
       << (rep.level1_pass ? "pass" : "FAIL") << ", level2 "
       << (rep.level2_pass ? "pass" : "FAIL") << "\n";
    return os.str();
}

std::string trace_json(const CertificateTrace& trace) {
    ordered_json j;
    j["steps"] = ordered_json::array();
    for (const auto& s : trace.steps) {
        j["steps"].push_back(ordered_json{{"name", s.name},
                                          {"pass", s.pass},
                                          {"deferred", s.deferred},
                                          {"detail", s.detail},
                                          {"worst_omega", sig12(s.worst_omega)},
                                          {"margin", sig12(s.margin)}});
    }
    ordered_json tilde = ordered_json::array();
    ordered_json clamped = ordered_json::array();
    for (Eigen::Index i = 0; i < trace.gamma.gamma3_q_tilde.size(); ++i) {
        tilde.push_back(sig12(trace.gamma.gamma3_q_tilde(i)));
        clamped.push_back(static_cast<bool>(trace.gamma.tilde_clamped[static_cast<size_t>(i)]));
    }
    j["gamma"] = ordered_json{{"gamma3_q_tilde", tilde}, {"tilde_clamped", clamped}};
    j["overall"] = trace.overall;
    return j.dump(2) + "\n";
}

std::string verdict_json(const StabilityVerdict& v) {
    ordered_json j;
    j["stable"] = v.stable;
    j["inconclusive"] = v.inconclusive;
    j["margin"] = sig12(v.margin);
    j["n_structural"] = v.n_structural;
    j["modes"] = ordered_json::array();
    for (const auto& m : v.modes) {
        j["modes"].push_back(ordered_json{{"re", sig12(m.eigenvalue.real())},
                                          {"im", sig12(m.eigenvalue.imag())},
                                          {"controllable", m.controllable},
                                          {"observable", m.observable},
                                          {"structural", m.structural}});
    }
    return j.dump(2) + "\n";
}

std::string poles_csv(const StabilityVerdict& v) {
    std::ostringstream os;
    os << "re,im,controllable,observable,structural\n";
    for (const auto& m : v.modes)
        os << format_sig(m.eigenvalue.real()) << "," << format_sig(m.eigenvalue.imag()) << ","
           << (m.controllable ? 1 : 0) << "," << (m.observable ? 1 : 0) << ","
           << (m.structural ? 1 : 0) << "\n";
    return os.str();
}

std::string sim_csv(const SimResult& r) {
    std::ostringstream os;
    os << "time";
    for (const auto& n : r.names) os << "," << n;
    os << "\n";
    for (size_t k = 0; k < r.time.size(); ++k) {
        os << format_sig(r.time[k]);
        for (const auto& sig : r.signals) os << "," << format_sig(sig[k]);
        os << "\n";
    }
    return os.str();
}

std::string sim_metadata_json(const SimResult& r) {
    ordered_json j;
    j["metadata"] = r.metadata;
    j["samples"] = r.time.size();
    j["signals"] = r.names;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string fvt_json(const FvtReport& rep) {
    ordered_json j;
    j["applicable"] = rep.applicable;
    j["n2_dc_zero"] = rep.n2_dc_zero;
    j["n1_row_sum"] = sig12(rep.n1_row_sum);
    j["n3_min_sv"] = sig12(rep.n3_min_sv);
    j["dc_voltage_norm"] = sig12(rep.dc_voltage_norm);
    ordered_json block = ordered_json::array();
    for (Eigen::Index i = 0; i < rep.dc_frequency_block.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index k = 0; k < rep.dc_frequency_block.cols(); ++k)
            row.push_back(sig12(rep.dc_frequency_block(i, k)));
        block.push_back(row);
    }
    j["dc_frequency_block"] = block;
    j["pass"] = rep.pass;
    j["detail"] = rep.detail;
    return j.dump(2) + "\n";
}

std::string region_csv(const RegionGrid& grid) {
    std::ostringstream os;
    os << "tau_tilde\\alpha";
    for (double a : grid.alphas) os << "," << format_sig(a);
    os << "\n";
    for (size_t t = 0; t < grid.taus.size(); ++t) {
        os << format_sig(grid.taus[t]);
        for (size_t a = 0; a < grid.alphas.size(); ++a)
            os << "," << (grid.feasible[t][a] ? 1 : 0);
        os << "\n";
    }
    return os.str();
}

std::string region_svg(const RegionGrid& grid, const std::string& title) {
    const int cell = 6;
    const int margin_left = 60, margin_bottom = 40, margin_top = 30, margin_right = 10;
    const int na = static_cast<int>(grid.alphas.size());
    const int nt = static_cast<int>(grid.taus.size());
    const int w = margin_left + na * cell + margin_right;
    const int h = margin_top + nt * cell + margin_bottom;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<text x=\"" << margin_left << "\" y=\"18\" font-size=\"13\">" << title
       << "</text>\n";
    for (int t = 0; t < nt; ++t) {
        for (int a = 0; a < na; ++a) {
            // τ̃ increases upward.
            const int x = margin_left + a * cell;
            const int y = margin_top + (nt - 1 - t) * cell;
            const char* color =
                grid.feasible[static_cast<size_t>(t)][static_cast<size_t>(a)] ? "#2e8b57"
                                                                              : "#d3d3d3";
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << color << "\"/>\n";
        }
    }
    os << "<text x=\"" << margin_left + na * cell / 2 << "\" y=\"" << h - 12
       << "\" font-size=\"11\" text-anchor=\"middle\">alpha: " << format_sig(grid.alphas.front())
       << " to " << format_sig(grid.alphas.back()) << "</text>\n";
    os << "<text x=\"14\" y=\"" << margin_top + nt * cell / 2
       << "\" font-size=\"11\" transform=\"rotate(-90 14 " << margin_top + nt * cell / 2
       << ")\" text-anchor=\"middle\">tau_tilde: " << format_sig(grid.taus.front()) << " to "
       << format_sig(grid.taus.back()) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IllPosed("cannot write output file: " + path);
    out << content;
}

}  // namespace gfmcert

#include "gfmcert/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gfmcert {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

/// Number with optional unit suffix.  Hz converts to rad/s; pu, s and MVA
/// are labels only (values are stored in those units directly).
double parse_number(const std::string& raw, int line) {
    const std::string v = trim(raw);
    if (v.empty()) fail(line, "empty numeric value");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str()) fail(line, "not a number: '" + v + "'");
    const std::string suffix = trim(std::string(end));
    if (suffix.empty() || suffix == "pu" || suffix == "s" || suffix == "MVA") return x;
    if (suffix == "Hz") return 2.0 * M_PI * x;
    fail(line, "unknown unit suffix '" + suffix + "' (expected pu, s, Hz or MVA)");
}

std::vector<double> parse_list(const std::string& raw, int line) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
    if (out.empty()) fail(line, "empty list value");
    return out;
}

int parse_int(const std::string& raw, int line) {
    const double x = parse_number(raw, line);
    const int k = static_cast<int>(std::llround(x));
    if (x != static_cast<double>(k)) fail(line, "expected an integer: '" + trim(raw) + "'");
    return k;
}

/// Shortest representation that re-parses to the identical double.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_list(const Vec& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt(v(i));
    }
    return out;
}

bool valid_channel_label(const std::string& label, int n) {
    for (const std::string& stem : {"dp_d_", "dq_d_", "domega_d_", "dv_d_"}) {
        if (label.rfind(stem, 0) != 0) continue;
        const std::string idx = label.substr(stem.size());
        if (idx.empty() || !std::all_of(idx.begin(), idx.end(),
                                        [](unsigned char c) { return std::isdigit(c); }))
            return false;
        const int k = std::atoi(idx.c_str());
        return k >= 1 && k <= n;
    }
    return false;
}

}  // namespace

NetworkLevel level_from_string(const std::string& s) {
    if (s == "full") return NetworkLevel::Full;
    if (s == "dynamic") return NetworkLevel::Dynamic;
    if (s == "level1") return NetworkLevel::Level1;
    if (s == "level2") return NetworkLevel::Level2;
    throw ParseError("unknown network level '" + s + "' (expected full, dynamic, level1 or level2)");
}

std::string level_to_string(NetworkLevel level) {
    switch (level) {
        case NetworkLevel::Full: return "full";
        case NetworkLevel::Dynamic: return "dynamic";
        case NetworkLevel::Level1: return "level1";
        case NetworkLevel::Level2: return "level2";
    }
    return "dynamic";
}

bool scenario_equal(const Scenario& a, const Scenario& b) {
    const auto& x = a.network;
    const auto& y = b.network;
    if (x.n != y.n || x.rho != y.rho || x.omega0 != y.omega0 || x.vmax != y.vmax ||
        x.vmin != y.vmin)
        return false;
    if (x.b != y.b || x.v0 != y.v0 || x.delta0 != y.delta0) return false;
    if (a.converters.size() != b.converters.size()) return false;
    for (size_t i = 0; i < a.converters.size(); ++i) {
        const auto& p = a.converters[i];
        const auto& q = b.converters[i];
        if (p.d_p != q.d_p || p.d_q != q.d_q || p.tau_p != q.tau_p || p.tau_q != q.tau_q ||
            p.s_local != q.s_local || p.s_global != q.s_global)
            return false;
    }
    return a.level == b.level && a.grid == b.grid && a.simulation == b.simulation &&
           a.output == b.output;
}

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.network.n = 0;

    enum class Section { None, Network, Converter, Analysis, Simulation, Output };
    Section section = Section::None;
    int conv_index = 0;  // 1-based index of the open converter section
    std::map<int, ConverterSpec> convs;
    bool v0_seen = false;

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (const size_t h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            const std::string head = trim(s.substr(1, s.size() - 2));
            if (head == "network") {
                section = Section::Network;
            } else if (head.rfind("converter", 0) == 0) {
                section = Section::Converter;
                conv_index = parse_int(head.substr(9), line);
                if (conv_index < 1) fail(line, "converter index must be >= 1");
                if (convs.count(conv_index))
                    fail(line, "duplicate section [converter " + std::to_string(conv_index) + "]");
                convs[conv_index] = ConverterSpec{};
            } else if (head == "analysis") {
                section = Section::Analysis;
            } else if (head == "simulation") {
                section = Section::Simulation;
            } else if (head == "output") {
                section = Section::Output;
            } else {
                fail(line, "unknown section [" + head + "]");
            }
            continue;
        }

        const size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "missing key before '='");
        if (val.empty()) fail(line, "missing value for key '" + key + "'");

        switch (section) {
            case Section::None:
                fail(line, "key '" + key + "' outside any section");
            case Section::Network: {
                auto& net = sc.network;
                if (key == "nodes") {
                    net.n = parse_int(val, line);
                    if (net.n < 1) fail(line, "nodes must be >= 1");
                    net.b = Mat::Zero(net.n, net.n);
                    net.v0 = Vec::Ones(net.n);
                    net.delta0 = Vec::Zero(net.n);
                } else if (key == "omega0") {
                    net.omega0 = parse_number(val, line);
                } else if (key == "rho") {
                    net.rho = parse_number(val, line);
                } else if (key == "vmax") {
                    net.vmax = parse_number(val, line);
                } else if (key == "vmin") {
                    net.vmin = parse_number(val, line);
                } else if (key == "v0" || key == "delta0") {
                    if (net.n == 0) fail(line, "declare 'nodes' before '" + key + "'");
                    const auto xs = parse_list(val, line);
                    if (static_cast<int>(xs.size()) != net.n)
                        fail(line, "'" + key + "' needs " + std::to_string(net.n) + " entries");
                    Vec& dst = key == "v0" ? net.v0 : net.delta0;
                    for (int i = 0; i < net.n; ++i) dst(i) = xs[static_cast<size_t>(i)];
                    if (key == "v0") v0_seen = true;
                } else if (key.rfind("b_", 0) == 0) {
                    if (net.n == 0) fail(line, "declare 'nodes' before line susceptances");
                    int i = 0, j = 0;
                    if (std::sscanf(key.c_str(), "b_%d_%d", &i, &j) != 2 || i < 1 || j < 1 ||
                        i > net.n || j > net.n || i == j)
                        fail(line, "bad susceptance key '" + key + "' (expected b_i_j)");
                    net.b(i - 1, j - 1) = net.b(j - 1, i - 1) = parse_number(val, line);
                } else {
                    fail(line, "unknown network key '" + key + "'");
                }
                break;
            }
            case Section::Converter: {
                auto& c = convs[conv_index];
                if (key == "d_p") c.d_p = parse_number(val, line);
                else if (key == "d_q") c.d_q = parse_number(val, line);
                else if (key == "tau_p") c.tau_p = parse_number(val, line);
                else if (key == "tau_q") c.tau_q = parse_number(val, line);
                else if (key == "s_local") c.s_local = parse_number(val, line);
                else if (key == "s_global") c.s_global = parse_number(val, line);
                else fail(line, "unknown converter key '" + key + "'");
                break;
            }
            case Section::Analysis: {
                if (key == "level") {
                    try {
                        sc.level = level_from_string(val);
                    } catch (const ParseError& e) {
                        fail(line, e.what());
                    }
                } else if (key == "grid_points") {
                    sc.grid.points = parse_int(val, line);
                } else if (key == "omega_min") {
                    sc.grid.omega_min = parse_number(val, line);
                } else if (key == "omega_max") {
                    sc.grid.omega_max = parse_number(val, line);
                } else {
                    fail(line, "unknown analysis key '" + key + "'");
                }
                break;
            }
            case Section::Simulation: {
                if (key == "channel") sc.simulation.channel = val;
                else if (key == "magnitude") sc.simulation.magnitude = parse_number(val, line);
                else if (key == "t_start") sc.simulation.t_start = parse_number(val, line);
                else if (key == "horizon") sc.simulation.horizon = parse_number(val, line);
                else if (key == "dt") sc.simulation.dt = parse_number(val, line);
                else fail(line, "unknown simulation key '" + key + "'");
                break;
            }
            case Section::Output: {
                if (key == "directory") {
                    sc.output.directory = val;
                } else if (key == "format") {
                    if (val != "csv" && val != "json" && val != "svg")
                        fail(line, "unknown format '" + val + "' (expected csv, json or svg)");
                    sc.output.format = val;
                } else {
                    fail(line, "unknown output key '" + key + "'");
                }
                break;
            }
        }
    }

    if (sc.network.n == 0) throw ParseError("scenario has no [network] section with 'nodes'");
    if (!v0_seen && sc.network.n > 0) sc.network.v0 = Vec::Ones(sc.network.n);

    // Droop gains are given in the converter's local per-unit system; the
    // models work on the global base throughout.
    std::vector<std::string> violations;
    sc.converters.clear();
    for (int i = 1; i <= sc.network.n; ++i) {
        auto it = convs.find(i);
        if (it == convs.end()) {
            violations.push_back("missing section [converter " + std::to_string(i) + "]");
            sc.converters.push_back(ConverterSpec{});
            continue;
        }
        const auto conv_violations = it->second.validate();
        for (const auto& v : conv_violations)
            violations.push_back("converter " + std::to_string(i) + ": " + v);
        sc.converters.push_back(conv_violations.empty() ? rebase_gains(it->second) : it->second);
    }
    for (const auto& [idx, c] : convs) {
        (void)c;
        if (idx > sc.network.n)
            violations.push_back("converter " + std::to_string(idx) +
                                 " exceeds the node count " + std::to_string(sc.network.n));
    }

    for (const auto& v : sc.network.validate()) violations.push_back("network: " + v);
    if (!valid_channel_label(sc.simulation.channel, sc.network.n))
        violations.push_back("simulation: unknown disturbance channel '" +
                             sc.simulation.channel + "'");
    if (!(sc.simulation.horizon > 0.0)) violations.push_back("simulation: horizon must be > 0");
    if (sc.simulation.t_start < 0.0) violations.push_back("simulation: t_start must be >= 0");
    if (sc.simulation.dt < 0.0) violations.push_back("simulation: dt must be >= 0");
    if (sc.grid.points < 0) violations.push_back("analysis: grid_points must be >= 0");
    if (sc.grid.omega_min < 0.0 || sc.grid.omega_max < 0.0)
        violations.push_back("analysis: frequency bounds must be >= 0");
    if (sc.grid.omega_min > 0.0 && sc.grid.omega_max > 0.0 &&
        sc.grid.omega_min >= sc.grid.omega_max)
        violations.push_back("analysis: omega_min must be below omega_max");
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return sc;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), std::filesystem::path(path).stem().string());
}

std::string serialize(const Scenario& sc) {
    std::ostringstream os;
    const auto& net = sc.network;
    os << "[network]\n";
    os << "nodes = " << net.n << "\n";
    os << "omega0 = " << fmt(net.omega0) << "\n";
    os << "rho = " << fmt(net.rho) << "\n";
    os << "vmax = " << fmt(net.vmax) << "\n";
    os << "vmin = " << fmt(net.vmin) << "\n";
    os << "v0 = " << fmt_list(net.v0) << "\n";
    os << "delta0 = " << fmt_list(net.delta0) << "\n";
    for (int i = 0; i < net.n; ++i)
        for (int j = i + 1; j < net.n; ++j)
            if (net.b(i, j) != 0.0)
                os << "b_" << i + 1 << "_" << j + 1 << " = " << fmt(net.b(i, j)) << "\n";
    for (size_t k = 0; k < sc.converters.size(); ++k) {
        const auto& c = sc.converters[k];
        os << "\n[converter " << k + 1 << "]\n";
        os << "d_p = " << fmt(c.d_p) << "\n";
        os << "d_q = " << fmt(c.d_q) << "\n";
        os << "tau_p = " << fmt(c.tau_p) << "\n";
        os << "tau_q = " << fmt(c.tau_q) << "\n";
        os << "s_local = " << fmt(c.s_local) << "\n";
        os << "s_global = " << fmt(c.s_global) << "\n";
    }
    os << "\n[analysis]\n";
    os << "level = " << level_to_string(sc.level) << "\n";
    if (sc.grid.points > 0) os << "grid_points = " << sc.grid.points << "\n";
    if (sc.grid.omega_min > 0.0) os << "omega_min = " << fmt(sc.grid.omega_min) << "\n";
    if (sc.grid.omega_max > 0.0) os << "omega_max = " << fmt(sc.grid.omega_max) << "\n";
    os << "\n[simulation]\n";
    os << "channel = " << sc.simulation.channel << "\n";
    os << "magnitude = " << fmt(sc.simulation.magnitude) << "\n";
    os << "t_start = " << fmt(sc.simulation.t_start) << "\n";
    os << "horizon = " << fmt(sc.simulation.horizon) << "\n";
    if (sc.simulation.dt > 0.0) os << "dt = " << fmt(sc.simulation.dt) << "\n";
    os << "\n[output]\n";
    os << "directory = " << sc.output.directory << "\n";
    os << "format = " << sc.output.format << "\n";
    return os.str();
}

std::string scenario_dir() {
    if (const char* env = std::getenv("GFMCERT_SCENARIO_DIR")) return env;
#ifdef GFMCERT_SCENARIO_DIR_DEFAULT
    return GFMCERT_SCENARIO_DIR_DEFAULT;
#else
    return "scenarios";
#endif
}

Scenario load_bundled(const std::string& name) {
    return parse_scenario(scenario_dir() + "/" + name + ".scn");
}

}  // namespace gfmcert

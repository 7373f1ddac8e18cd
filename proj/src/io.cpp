#include "lambdasurf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lambdasurf {

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

// One standard normal at a time from a seeded engine; Box-Muller keeps the
// stream identical across standard library implementations.
struct GaussianSource {
    std::mt19937_64 rng;
    bool have_spare = false;
    double spare = 0;

    explicit GaussianSource(std::uint64_t seed) : rng(seed) {}

    double uniform_open() {
        // In (0, 1]: the log below must not see zero.
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    }

    double next() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform_open();
        const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare = mag * std::sin(2.0 * kPi * u2);
        have_spare = true;
        return mag * std::cos(2.0 * kPi * u2);
    }
};

void append_sphere_point(GaussianSource& g, int dim, double radius, std::vector<double>& out) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm = 0;
    do {
        norm = 0;
        for (auto& c : v) {
            c = g.next();
            norm += c * c;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-8);
    for (const double c : v) out.push_back(c * radius / norm);
}

}  // namespace

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string samples_csv(const std::vector<TrajectorySample>& samples) {
    std::string out = "t,x,y,theta,r,s,phi,theta_dot\n";
    for (const auto& s : samples) {
        const DiagonalState d = to_diagonal(s.state);
        out += fmt17(s.t);
        out += ',';
        out += fmt17(s.state.x);
        out += ',';
        out += fmt17(s.state.y);
        out += ',';
        out += fmt17(s.state.theta);
        out += ',';
        out += fmt17(d.r);
        out += ',';
        out += fmt17(d.s);
        out += ',';
        out += fmt17(d.phi);
        out += ',';
        out += fmt17(s.theta_dot);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "R,outcome,phi_end,s_max,T\n";
    for (const auto& row : rows) {
        out += fmt17(row.R);
        out += ',';
        if (!row.error.empty()) {
            out += "Error,nan,nan,nan\n";
            continue;
        }
        out += to_string(row.outcome);
        out += ',';
        out += fmt17(row.phi_end);
        out += ',';
        out += row.s_max ? fmt17(*row.s_max) : "nan";
        out += ',';
        out += fmt17(row.T);
        out += '\n';
    }
    return out;
}

std::string curve_json_text(const ClosedCurve& curve, const Params& p) {
    nlohmann::json j;
    j["params"] = {{"m", p.m}, {"n", p.n}, {"lambda", p.lambda}};
    j["r_star"] = curve.r_star;
    j["bracket"] = {curve.bracket[0], curve.bracket[1]};
    j["iterations"] = curve.iterations;
    j["closure_gap"] = curve.closure_gap;
    j["perp_residual"] = curve.perp_residual;
    j["max_eq_residual"] = curve.max_eq_residual;
    j["n_samples"] = curve.points.size();
    return j.dump(2) + "\n";
}

std::string report_json_text(const std::vector<LemmaReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rep : reports) {
        nlohmann::json violations = nlohmann::json::array();
        for (const auto& v : rep.violations) {
            violations.push_back({{"input", v.input}, {"measured", v.measured},
                                  {"threshold", v.threshold}});
        }
        arr.push_back({{"id", to_string(rep.id)},
                       {"cases", rep.cases},
                       {"passed", rep.passed},
                       {"skipped", rep.skipped},
                       {"note", rep.note},
                       {"violations", violations}});
    }
    return arr.dump(2) + "\n";
}

std::string report_csv(const std::vector<LemmaReport>& reports) {
    std::string out = "id,cases,passed,skipped,violations,note\n";
    for (const auto& rep : reports) {
        out += to_string(rep.id);
        out += ',';
        out += std::to_string(rep.cases);
        out += ',';
        out += rep.passed ? "true" : "false";
        out += ',';
        out += rep.skipped ? "true" : "false";
        out += ',';
        out += std::to_string(rep.violations.size());
        out += ',';
        out += csv_quote(rep.note);
        out += '\n';
    }
    return out;
}

std::string report_table(const std::vector<LemmaReport>& reports) {
    std::string out;
    for (const auto& rep : reports) {
        const char* status = rep.skipped ? "SKIP" : (rep.passed ? "PASS" : "FAIL");
        char line[160];
        std::snprintf(line, sizeof(line), "%-4s  %-20s  cases=%-5d violations=%zu", status,
                      to_string(rep.id), rep.cases, rep.violations.size());
        out += line;
        if (!rep.note.empty()) {
            out += "  (";
            out += rep.note;
            out += ')';
        }
        out += '\n';
        for (const auto& v : rep.violations) {
            out += "        ";
            out += v.input;
            out += '\n';
        }
    }
    return out;
}

std::vector<ProfileState> read_curve_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty curve file: " + path);
    const auto header = split_csv_line(line);
    int ix = -1, iy = -1, itheta = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") ix = static_cast<int>(i);
        if (header[i] == "y") iy = static_cast<int>(i);
        if (header[i] == "theta") itheta = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0) {
        throw std::runtime_error("curve file needs x and y columns: " + path);
    }

    std::vector<ProfileState> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= static_cast<std::size_t>(std::max(ix, iy))) {
            throw std::runtime_error("short row in curve file: " + path);
        }
        ProfileState st;
        st.x = std::strtod(fields[static_cast<std::size_t>(ix)].c_str(), nullptr);
        st.y = std::strtod(fields[static_cast<std::size_t>(iy)].c_str(), nullptr);
        if (itheta >= 0 && static_cast<std::size_t>(itheta) < fields.size()) {
            st.theta = std::strtod(fields[static_cast<std::size_t>(itheta)].c_str(), nullptr);
        }
        pts.push_back(st);
    }
    return pts;
}

std::string plot_csv(const std::vector<ProfileState>& pts) {
    std::string out = "x,y\n";
    for (const auto& p : pts) {
        out += fmt17(p.x);
        out += ',';
        out += fmt17(p.y);
        out += '\n';
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        out += fmt17(it->y);
        out += ',';
        out += fmt17(it->x);
        out += '\n';
    }
    return out;
}

std::string ambient_csv(const std::vector<ProfileState>& pts, const Params& p,
                        int samples_per_point, std::uint64_t seed) {
    validate(p);
    if (samples_per_point < 1) throw std::invalid_argument("samples must be >= 1");

    std::string out;
    for (int i = 1; i <= p.m; ++i) {
        out += "u" + std::to_string(i) + ",";
    }
    for (int i = 1; i <= p.n; ++i) {
        out += "v" + std::to_string(i);
        out += i < p.n ? "," : "";
    }
    out += '\n';

    GaussianSource g(seed);
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(p.m + p.n));
    for (const auto& pt : pts) {
        for (int k = 0; k < samples_per_point; ++k) {
            row.clear();
            append_sphere_point(g, p.m, pt.x, row);
            append_sphere_point(g, p.n, pt.y, row);
            for (std::size_t c = 0; c < row.size(); ++c) {
                out += fmt17(row[c]);
                out += c + 1 < row.size() ? "," : "";
            }
            out += '\n';
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lambdasurf

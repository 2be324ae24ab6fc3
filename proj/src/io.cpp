#include "stfilm/io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "stfilm/errors.hpp"

namespace stfilm {

namespace {

constexpr const char* kTrajHeader =
    "t,mass,energy_J,entropy,min_u,max_u,sup_dev,cum_dissipation,cum_d2";

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<double> split_doubles(const std::string& line, const std::string& path) {
    std::vector<double> vals;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        const std::string tok =
            line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw IoError("bad numeric field '" + tok + "' in " + path);
        }
        if (used != tok.size()) throw IoError("bad numeric field '" + tok + "' in " + path);
        vals.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return vals;
}

} // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << kTrajHeader << '\n';
    for (const auto& r : records) {
        out << format_full(r.t) << ',' << format_full(r.mass) << ',' << format_full(r.energy_J)
            << ',' << format_full(r.entropy) << ',' << format_full(r.min_u) << ','
            << format_full(r.max_u) << ',' << format_full(r.sup_dev) << ','
            << format_full(r.cum_dissipation) << ',' << format_full(r.cum_d2) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trajectory file: " + path);
    strip_cr(line);
    if (line != kTrajHeader)
        throw IoError("unexpected trajectory header in " + path + ": '" + line + "'");
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        const std::vector<double> v = split_doubles(line, path);
        if (v.size() != 9)
            throw IoError("expected 9 columns, got " + std::to_string(v.size()) + " in " + path);
        DiagnosticsRecord r;
        r.t = v[0];
        r.mass = v[1];
        r.energy_J = v[2];
        r.entropy = v[3];
        r.min_u = v[4];
        r.max_u = v[5];
        r.sup_dev = v[6];
        r.cum_dissipation = v[7];
        r.cum_d2 = v[8];
        records.push_back(r);
    }
    return records;
}

void write_snapshot(const std::string& path, const Field& u, double t, double epsilon) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "# L=" << format_full(u.grid->L) << '\n';
    out << "# n=" << u.grid->n << '\n';
    out << "# t=" << format_full(t) << '\n';
    out << "# epsilon=" << format_full(epsilon) << '\n';
    out << "x,u\n";
    for (int j = 0; j < u.grid->n; ++j)
        out << format_full(u.grid->x[j]) << ',' << format_full(u[j]) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    Snapshot s;
    bool have_L = false, have_n = false, have_t = false, have_eps = false;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            const std::string val = line.substr(eq + 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            try {
                if (key == "L") {
                    s.L = std::stod(val);
                    have_L = true;
                } else if (key == "n") {
                    s.n = std::stoi(val);
                    have_n = true;
                } else if (key == "t") {
                    s.t = std::stod(val);
                    have_t = true;
                } else if (key == "epsilon") {
                    s.epsilon = std::stod(val);
                    have_eps = true;
                }
            } catch (const std::exception&) {
                throw IoError("bad snapshot header line in " + path + ": '" + line + "'");
            }
            continue;
        }
        if (line == "x,u") continue;
        const std::vector<double> v = split_doubles(line, path);
        if (v.size() != 2)
            throw IoError("expected 2 columns, got " + std::to_string(v.size()) + " in " + path);
        s.x.push_back(v[0]);
        s.u.push_back(v[1]);
    }
    if (!(have_L && have_n && have_t && have_eps))
        throw IoError("snapshot " + path + " is missing one of the # L/n/t/epsilon headers");
    if (static_cast<int>(s.u.size()) != s.n)
        throw IoError("snapshot " + path + " declares n=" + std::to_string(s.n) + " but has " +
                      std::to_string(s.u.size()) + " rows");
    return s;
}

} // namespace stfilm

#include "stfilm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "stfilm/errors.hpp"
#include "stfilm/io.hpp"
#include "stfilm/rng.hpp"

namespace stfilm {

namespace {

constexpr std::uint64_t kReplicaStream = 0x5245504c494341ULL; // per-replica path seeds

std::string trim(const std::string& s) {
    const char* ws = " \t";
    const std::size_t a = s.find_first_not_of(ws);
    if (a == std::string::npos) return {};
    const std::size_t b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& val) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(val, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad number for '" + key + "': '" + val + "'");
    }
    if (used != val.size()) throw ConfigError("bad number for '" + key + "': '" + val + "'");
    return v;
}

long long parse_ll(const std::string& key, const std::string& val) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(val, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad integer for '" + key + "': '" + val + "'");
    }
    if (used != val.size()) throw ConfigError("bad integer for '" + key + "': '" + val + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& val) {
    return static_cast<int>(parse_ll(key, val));
}

std::uint64_t parse_u64(const std::string& key, const std::string& val) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(val, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad integer for '" + key + "': '" + val + "'");
    }
    if (used != val.size()) throw ConfigError("bad integer for '" + key + "': '" + val + "'");
    return v;
}

ShiftMethod parse_shift(const std::string& val) {
    if (val == "spectral") return ShiftMethod::spectral;
    if (val == "cubic") return ShiftMethod::cubic;
    throw ConfigError("shift_method must be spectral or cubic, got '" + val + "'");
}

EdgeRule parse_rule(const std::string& val) {
    if (val == "entropy_consistent") return EdgeRule::entropy_consistent;
    if (val == "arithmetic") return EdgeRule::arithmetic;
    if (val == "harmonic") return EdgeRule::harmonic;
    throw ConfigError("averaging must be entropy_consistent, arithmetic or harmonic, got '" +
                      val + "'");
}

InitialCondition parse_ic(const std::string& val) {
    if (val == "constant") return InitialCondition::constant;
    if (val == "sine_bump") return InitialCondition::sine_bump;
    if (val == "gaussian_bump") return InitialCondition::gaussian_bump;
    if (val == "from_file") return InitialCondition::from_file;
    throw ConfigError(
        "initial_condition must be constant, sine_bump, gaussian_bump or from_file, got '" + val +
        "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& val) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= val.size()) {
        const std::size_t comma = val.find(',', pos);
        const std::string tok =
            trim(val.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!tok.empty()) out.push_back(parse_double(key, tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

const char* to_string(ShiftMethod m) {
    return m == ShiftMethod::spectral ? "spectral" : "cubic";
}

const char* to_string(EdgeRule r) {
    switch (r) {
    case EdgeRule::entropy_consistent: return "entropy_consistent";
    case EdgeRule::arithmetic: return "arithmetic";
    default: return "harmonic";
    }
}

const char* to_string(InitialCondition ic) {
    switch (ic) {
    case InitialCondition::constant: return "constant";
    case InitialCondition::sine_bump: return "sine_bump";
    case InitialCondition::gaussian_bump: return "gaussian_bump";
    default: return "from_file";
    }
}

int resolve_threads(int flag, int jobs) {
    int w = flag;
    if (w <= 0) {
        if (const char* env = std::getenv("STFILM_THREADS")) w = std::atoi(env);
    }
    if (w <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        w = hw ? static_cast<int>(hw) : 1;
    }
    return std::clamp(w, 1, std::max(1, jobs));
}

void write_ensemble_csv(const std::string& path, const EnsembleStats& st) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "t,J_mean,J_q05,J_q95,supdev_mean,supdev_max,fraction_decayed\n";
    for (std::size_t k = 0; k < st.times.size(); ++k) {
        out << format_full(st.times[k]) << ',' << format_full(st.J_mean[k]) << ','
            << format_full(st.J_q05[k]) << ',' << format_full(st.J_q95[k]) << ','
            << format_full(st.supdev_mean[k]) << ',' << format_full(st.supdev_max[k]) << ','
            << format_full(st.fraction_decayed[k]) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");

        if (key == "L") cfg.L = parse_double(key, val);
        else if (key == "n") cfg.n = parse_int(key, val);
        else if (key == "T") cfg.T = parse_double(key, val);
        else if (key == "N_plus_1") cfg.N_plus_1 = parse_int(key, val);
        else if (key == "epsilon") cfg.epsilon = parse_double(key, val);
        else if (key == "theta") cfg.theta = parse_double(key, val);
        else if (key == "record_every") cfg.record_every = parse_int(key, val);
        else if (key == "seed") cfg.seed = parse_u64(key, val);
        else if (key == "shift_method") cfg.shift_method = parse_shift(val);
        else if (key == "dt_internal") cfg.det.dt_internal = parse_double(key, val);
        else if (key == "averaging") cfg.det.averaging = parse_rule(val);
        else if (key == "newton_tol") cfg.det.newton_tol = parse_double(key, val);
        else if (key == "newton_max_iter") cfg.det.newton_max_iter = parse_int(key, val);
        else if (key == "initial_condition") cfg.initial_condition = parse_ic(val);
        else if (key == "amplitude") cfg.amplitude = parse_double(key, val);
        else if (key == "mean_level") cfg.mean_level = parse_double(key, val);
        else if (key == "initial_file") cfg.initial_file = val;
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "ensemble_size") cfg.ensemble_size = parse_int(key, val);
        else if (key == "epsilon_sweep") cfg.epsilon_sweep_values = parse_double_list(key, val);
        else if (key == "n_doublings") cfg.n_doublings = parse_int(key, val);
        else if (key == "decay_tol") cfg.decay_tol = parse_double(key, val);
        else if (key == "threads") cfg.threads = parse_int(key, val);
        else throw ConfigError("unknown config key '" + key + "' (line " +
                               std::to_string(lineno) + ")");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "L = " << format_full(cfg.L) << '\n';
    out << "n = " << cfg.n << '\n';
    out << "T = " << format_full(cfg.T) << '\n';
    out << "N_plus_1 = " << cfg.N_plus_1 << '\n';
    out << "epsilon = " << format_full(cfg.epsilon) << '\n';
    out << "theta = " << format_full(cfg.theta) << '\n';
    out << "record_every = " << cfg.record_every << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "shift_method = " << to_string(cfg.shift_method) << '\n';
    out << "dt_internal = " << format_full(cfg.det.dt_internal) << '\n';
    out << "averaging = " << to_string(cfg.det.averaging) << '\n';
    out << "newton_tol = " << format_full(cfg.det.newton_tol) << '\n';
    out << "newton_max_iter = " << cfg.det.newton_max_iter << '\n';
    out << "initial_condition = " << to_string(cfg.initial_condition) << '\n';
    out << "amplitude = " << format_full(cfg.amplitude) << '\n';
    out << "mean_level = " << format_full(cfg.mean_level) << '\n';
    if (!cfg.initial_file.empty()) out << "initial_file = " << cfg.initial_file << '\n';
    out << "output_dir = " << cfg.output_dir << '\n';
    out << "ensemble_size = " << cfg.ensemble_size << '\n';
    if (!cfg.epsilon_sweep_values.empty()) {
        out << "epsilon_sweep = ";
        for (std::size_t i = 0; i < cfg.epsilon_sweep_values.size(); ++i) {
            if (i) out << ',';
            out << format_full(cfg.epsilon_sweep_values[i]);
        }
        out << '\n';
    }
    out << "n_doublings = " << cfg.n_doublings << '\n';
    out << "decay_tol = " << format_full(cfg.decay_tol) << '\n';
    out << "threads = " << cfg.threads << '\n';
    return out.str();
}

SplittingConfig to_splitting_config(const RunConfig& cfg) {
    SplittingConfig sc;
    sc.T = cfg.T;
    sc.N_plus_1 = cfg.N_plus_1;
    sc.epsilon = cfg.epsilon;
    sc.theta = cfg.theta;
    sc.record_every = cfg.record_every;
    sc.seed = cfg.seed;
    sc.shift_method = cfg.shift_method;
    sc.det = cfg.det;
    return sc;
}

Field build_initial_condition(const RunConfig& cfg) {
    Field u;
    switch (cfg.initial_condition) {
    case InitialCondition::constant: {
        u = Field(TorusGrid::make(cfg.L, cfg.n), cfg.mean_level);
        break;
    }
    case InitialCondition::sine_bump: {
        const double L = cfg.L, a = cfg.amplitude, c = cfg.mean_level;
        u = Field::from_fn(TorusGrid::make(cfg.L, cfg.n), [&](double x) {
            return c + a * std::sin(2.0 * M_PI * x / L);
        });
        break;
    }
    case InitialCondition::gaussian_bump: {
        const double L = cfg.L, a = cfg.amplitude, c = cfg.mean_level;
        const double w = 0.1 * L;
        u = Field::from_fn(TorusGrid::make(cfg.L, cfg.n), [&](double x) {
            const double d = (x - 0.5 * L) / w;
            return c + a * std::exp(-0.5 * d * d);
        });
        break;
    }
    case InitialCondition::from_file: {
        if (cfg.initial_file.empty())
            throw ConfigError("initial_condition = from_file requires initial_file");
        const Snapshot s = read_snapshot(cfg.initial_file);
        u = Field(TorusGrid::make(s.L, s.n), s.u);
        break;
    }
    }
    if (min_value(u) < 0.0)
        throw NegativeInitialData("initial profile has negative minimum " +
                                  std::to_string(min_value(u)));
    return u;
}

WienerPath path_for_replica(const RunConfig& cfg, int replica) {
    const std::uint64_t s =
        rng::derive_key(cfg.seed, kReplicaStream, static_cast<std::uint64_t>(replica));
    return sample_path(s, cfg.T, cfg.N_plus_1);
}

Trajectory run_single(const RunConfig& cfg) {
    const Field u0 = build_initial_condition(cfg);
    SplittingConfig sc = to_splitting_config(cfg);
    sc.seed = rng::derive_key(cfg.seed, kReplicaStream, 0);
    return run_splitting(u0, sc, path_for_replica(cfg, 0));
}

EnsembleStats aggregate(const std::vector<std::vector<DiagnosticsRecord>>& per_path,
                        double decay_tol) {
    if (per_path.empty()) throw InsufficientData("aggregate: no completed paths");
    const std::size_t nt = per_path[0].size();
    for (const auto& p : per_path)
        if (p.size() != nt) throw SimError("aggregate: paths have differing record counts");

    EnsembleStats st;
    const int R = static_cast<int>(per_path.size());
    st.completed = R;
    std::vector<double> J(static_cast<std::size_t>(R));
    for (std::size_t k = 0; k < nt; ++k) {
        const double t0 = per_path[0][k].t;
        double j_sum = 0.0, s_sum = 0.0, s_max = 0.0;
        int decayed = 0;
        for (int r = 0; r < R; ++r) {
            const DiagnosticsRecord& rec = per_path[static_cast<std::size_t>(r)][k];
            if (std::abs(rec.t - t0) > 1e-12 * std::max(1.0, std::abs(t0)))
                throw SimError("aggregate: record times differ across paths");
            J[static_cast<std::size_t>(r)] = rec.energy_J;
            j_sum += rec.energy_J;
            s_sum += rec.sup_dev;
            s_max = std::max(s_max, rec.sup_dev);
            if (rec.sup_dev < decay_tol) ++decayed;
        }
        std::sort(J.begin(), J.end());
        const auto rank = [&](double p) {
            const int i = std::clamp(static_cast<int>(std::ceil(p * R)), 1, R);
            return J[static_cast<std::size_t>(i - 1)];
        };
        st.times.push_back(t0);
        st.J_mean.push_back(j_sum / R);
        st.J_q05.push_back(rank(0.05));
        st.J_q95.push_back(rank(0.95));
        st.supdev_mean.push_back(s_sum / R);
        st.supdev_max.push_back(s_max);
        st.fraction_decayed.push_back(static_cast<double>(decayed) / R);
    }
    return st;
}

EnsembleStats run_ensemble(const RunConfig& cfg) {
    if (cfg.ensemble_size < 1)
        throw ConfigError("ensemble_size must be >= 1, got " + std::to_string(cfg.ensemble_size));
    const Field u0 = build_initial_condition(cfg);
    const int R = cfg.ensemble_size;

    std::vector<std::vector<DiagnosticsRecord>> recs(static_cast<std::size_t>(R));
    std::vector<std::string> errs(static_cast<std::size_t>(R));
    std::vector<char> ok(static_cast<std::size_t>(R), 0);
    std::atomic<int> next{0};

    const auto work = [&]() {
        for (;;) {
            const int r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= R) return;
            try {
                SplittingConfig sc = to_splitting_config(cfg);
                sc.seed = rng::derive_key(cfg.seed, kReplicaStream, static_cast<std::uint64_t>(r));
                Trajectory t = run_splitting(u0, sc, path_for_replica(cfg, r));
                recs[static_cast<std::size_t>(r)] = std::move(t.diagnostics);
                ok[static_cast<std::size_t>(r)] = 1;
            } catch (const SimError& e) {
                errs[static_cast<std::size_t>(r)] = e.what();
            }
        }
    };

    const int workers = resolve_threads(cfg.threads, R);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<int> failed;
    std::vector<std::vector<DiagnosticsRecord>> done;
    for (int r = 0; r < R; ++r) {
        if (ok[static_cast<std::size_t>(r)]) done.push_back(recs[static_cast<std::size_t>(r)]);
        else failed.push_back(r);
    }
    if (10 * static_cast<int>(failed.size()) > R)
        throw SimError("ensemble failed: " + std::to_string(failed.size()) + "/" +
                       std::to_string(R) + " paths raised errors; first: " +
                       errs[static_cast<std::size_t>(failed.front())]);

    EnsembleStats st = aggregate(done, cfg.decay_tol);
    st.failed_replicas = std::move(failed);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    for (int r = 0; r < R; ++r) {
        if (!ok[static_cast<std::size_t>(r)]) continue;
        char name[32];
        std::snprintf(name, sizeof name, "path_%03d.csv", r);
        write_trajectory_csv((fs::path(cfg.output_dir) / name).string(),
                             recs[static_cast<std::size_t>(r)]);
    }
    write_ensemble_csv((fs::path(cfg.output_dir) / "ensemble.csv").string(), st);
    std::ofstream cf(fs::path(cfg.output_dir) / "config.txt");
    if (!cf) throw IoError("cannot write config.txt in " + cfg.output_dir);
    cf << config_to_text(cfg);
    return st;
}

EpsilonSweepReport epsilon_sweep(const RunConfig& cfg) {
    const auto& eps = cfg.epsilon_sweep_values;
    if (eps.empty()) throw ConfigError("epsilon_sweep must be nonempty");
    for (double e : eps)
        if (!(e > 0.0)) throw ConfigError("epsilon_sweep entries must be positive");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1]))
            throw ConfigError("epsilon_sweep must be strictly decreasing");

    const Field u0 = build_initial_condition(cfg);
    const WienerPath p = path_for_replica(cfg, 0);

    std::vector<Trajectory> runs;
    runs.reserve(eps.size());
    for (double e : eps) {
        SplittingConfig sc = to_splitting_config(cfg);
        sc.epsilon = e;
        sc.seed = rng::derive_key(cfg.seed, kReplicaStream, 0);
        runs.push_back(run_splitting(u0, sc, p));
    }

    EpsilonSweepReport rep;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Trajectory& t = runs[i];
        EpsilonSweepEntry e;
        e.epsilon = eps[i];
        e.min_floor = std::numeric_limits<double>::infinity();
        double k_bound = 0.0;
        for (const DiagnosticsRecord& r : t.diagnostics) {
            e.min_floor = std::min(e.min_floor, r.min_u);
            k_bound = std::max(k_bound, r.max_u);
        }
        e.correction =
            std::sqrt(eps[i]) * k_epsilon(eps[i], cfg.theta, k_bound).value *
            t.diagnostics.back().cum_d2;
        try {
            e.decay_rate = decay_fit(t.diagnostics, 0.1 * cfg.T).rate;
        } catch (const SimError&) {
            e.decay_rate = std::numeric_limits<double>::quiet_NaN();
        }
        rep.entries.push_back(e);
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const Trajectory& A = runs[i - 1];
        const Trajectory& B = runs[i];
        if (A.snapshots.size() != B.snapshots.size())
            throw SimError("epsilon_sweep: runs produced differing record grids");
        double gap = 0.0;
        for (std::size_t k = 0; k < A.snapshots.size(); ++k)
            for (int j = 0; j < A.snapshots[k].grid->n; ++j)
                gap = std::max(gap, std::abs(A.snapshots[k][j] - B.snapshots[k][j]));
        rep.gaps.push_back(gap);
    }
    return rep;
}

} // namespace stfilm

#include "pbrg/cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pbrg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& key, int line) {
    std::ostringstream os;
    os << "key '" << key << "' (line " << line << ")";
    return os.str();
}

double to_real(const std::string& key, const std::string& v, int line) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
        throw Error(ErrorCode::TypeError, where(key, line) + ": expected a real number, got '" + v + "'");
    return out;
}

long long to_integer(const std::string& key, const std::string& v, int line) {
    long long out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw Error(ErrorCode::TypeError, where(key, line) + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw Error(ErrorCode::TypeError, where(key, line) + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, int line, F conv) {
    std::vector<T> out;
    for (const std::string& item : split_list(v)) out.push_back(static_cast<T>(conv(key, item, line)));
    if (out.empty()) throw Error(ErrorCode::TypeError, where(key, line) + ": empty list");
    return out;
}

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(const std::string& b) : b_(b) {}
    void need(size_t n) const {
        if (pos_ + n > b_.size()) throw Error(ErrorCode::TruncatedPayload, "snapshot ends before the expected data");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(b_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(size_t n) {
        need(n);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    const std::string& b_;
    size_t pos_ = 0;
};

std::string encode_header(SnapshotKind kind, std::uint64_t n, double alpha, double t) {
    std::string b = "PBRG";
    put_u32(b, kSnapshotVersion);
    b.push_back(static_cast<char>(kind));
    put_u64(b, n);
    put_f64(b, alpha);
    put_f64(b, t);
    return b;
}

SnapshotHeader read_header(Reader& r) {
    r.need(4);
    if (r.bytes(4) != "PBRG") throw Error(ErrorCode::BadMagic, "missing PBRG magic");
    const std::uint32_t version = r.u32();
    if (version != kSnapshotVersion)
        throw Error(ErrorCode::VersionMismatch,
                    "format version " + std::to_string(version) + ", expected " + std::to_string(kSnapshotVersion));
    SnapshotHeader h;
    const std::uint8_t kind = r.u8();
    if (kind > 2) throw Error(ErrorCode::BadMagic, "unknown snapshot kind " + std::to_string(kind));
    h.kind = static_cast<SnapshotKind>(kind);
    h.n_points = r.u64();
    h.alpha = r.f64();
    h.t = r.f64();
    return h;
}

void expect_kind(const SnapshotHeader& h, SnapshotKind k) {
    if (h.kind != k) throw Error(ErrorCode::BadMagic, "snapshot holds a different kind of object");
}

void expect_end(const Reader& r) {
    if (!r.done()) throw Error(ErrorCode::TruncatedPayload, "snapshot has bytes past the payload");
}

void check_grid_size(std::uint64_t n) {
    if (n < 8 || n % 2 != 0 || n > (1u << 20))
        throw Error(ErrorCode::TruncatedPayload, "implausible n_points " + std::to_string(n));
}

bool hermitian(const VectorXc& c, const Grid& g) {
    if (c(0) != cplx(0.0)) return false;
    for (int xi = 0; xi <= g.kmax(); ++xi)
        if (c(g.index(-xi)) != std::conj(c(g.index(xi)))) return false;
    return true;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"n_points", "integer", nullptr, "grid size N (even, >= 8)"},
        {"alpha", "real", nullptr, "dispersion order, in (1, 3]"},
        {"equation", "full | paralinear", nullptr, "nonlinearity u u_x or T_u u_x"},
        {"init", "cos1 | cos1sin2 | bump | random", nullptr, "initial condition family"},
        {"amplitude", "real", nullptr, "sup norm of the initial condition"},
        {"t_end", "real", nullptr, "final time"},
        {"B", "real", "8", "cutoff aperture"},
        {"b", "real", "2", "cutoff floor"},
        {"dt", "real", "0.5 (N/2)^-alpha 2 pi", "time step"},
        {"s", "real", "2", "Sobolev index of the energy and conjugation studies"},
        {"seed", "integer", "0", "seed of the random initial condition and random symbols"},
        {"epsilon", "real", "0.05", "smallness threshold of the exponential gauge"},
        {"J_max", "integer", "8", "terms of the time-dependent series"},
        {"samples", "integer", "10", "recorded samples after t = 0"},
        {"dealias", "bool", "true", "2/3 rule for the full nonlinearity"},
        {"adaptive", "bool", "false", "step-doubling control at relative error 1e-8"},
        {"scan_alphas", "list of reals", "1.1, 1.4, 1.7", "alpha values of the blow-up scan"},
        {"scan_amplitudes", "list of reals", "0.01, 0.1, 1.0", "amplitudes of the blow-up scan"},
        {"scan_grids", "list of integers", "512, 1024", "grids compared by the blow-up scan"},
    };
    return keys;
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

SuiteParams RunConfig::suite_params() const {
    SuiteParams p;
    p.n_points = sim.n_points;
    p.alpha = sim.alpha;
    p.cutoff = sim.cutoff;
    p.seed = entries.count("seed") ? sim.seed : p.seed;
    p.epsilon = exp.epsilon;
    p.j_max = exp.j_max;
    return p;
}

RunConfig parse_config_text(const std::string& text) {
    std::set<std::string> known;
    for (const ConfigKey& k : config_keys()) known.insert(k.name);

    RunConfig cfg;
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::TypeError, "line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!known.count(key)) throw Error(ErrorCode::UnknownKey, where(key, line) + ": unknown key");
        if (lines.count(key)) {
            std::ostringstream os;
            os << "key '" << key << "' set on line " << lines[key] << " and line " << line;
            throw Error(ErrorCode::DuplicateKey, os.str());
        }
        if (value.empty()) throw Error(ErrorCode::TypeError, where(key, line) + ": empty value");
        lines[key] = line;
        cfg.entries[key] = value;
    }

    for (const ConfigKey& k : config_keys())
        if (!k.default_value && !cfg.entries.count(k.name))
            throw Error(ErrorCode::MissingRequired, std::string("key '") + k.name + "': required key is missing");

    SimConfig& s = cfg.sim;
    ExperimentParams& e = cfg.exp;
    for (const auto& [key, v] : cfg.entries) {
        const int ln = lines[key];
        if (key == "n_points") {
            const long long n = to_integer(key, v, ln);
            if (n < 8 || n % 2 != 0 || n > (1 << 16))
                throw Error(ErrorCode::InvalidValue, where(key, ln) + ": must be even and at least 8");
            s.n_points = static_cast<int>(n);
        } else if (key == "alpha") {
            s.alpha = to_real(key, v, ln);
            if (!(s.alpha > 1.0 && s.alpha <= 3.0))
                throw Error(ErrorCode::InvalidValue, where(key, ln) + ": alpha must lie in (1, 3]");
        } else if (key == "equation") {
            try {
                s.equation = parse_equation(v);
            } catch (const Error&) {
                throw Error(ErrorCode::TypeError, where(key, ln) + ": expected full or paralinear, got '" + v + "'");
            }
        } else if (key == "init") {
            try {
                s.init = parse_init(v);
            } catch (const Error&) {
                throw Error(ErrorCode::TypeError,
                            where(key, ln) + ": expected cos1, cos1sin2, bump or random, got '" + v + "'");
            }
        } else if (key == "amplitude") {
            s.amplitude = to_real(key, v, ln);
        } else if (key == "t_end") {
            s.t_end = to_real(key, v, ln);
        } else if (key == "B") {
            s.cutoff.big_b = to_real(key, v, ln);
        } else if (key == "b") {
            s.cutoff.little_b = to_real(key, v, ln);
        } else if (key == "dt") {
            s.dt = to_real(key, v, ln);
            if (!(s.dt > 0.0)) throw Error(ErrorCode::InvalidValue, where(key, ln) + ": dt must be positive");
        } else if (key == "s") {
            e.s = to_real(key, v, ln);
        } else if (key == "seed") {
            const long long seed = to_integer(key, v, ln);
            if (seed < 0) throw Error(ErrorCode::InvalidValue, where(key, ln) + ": seed must be non-negative");
            s.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "epsilon") {
            e.epsilon = to_real(key, v, ln);
        } else if (key == "J_max") {
            e.j_max = static_cast<int>(to_integer(key, v, ln));
        } else if (key == "samples") {
            s.samples = static_cast<int>(to_integer(key, v, ln));
        } else if (key == "dealias") {
            s.dealias = to_bool(key, v, ln);
        } else if (key == "adaptive") {
            s.adaptive = to_bool(key, v, ln);
        } else if (key == "scan_alphas") {
            e.scan_alphas = to_list<double>(key, v, ln, to_real);
        } else if (key == "scan_amplitudes") {
            e.scan_amplitudes = to_list<double>(key, v, ln, to_real);
        } else if (key == "scan_grids") {
            e.scan_grids = to_list<int>(key, v, ln, to_integer);
        }
    }
    try {
        s.cutoff = Cutoff(s.cutoff.big_b, s.cutoff.little_b);
        s.validate();
    } catch (const Error& err) {
        throw Error(ErrorCode::InvalidValue, err.what());
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot rename to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string encode_field(const Field& u, double alpha, double t) {
    const Grid& g = u.grid();
    std::string b = encode_header(SnapshotKind::Field, static_cast<std::uint64_t>(g.n()), alpha, t);
    for (int i = 0; i < g.n(); ++i) {
        put_f64(b, u.spectrum()(i).real());
        put_f64(b, u.spectrum()(i).imag());
    }
    return b;
}

std::string encode_symbol(const Symbol& a, double alpha, double t) {
    const Grid& g = a.grid();
    std::string b = encode_header(SnapshotKind::Symbol, static_cast<std::uint64_t>(g.n()), alpha, t);
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            put_f64(b, a.coeffs()(i, j).real());
            put_f64(b, a.coeffs()(i, j).imag());
        }
    }
    return b;
}

SnapshotHeader decode_header(const std::string& bytes) {
    Reader r(bytes);
    return read_header(r);
}

LoadedField decode_field(const std::string& bytes) {
    Reader r(bytes);
    const SnapshotHeader h = read_header(r);
    expect_kind(h, SnapshotKind::Field);
    check_grid_size(h.n_points);
    const Grid g(static_cast<int>(h.n_points));
    r.need(16 * h.n_points);
    VectorXc c(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const double re = r.f64();
        const double im = r.f64();
        c(i) = cplx(re, im);
    }
    expect_end(r);
    const bool real = hermitian(c, g);
    return {Field(g, c, real), h.alpha, h.t};
}

LoadedSymbol decode_symbol(const std::string& bytes) {
    Reader r(bytes);
    const SnapshotHeader h = read_header(r);
    expect_kind(h, SnapshotKind::Symbol);
    check_grid_size(h.n_points);
    const Grid g(static_cast<int>(h.n_points));
    r.need(16 * h.n_points * h.n_points);
    MatrixXc m(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            const double re = r.f64();
            const double im = r.f64();
            m(i, j) = cplx(re, im);
        }
    }
    expect_end(r);
    return {Symbol(g, m, 0.0, 0.0), h.alpha, h.t};
}

std::vector<TrajectoryIndexEntry> decode_trajectory_index(const std::string& bytes) {
    Reader r(bytes);
    const SnapshotHeader h = read_header(r);
    expect_kind(h, SnapshotKind::TrajectoryIndex);
    const std::uint64_t count = r.u64();
    std::vector<TrajectoryIndexEntry> out;
    for (std::uint64_t k = 0; k < count; ++k) {
        TrajectoryIndexEntry e;
        e.t = r.f64();
        e.file = r.bytes(r.u32());
        out.push_back(e);
    }
    expect_end(r);
    return out;
}

void save_field(const std::filesystem::path& path, const Field& u, double alpha, double t) {
    write_atomic(path, encode_field(u, alpha, t));
}

LoadedField load_field(const std::filesystem::path& path) { return decode_field(read_file(path)); }

void save_symbol(const std::filesystem::path& path, const Symbol& a, double alpha, double t) {
    write_atomic(path, encode_symbol(a, alpha, t));
}

LoadedSymbol load_symbol(const std::filesystem::path& path) { return decode_symbol(read_file(path)); }

std::vector<std::filesystem::path> save_trajectory(const std::filesystem::path& dir, const std::string& stem,
                                                   const Trajectory& tr, double alpha) {
    std::vector<std::filesystem::path> written;
    std::string index;
    const std::uint64_t n = tr.states.empty() ? 0 : static_cast<std::uint64_t>(tr.states.front().grid().n());
    index = encode_header(SnapshotKind::TrajectoryIndex, n, alpha, tr.times.empty() ? 0.0 : tr.times.back());
    put_u64(index, tr.states.size());
    for (size_t k = 0; k < tr.states.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04zu.pbrg", stem.c_str(), k);
        save_field(dir / name, tr.states[k], alpha, tr.times[k]);
        written.push_back(dir / name);
        put_f64(index, tr.times[k]);
        put_u32(index, static_cast<std::uint32_t>(std::string(name).size()));
        index += name;
    }
    const std::filesystem::path ip = dir / (stem + "_index.pbrg");
    write_atomic(ip, index);
    written.insert(written.begin(), ip);
    return written;
}

LoadedTrajectory load_trajectory(const std::filesystem::path& index) {
    const std::string bytes = read_file(index);
    const SnapshotHeader h = decode_header(bytes);
    LoadedTrajectory out;
    out.alpha = h.alpha;
    for (const TrajectoryIndexEntry& e : decode_trajectory_index(bytes)) {
        LoadedField f = load_field(index.parent_path() / e.file);
        out.times.push_back(e.t);
        out.states.push_back(f.field);
    }
    return out;
}

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(const std::vector<std::string>& row) {
    if (row.size() != header_.size()) throw Error(ErrorCode::InvalidValue, "CSV row width differs from header");
    rows_.push_back(row);
}

void CsvTable::add_numbers(const std::vector<double>& row) {
    std::vector<std::string> cells;
    for (double v : row) cells.push_back(csv_number(v));
    add(cells);
}

std::string CsvTable::str() const {
    auto join = [](const std::vector<std::string>& cells) {
        std::string line;
        for (size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
        return line + "\n";
    };
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r);
    return out;
}

CsvTable simulate_table(const Trajectory& tr, double alpha) {
    CsvTable t({"t", "mass", "hamiltonian", "H2", "lipschitz", "weak_criterion", "sup"});
    for (size_t k = 0; k < tr.states.size(); ++k) {
        const DiagnosticsRecord d = diagnostics(tr.states[k], alpha, {2.0}, tr.times[k]);
        t.add_numbers({d.t, d.mass, d.hamiltonian, d.sobolev_norms.at(2.0), d.lipschitz, d.weak_criterion, d.sup_norm});
    }
    return t;
}

CsvTable checks_table(const std::vector<Check>& checks) {
    CsvTable t({"name", "relation", "actual", "tolerance", "pass"});
    for (const Check& c : checks)
        t.add({c.name, c.relation, csv_number(c.actual), csv_number(c.tolerance), c.pass ? "true" : "false"});
    return t;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["config_hash"] = hex64(config_hash);
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::string failure_record(const Check& c) {
    return failure_record(c.name, c.relation + " " + csv_number(c.tolerance), csv_number(c.actual), c.tolerance);
}

std::string failure_record(const std::string& name, const std::string& expected, const std::string& actual,
                           double tolerance) {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["expected"] = expected;
    j["actual"] = actual;
    j["tolerance"] = tolerance;
    return j.dump();
}

}  // namespace pbrg

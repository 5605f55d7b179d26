#pragma once

// Run configuration files, PBRG snapshots, run manifests, CSV tables and failure records.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pbrg/suites.hpp"

namespace pbrg {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentParams {
    double s = 2.0;
    double epsilon = 0.05;
    int j_max = 8;
    std::vector<double> scan_alphas = {1.1, 1.4, 1.7};
    std::vector<double> scan_amplitudes = {0.01, 0.1, 1.0};
    std::vector<int> scan_grids = {512, 1024};
};

struct RunConfig {
    SimConfig sim;
    ExperimentParams exp;
    std::map<std::string, std::string> entries;  // trimmed key -> trimmed value as written

    // "key=value\n" lines sorted by key
    std::string canonical() const;
    std::uint64_t hash() const;
    SuiteParams suite_params() const;
};

struct ConfigKey {
    const char* name;
    const char* type;
    const char* default_value;  // nullptr for required keys
    const char* meaning;
};
const std::vector<ConfigKey>& config_keys();

// Flat "key = value" text; '#' starts a comment.  Errors name the key and line.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

enum class SnapshotKind : std::uint8_t { Field = 0, Symbol = 1, TrajectoryIndex = 2 };
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
    SnapshotKind kind = SnapshotKind::Field;
    std::uint64_t n_points = 0;
    double alpha = 0.0;
    double t = 0.0;
};

std::string encode_field(const Field& u, double alpha, double t);
std::string encode_symbol(const Symbol& a, double alpha, double t);

struct LoadedField {
    Field field;
    double alpha = 0.0;
    double t = 0.0;
};
struct LoadedSymbol {
    Symbol symbol;
    double alpha = 0.0;
    double t = 0.0;
};
struct TrajectoryIndexEntry {
    double t = 0.0;
    std::string file;
};

SnapshotHeader decode_header(const std::string& bytes);
LoadedField decode_field(const std::string& bytes);
// order and regularity are not part of the format; the loaded symbol carries (0, 0)
LoadedSymbol decode_symbol(const std::string& bytes);
std::vector<TrajectoryIndexEntry> decode_trajectory_index(const std::string& bytes);

void save_field(const std::filesystem::path& path, const Field& u, double alpha, double t);
LoadedField load_field(const std::filesystem::path& path);
void save_symbol(const std::filesystem::path& path, const Symbol& a, double alpha, double t);
LoadedSymbol load_symbol(const std::filesystem::path& path);

// <dir>/<stem>_index.pbrg plus one field snapshot per sample; returns the files written
std::vector<std::filesystem::path> save_trajectory(const std::filesystem::path& dir, const std::string& stem,
                                                   const Trajectory& tr, double alpha);
struct LoadedTrajectory {
    std::vector<double> times;
    std::vector<Field> states;
    double alpha = 0.0;
};
LoadedTrajectory load_trajectory(const std::filesystem::path& index);

std::string csv_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(const std::vector<std::string>& row);
    void add_numbers(const std::vector<double>& row);
    std::string str() const;
    size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// One row per recorded sample: t, mass, hamiltonian, H2, lipschitz, weak_criterion, sup.
CsvTable simulate_table(const Trajectory& tr, double alpha);
CsvTable checks_table(const std::vector<Check>& checks);

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

// {"name", "expected", "actual", "tolerance"} on one line
std::string failure_record(const Check& c);
std::string failure_record(const std::string& name, const std::string& expected, const std::string& actual,
                           double tolerance);

}  // namespace pbrg

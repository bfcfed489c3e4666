#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qsu2 {

/// Library version, as stamped into every output row.
const char* version() noexcept;

namespace cli {

enum class Format { Csv, Json };

struct TGrid {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    bool log_spaced = true;

    /// Parses "start:stop:count".
    static TGrid parse(const std::string& text, bool log_spaced);
    std::vector<double> points() const;
};

/// Parameters of one invocation. Spins are exchanged as doubled integers
/// (lmax_doubled = 24 means Lmax = 12). Unset optional fields fall back to
/// per-experiment defaults.
struct RunConfig {
    std::string experiment = "all";
    double q = 1.2;
    std::optional<int> lmax_doubled;
    std::optional<double> t;
    std::optional<TGrid> t_grid;
    /// Relative tolerance of the operator-norm iterations.
    double tolerance = 1e-8;
    std::uint64_t seed = 20240601;
    int precision_bits = 53;
    /// Output file (single experiment) or directory (`all`); empty selects the default.
    std::string out;
    Format format = Format::Csv;
    /// Ladder levels of the representation oracle.
    int oracle_levels = 60;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

inline const std::vector<std::string>& experiments()
{
    static const std::vector<std::string> names = {"validate", "haar", "commutators", "heat", "modular"};
    return names;
}

int default_lmax_doubled(const std::string& experiment);

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Criterion {
    std::string name;
    bool pass = false;
    std::string measured;
};

struct ExperimentResult {
    std::string name;
    /// Provenance values actually used.
    double q = 0.0;
    int lmax_doubled = 0;
    int precision_bits = 53;
    std::uint64_t seed = 0;
    Table table;
    std::vector<Criterion> criteria;

    bool passed() const;
};

/// Runs one experiment. Library errors are caught and reported as a failed
/// criterion; the rows produced before the error are kept.
ExperimentResult run_experiment(const std::string& name, const RunConfig& config);

/// CSV with provenance (q, lmax_doubled, precision_bits, seed, version) and
/// status columns appended; reals in scientific notation with 17 significant digits.
void write_csv(const ExperimentResult& result, std::ostream& os);
/// The same schema as a JSON document {experiment, columns, rows, criteria}.
void write_json(const ExperimentResult& result, std::ostream& os);

/// Parses command-line arguments (including an optional --config file of
/// key=value lines). Throws ConfigError on invalid input.
RunConfig parse_args(int argc, const char* const* argv);

/// Entry point of the command-line tool. Returns 0 when every criterion
/// passes, 1 on a failed criterion, 2 on a configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cli
} // namespace qsu2

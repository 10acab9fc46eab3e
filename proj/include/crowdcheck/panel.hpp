#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace crowdcheck {

// --- quarters ---------------------------------------------------------

// Parses "YYYYQn" (n in 1..4) into a linear quarter index. The format is
// strict: four digits, literal 'Q', one digit.
long quarter_index(const std::string& period);

std::string quarter_name(long index);

// Period reached h quarters after `period`. h may be zero or negative.
std::string advance_quarter(const std::string& period, int h);

// --- core containers --------------------------------------------------

struct Estimate {
    std::string forecaster_id;
    double value = 0.0;
};

// One forecasting experiment: a group of simultaneous estimates of the
// same realized quantity.
struct Experiment {
    std::string id;
    std::string indicator;
    int horizon = 0;
    std::string survey_period;
    double truth = 0.0;
    std::vector<Estimate> estimates;

    std::vector<double> values() const;
    std::size_t size() const { return estimates.size(); }
};

struct Dataset {
    std::vector<Experiment> experiments;
    std::string provenance;

    // Sorts experiments by (indicator, horizon, survey_period) and
    // estimates by forecaster id, giving every pipeline stage the same
    // iteration order regardless of input order.
    void canonicalize();

    const Experiment* find(const std::string& id) const;
};

// --- tabular records ----------------------------------------------------

struct ForecastRecord {
    std::string survey_period;
    std::string indicator;
    int horizon = 0;
    std::string forecaster_id;
    double estimate = 0.0;
};

struct TruthRecord {
    std::string indicator;
    std::string target_period;
    double value = 0.0;
};

struct CsvSchema {
    std::string missing_sentinel = "#N/A";
};

struct ForecastParse {
    std::vector<ForecastRecord> records;
    std::size_t skipped_missing = 0; // rows whose estimate was the sentinel
};

ForecastParse parse_forecast_csv(std::istream& in, const CsvSchema& schema = {});
void write_forecast_csv(std::ostream& out, const std::vector<ForecastRecord>& records);

class TruthTable {
public:
    void add(const TruthRecord& rec); // duplicate key -> DataError
    std::optional<double> lookup(const std::string& indicator,
                                 const std::string& target_period) const;
    std::size_t size() const { return values_.size(); }
    std::vector<TruthRecord> rows() const;

private:
    std::map<std::pair<std::string, std::string>, double> values_;
};

TruthTable parse_truth_csv(std::istream& in);
void write_truth_csv(std::ostream& out, const TruthTable& truths);

// --- assembly -----------------------------------------------------------

struct DropRecord {
    std::string group;  // indicator/h<horizon>/<survey_period>
    std::string reason; // "missing truth" or "too few estimates (n=..)"
    std::size_t n_estimates = 0;
};

struct AssembleResult {
    Dataset dataset;
    std::vector<DropRecord> dropped;
};

// Groups forecast rows by (indicator, horizon, survey_period), attaches
// the realized value for the period the forecast targets, and drops
// groups with no truth or fewer than min_n estimates. A forecaster
// appearing twice in one group is an error.
AssembleResult assemble_experiments(const std::vector<ForecastRecord>& records,
                                    const TruthTable& truths,
                                    std::size_t min_n = 2,
                                    const std::set<int>* horizons = nullptr);

// --- guessing-game files --------------------------------------------------

// Reads the one-estimate-per-line format with a "# truth=... indicator=..."
// header. The result is a single horizon-0 experiment with synthetic
// forecaster ids.
Experiment parse_guessing_file(std::istream& in);

// --- dataset serialization -------------------------------------------------

// Panels are written with shortest round-trip doubles so that
// write/parse/assemble reproduces the dataset exactly.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_truths_csv(std::ostream& out, const Dataset& dataset);

} // namespace crowdcheck

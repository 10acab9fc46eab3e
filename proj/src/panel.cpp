#include "crowdcheck/panel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/format.hpp"

namespace crowdcheck {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

// Reads one line, tolerating CRLF endings. Returns false at EOF.
bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void expect_header(const std::string& line, const std::vector<std::string>& expected,
                   const char* what) {
    const auto fields = split_csv_line(line);
    if (fields.size() != expected.size())
        throw SchemaError(std::string(what) + " header has " + std::to_string(fields.size()) +
                          " columns, expected " + std::to_string(expected.size()));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (fields[i] != expected[i])
            throw SchemaError(std::string(what) + " header column " + std::to_string(i + 1) +
                              " is \"" + fields[i] + "\", expected \"" + expected[i] + "\"");
    }
}

} // namespace

long quarter_index(const std::string& period) {
    const bool ok = period.size() == 6 && period[4] == 'Q' &&
                    std::isdigit(static_cast<unsigned char>(period[0])) &&
                    std::isdigit(static_cast<unsigned char>(period[1])) &&
                    std::isdigit(static_cast<unsigned char>(period[2])) &&
                    std::isdigit(static_cast<unsigned char>(period[3])) &&
                    period[5] >= '1' && period[5] <= '4';
    if (!ok)
        throw DataError("invalid quarter \"" + period + "\", expected YYYYQn with n in 1..4");
    const long year = (period[0] - '0') * 1000 + (period[1] - '0') * 100 +
                      (period[2] - '0') * 10 + (period[3] - '0');
    return year * 4 + (period[5] - '1');
}

std::string quarter_name(long index) {
    if (index < 0 || index >= 10000 * 4)
        throw DataError("quarter index " + std::to_string(index) + " out of range");
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04ldQ%ld", index / 4, index % 4 + 1);
    return buf;
}

std::string advance_quarter(const std::string& period, int h) {
    return quarter_name(quarter_index(period) + h);
}

std::vector<double> Experiment::values() const {
    std::vector<double> v;
    v.reserve(estimates.size());
    for (const auto& e : estimates) v.push_back(e.value);
    return v;
}

void Dataset::canonicalize() {
    // Estimates stay in file order; only the experiment order is imposed.
    std::sort(experiments.begin(), experiments.end(),
              [](const Experiment& a, const Experiment& b) {
                  return std::tie(a.indicator, a.horizon, a.survey_period) <
                         std::tie(b.indicator, b.horizon, b.survey_period);
              });
    for (std::size_t i = 1; i < experiments.size(); ++i) {
        const auto& a = experiments[i - 1];
        const auto& b = experiments[i];
        if (a.indicator == b.indicator && a.horizon == b.horizon &&
            a.survey_period == b.survey_period)
            throw DataError("duplicate experiment key " + b.indicator + "/h" +
                            std::to_string(b.horizon) + "/" + b.survey_period);
    }
}

const Experiment* Dataset::find(const std::string& id) const {
    for (const auto& exp : experiments)
        if (exp.id == id) return &exp;
    return nullptr;
}

ForecastParse parse_forecast_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!read_line(in, line)) throw SchemaError("forecast file is empty");
    expect_header(line, {"survey_period", "indicator", "horizon", "forecaster_id", "estimate"},
                  "forecast");

    ForecastParse out;
    std::size_t lineno = 1;
    while (read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw RowError(lineno, "expected 5 fields, got " + std::to_string(fields.size()));
        if (fields[4] == schema.missing_sentinel) {
            ++out.skipped_missing;
            continue;
        }
        ForecastRecord rec;
        rec.survey_period = fields[0];
        try {
            quarter_index(rec.survey_period);
        } catch (const Error& e) {
            throw RowError(lineno, e.what());
        }
        rec.indicator = fields[1];
        if (rec.indicator.empty()) throw RowError(lineno, "empty indicator");
        rec.horizon = static_cast<int>(parse_long(fields[2], lineno));
        rec.forecaster_id = fields[3];
        if (rec.forecaster_id.empty()) throw RowError(lineno, "empty forecaster_id");
        rec.estimate = parse_double(fields[4], lineno);
        out.records.push_back(std::move(rec));
    }
    return out;
}

void write_forecast_csv(std::ostream& out, const std::vector<ForecastRecord>& records) {
    out << "survey_period,indicator,horizon,forecaster_id,estimate\n";
    for (const auto& r : records) {
        out << r.survey_period << ',' << r.indicator << ',' << r.horizon << ','
            << r.forecaster_id << ',' << to_sig15(r.estimate) << '\n';
    }
}

void TruthTable::add(const TruthRecord& rec) {
    const auto key = std::make_pair(rec.indicator, rec.target_period);
    const auto [it, inserted] = values_.emplace(key, rec.value);
    if (!inserted && it->second != rec.value)
        throw DataError("conflicting realized values for " + rec.indicator + " at " +
                        rec.target_period);
}

std::optional<double> TruthTable::lookup(const std::string& indicator,
                                         const std::string& target_period) const {
    const auto it = values_.find(std::make_pair(indicator, target_period));
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::vector<TruthRecord> TruthTable::rows() const {
    std::vector<TruthRecord> out;
    out.reserve(values_.size());
    for (const auto& [key, value] : values_)
        out.push_back(TruthRecord{key.first, key.second, value});
    return out;
}

TruthTable parse_truth_csv(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw SchemaError("truth file is empty");
    expect_header(line, {"indicator", "target_period", "value"}, "truth");

    TruthTable table;
    std::size_t lineno = 1;
    while (read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw RowError(lineno, "expected 3 fields, got " + std::to_string(fields.size()));
        TruthRecord rec;
        rec.indicator = fields[0];
        if (rec.indicator.empty()) throw RowError(lineno, "empty indicator");
        rec.target_period = fields[1];
        try {
            quarter_index(rec.target_period);
        } catch (const Error& e) {
            throw RowError(lineno, e.what());
        }
        rec.value = parse_double(fields[2], lineno);
        table.add(rec);
    }
    return table;
}

void write_truth_csv(std::ostream& out, const TruthTable& truths) {
    out << "indicator,target_period,value\n";
    for (const auto& r : truths.rows())
        out << r.indicator << ',' << r.target_period << ',' << to_sig15(r.value) << '\n';
}

AssembleResult assemble_experiments(const std::vector<ForecastRecord>& records,
                                    const TruthTable& truths, std::size_t min_n,
                                    const std::set<int>* horizons) {
    if (min_n < 2) throw DataError("min_n must be at least 2");

    using Key = std::tuple<std::string, int, std::string>;
    std::map<Key, std::vector<const ForecastRecord*>> groups;
    for (const auto& rec : records) {
        if (horizons && !horizons->count(rec.horizon)) continue;
        groups[Key(rec.indicator, rec.horizon, rec.survey_period)].push_back(&rec);
    }

    AssembleResult result;
    for (const auto& [key, rows] : groups) {
        const auto& [indicator, horizon, survey] = key;
        const std::string label =
            indicator + "/h" + std::to_string(horizon) + "/" + survey;

        std::set<std::string> seen;
        for (const auto* row : rows) {
            if (!seen.insert(row->forecaster_id).second)
                throw DataError("forecaster " + row->forecaster_id +
                                " appears twice in group " + label);
        }

        const auto truth = truths.lookup(indicator, advance_quarter(survey, horizon));
        if (!truth) {
            result.dropped.push_back(DropRecord{label, "missing truth", rows.size()});
            continue;
        }
        if (rows.size() < min_n) {
            result.dropped.push_back(DropRecord{
                label, "too few estimates (n=" + std::to_string(rows.size()) + ")",
                rows.size()});
            continue;
        }

        Experiment exp;
        exp.id = label;
        exp.indicator = indicator;
        exp.horizon = horizon;
        exp.survey_period = survey;
        exp.truth = *truth;
        for (const auto* row : rows)
            exp.estimates.push_back(Estimate{row->forecaster_id, row->estimate});
        result.dataset.experiments.push_back(std::move(exp));
    }
    result.dataset.canonicalize();
    return result;
}

Experiment parse_guessing_file(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw SchemaError("guessing file is empty");
    if (line.empty() || line[0] != '#')
        throw SchemaError("guessing file must start with \"# truth=... indicator=...\"");

    std::optional<double> truth;
    std::optional<std::string> indicator;
    std::istringstream head(line.substr(1));
    std::string token;
    while (head >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "truth") {
            truth = parse_double(value, 1);
        } else if (key == "indicator") {
            indicator = value;
        }
    }
    if (!truth) throw SchemaError("guessing file header is missing truth=");
    if (!indicator || indicator->empty())
        throw SchemaError("guessing file header is missing indicator=");

    Experiment exp;
    exp.indicator = *indicator;
    exp.id = *indicator;
    exp.horizon = 0;
    exp.survey_period = "0000Q1";
    exp.truth = *truth;

    std::size_t lineno = 1;
    while (read_line(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        char buf[16];
        std::snprintf(buf, sizeof buf, "g%05zu", exp.estimates.size() + 1);
        exp.estimates.push_back(Estimate{buf, parse_double(line, lineno)});
    }
    if (exp.estimates.size() < 2)
        throw DataError("guessing file " + *indicator + " has fewer than 2 estimates");
    return exp;
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
    out << "survey_period,indicator,horizon,forecaster_id,estimate\n";
    for (const auto& exp : dataset.experiments)
        for (const auto& e : exp.estimates)
            out << exp.survey_period << ',' << exp.indicator << ',' << exp.horizon << ','
                << e.forecaster_id << ',' << to_sig15(e.value) << '\n';
}

void write_dataset_truths_csv(std::ostream& out, const Dataset& dataset) {
    TruthTable truths;
    for (const auto& exp : dataset.experiments)
        truths.add(TruthRecord{exp.indicator,
                               advance_quarter(exp.survey_period, exp.horizon), exp.truth});
    write_truth_csv(out, truths);
}

} // namespace crowdcheck

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/format.hpp"
#include "crowdcheck/panel.hpp"

using namespace crowdcheck;

namespace {

std::string data_path(const std::string& name) {
    const char* dir = std::getenv("CROWDCHECK_DATA");
    return std::string(dir ? dir : "data") + "/" + name;
}

bool records_equal(const ForecastRecord& a, const ForecastRecord& b) {
    return a.survey_period == b.survey_period && a.indicator == b.indicator &&
           a.horizon == b.horizon && a.forecaster_id == b.forecaster_id &&
           a.estimate == b.estimate;
}

bool datasets_equal(const Dataset& a, const Dataset& b) {
    if (a.experiments.size() != b.experiments.size()) return false;
    for (std::size_t i = 0; i < a.experiments.size(); ++i) {
        const auto& x = a.experiments[i];
        const auto& y = b.experiments[i];
        if (x.id != y.id || x.indicator != y.indicator || x.horizon != y.horizon ||
            x.survey_period != y.survey_period || x.truth != y.truth ||
            x.estimates.size() != y.estimates.size())
            return false;
        for (std::size_t j = 0; j < x.estimates.size(); ++j)
            if (x.estimates[j].forecaster_id != y.estimates[j].forecaster_id ||
                x.estimates[j].value != y.estimates[j].value)
                return false;
    }
    return true;
}

} // namespace

TEST_CASE("quarter arithmetic") {
    CHECK(advance_quarter("2019Q3", 2) == "2020Q1");
    CHECK(advance_quarter("2019Q3", 0) == "2019Q3");
    CHECK(advance_quarter("2019Q1", -1) == "2018Q4");
    CHECK(advance_quarter("1999Q4", 1) == "2000Q1");
    CHECK(advance_quarter("2019Q2", 8) == "2021Q2");
    CHECK(quarter_index("2020Q1") - quarter_index("2019Q3") == 2);

    CHECK_THROWS_AS(quarter_index("2019q3"), DataError);
    CHECK_THROWS_AS(quarter_index("19Q3"), DataError);
    CHECK_THROWS_AS(quarter_index("2019Q5"), DataError);
    CHECK_THROWS_AS(quarter_index("2019Q0"), DataError);
    CHECK_THROWS_AS(quarter_index("2019Q33"), DataError);
    CHECK_THROWS_AS(quarter_index(""), DataError);
}

TEST_CASE("forecast parsing skips sentinel rows and counts them") {
    std::istringstream in(
        "survey_period,indicator,horizon,forecaster_id,estimate\n"
        "2019Q3,NGDP,2,f1,101.5\n"
        "2019Q3,NGDP,2,f2,#N/A\n"
        "2019Q3,NGDP,2,f3,99.25\n");
    const auto parsed = parse_forecast_csv(in);
    CHECK(parsed.records.size() == 2);
    CHECK(parsed.skipped_missing == 1);
    CHECK(parsed.records[0].forecaster_id == "f1");
    CHECK(parsed.records[0].estimate == 101.5);
    CHECK(parsed.records[1].estimate == 99.25);
}

TEST_CASE("forecast parsing accepts CRLF and a custom sentinel") {
    std::istringstream in(
        "survey_period,indicator,horizon,forecaster_id,estimate\r\n"
        "2019Q3,NGDP,2,f1,101.5\r\n"
        "2019Q3,NGDP,2,f2,NA\r\n");
    CsvSchema schema;
    schema.missing_sentinel = "NA";
    const auto parsed = parse_forecast_csv(in, schema);
    CHECK(parsed.records.size() == 1);
    CHECK(parsed.skipped_missing == 1);
}

TEST_CASE("forecast header errors name the problem") {
    std::istringstream missing(
        "survey_period,indicator,horizon,forecaster_id\n2019Q3,NGDP,2,f1\n");
    CHECK_THROWS_AS(parse_forecast_csv(missing), SchemaError);

    std::istringstream renamed(
        "survey_period,indicator,horizon,forecaster_id,value\n2019Q3,NGDP,2,f1,1\n");
    CHECK_THROWS_WITH_AS(parse_forecast_csv(renamed),
                         doctest::Contains("estimate"), SchemaError);
}

TEST_CASE("forecast row errors carry the line number") {
    std::istringstream bad_number(
        "survey_period,indicator,horizon,forecaster_id,estimate\n"
        "2019Q3,NGDP,2,f1,101.5\n"
        "2019Q3,NGDP,2,f2,abc\n");
    CHECK_THROWS_WITH_AS(parse_forecast_csv(bad_number), doctest::Contains("line 3"),
                         RowError);

    std::istringstream bad_quarter(
        "survey_period,indicator,horizon,forecaster_id,estimate\n"
        "2019-Q3,NGDP,2,f1,101.5\n");
    CHECK_THROWS_AS(parse_forecast_csv(bad_quarter), RowError);
}

TEST_CASE("forecast files round-trip through serialization") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> value(-1e4, 1e4);
    for (int trial = 0; trial < 50; ++trial) {
        std::ostringstream file;
        file << "survey_period,indicator,horizon,forecaster_id,estimate\n";
        const int rows = 1 + static_cast<int>(gen() % 30);
        for (int r = 0; r < rows; ++r) {
            file << (1990 + gen() % 40) << 'Q' << (1 + gen() % 4) << ",ind"
                 << gen() % 3 << ',' << gen() % 5 << ",f" << r << ','
                 << to_sig15(value(gen)) << '\n';
        }
        std::istringstream first(file.str());
        const auto records1 = parse_forecast_csv(first).records;

        std::ostringstream rewritten;
        write_forecast_csv(rewritten, records1);
        std::istringstream second(rewritten.str());
        const auto records2 = parse_forecast_csv(second).records;

        REQUIRE(records1.size() == records2.size());
        for (std::size_t i = 0; i < records1.size(); ++i)
            CHECK(records_equal(records1[i], records2[i]));
    }
}

TEST_CASE("truth table rejects conflicting duplicates") {
    std::istringstream in(
        "indicator,target_period,value\n"
        "NGDP,2020Q1,184.3\n"
        "NGDP,2020Q1,184.3\n");
    const auto truths = parse_truth_csv(in);
    CHECK(truths.size() == 1);
    CHECK(truths.lookup("NGDP", "2020Q1") == 184.3);
    CHECK_FALSE(truths.lookup("NGDP", "2020Q2").has_value());

    std::istringstream conflict(
        "indicator,target_period,value\n"
        "NGDP,2020Q1,184.3\n"
        "NGDP,2020Q1,184.4\n");
    CHECK_THROWS_AS(parse_truth_csv(conflict), DataError);
}

namespace {

std::vector<ForecastRecord> group_records(const std::string& indicator, int horizon,
                                          const std::string& survey, int n) {
    std::vector<ForecastRecord> records;
    for (int i = 0; i < n; ++i)
        records.push_back(
            ForecastRecord{survey, indicator, horizon, "f" + std::to_string(i), 100.0 + i});
    return records;
}

} // namespace

TEST_CASE("assembly keeps big-enough groups with truths") {
    auto records = group_records("NGDP", 2, "2019Q3", 9);
    TruthTable truths;
    truths.add(TruthRecord{"NGDP", "2020Q1", 184.3});

    const auto result = assemble_experiments(records, truths, 9);
    REQUIRE(result.dataset.experiments.size() == 1);
    CHECK(result.dropped.empty());
    const auto& exp = result.dataset.experiments[0];
    CHECK(exp.id == "NGDP/h2/2019Q3");
    CHECK(exp.size() == 9);
    CHECK(exp.truth == 184.3);
    CHECK(exp.estimates[0].forecaster_id == "f0"); // file order preserved
}

TEST_CASE("assembly drops small groups and missing truths with reasons") {
    auto records = group_records("NGDP", 2, "2019Q3", 5);       // too small at min_n=9
    auto other = group_records("CPI", 2, "2019Q3", 10);         // no truth for 2020Q1
    records.insert(records.end(), other.begin(), other.end());
    TruthTable truths;
    truths.add(TruthRecord{"NGDP", "2020Q1", 184.3});

    const auto result = assemble_experiments(records, truths, 9);
    CHECK(result.dataset.experiments.empty());
    REQUIRE(result.dropped.size() == 2);
    CHECK(result.dropped[0].group == "CPI/h2/2019Q3");
    CHECK(result.dropped[0].reason == "missing truth");
    CHECK(result.dropped[1].group == "NGDP/h2/2019Q3");
    CHECK(result.dropped[1].reason == "too few estimates (n=5)");
}

TEST_CASE("assembly accounting: used plus dropped equals distinct groups") {
    std::vector<ForecastRecord> records;
    for (const auto& g : {group_records("A", 0, "2019Q1", 4), group_records("A", 2, "2019Q1", 2),
                          group_records("B", 0, "2019Q1", 3), group_records("B", 0, "2019Q2", 1)})
        records.insert(records.end(), g.begin(), g.end());
    TruthTable truths;
    truths.add(TruthRecord{"A", "2019Q1", 1.0});
    truths.add(TruthRecord{"A", "2019Q3", 1.0});
    truths.add(TruthRecord{"B", "2019Q1", 1.0});
    truths.add(TruthRecord{"B", "2019Q2", 1.0});

    const auto result = assemble_experiments(records, truths, 2);
    CHECK(result.dataset.experiments.size() + result.dropped.size() == 4);
}

TEST_CASE("assembly rejects duplicate forecasters in one group") {
    auto records = group_records("NGDP", 2, "2019Q3", 3);
    records.push_back(ForecastRecord{"2019Q3", "NGDP", 2, "f1", 50.0});
    TruthTable truths;
    truths.add(TruthRecord{"NGDP", "2020Q1", 184.3});
    CHECK_THROWS_WITH_AS(assemble_experiments(records, truths, 2),
                         doctest::Contains("NGDP/h2/2019Q3"), DataError);
}

TEST_CASE("assembly honors the horizon filter") {
    auto records = group_records("A", 0, "2019Q1", 3);
    auto longer = group_records("A", 4, "2019Q1", 3);
    records.insert(records.end(), longer.begin(), longer.end());
    TruthTable truths;
    truths.add(TruthRecord{"A", "2019Q1", 1.0});
    truths.add(TruthRecord{"A", "2020Q1", 2.0});

    std::set<int> keep{0};
    const auto result = assemble_experiments(records, truths, 2, &keep);
    REQUIRE(result.dataset.experiments.size() == 1);
    CHECK(result.dataset.experiments[0].horizon == 0);
}

TEST_CASE("assembly order does not depend on record order") {
    std::vector<ForecastRecord> records;
    for (const auto& g : {group_records("B", 0, "2019Q2", 3), group_records("A", 2, "2019Q1", 3),
                          group_records("A", 0, "2019Q1", 3)})
        records.insert(records.end(), g.begin(), g.end());
    TruthTable truths;
    truths.add(TruthRecord{"A", "2019Q1", 1.0});
    truths.add(TruthRecord{"A", "2019Q3", 1.5});
    truths.add(TruthRecord{"B", "2019Q2", 2.0});

    const auto forward = assemble_experiments(records, truths, 2);
    std::reverse(records.begin(), records.end());
    std::reverse(records.begin() + 2, records.end()); // scramble further
    const auto backward = assemble_experiments(records, truths, 2);

    REQUIRE(forward.dataset.experiments.size() == 3);
    REQUIRE(backward.dataset.experiments.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(forward.dataset.experiments[i].id == backward.dataset.experiments[i].id);
    CHECK(forward.dataset.experiments[0].id == "A/h0/2019Q1");
    CHECK(forward.dataset.experiments[1].id == "A/h2/2019Q1");
    CHECK(forward.dataset.experiments[2].id == "B/h0/2019Q2");
}

TEST_CASE("dataset round-trips through serialization") {
    std::vector<ForecastRecord> records;
    for (const auto& g : {group_records("A", 0, "2019Q1", 4), group_records("B", 2, "2019Q4", 7)})
        records.insert(records.end(), g.begin(), g.end());
    TruthTable truths;
    truths.add(TruthRecord{"A", "2019Q1", 1.25});
    truths.add(TruthRecord{"B", "2020Q2", -3.5});

    const auto first = assemble_experiments(records, truths, 2).dataset;

    std::ostringstream dataset_csv, truth_csv;
    write_dataset_csv(dataset_csv, first);
    write_dataset_truths_csv(truth_csv, first);

    std::istringstream rf(dataset_csv.str()), rt(truth_csv.str());
    const auto reparsed = parse_forecast_csv(rf).records;
    const auto retruths = parse_truth_csv(rt);
    const auto second = assemble_experiments(reparsed, retruths, 2).dataset;

    CHECK(datasets_equal(first, second));
}

TEST_CASE("duplicate dataset keys are rejected") {
    Dataset d;
    for (int i = 0; i < 2; ++i) {
        Experiment exp;
        exp.id = "e" + std::to_string(i);
        exp.indicator = "A";
        exp.horizon = 0;
        exp.survey_period = "2019Q1";
        exp.truth = 1.0;
        exp.estimates = {{"f1", 1.0}, {"f2", 2.0}};
        d.experiments.push_back(exp);
    }
    CHECK_THROWS_AS(d.canonicalize(), DataError);
}

TEST_CASE("guessing file parses header and keeps estimate order") {
    std::istringstream in("# truth=12.5 indicator=jar\n10\n15.5\n9\n");
    const auto exp = parse_guessing_file(in);
    CHECK(exp.indicator == "jar");
    CHECK(exp.truth == 12.5);
    CHECK(exp.horizon == 0);
    REQUIRE(exp.size() == 3);
    CHECK(exp.estimates[0].value == 10.0);
    CHECK(exp.estimates[1].value == 15.5);
    CHECK(exp.estimates[2].value == 9.0);
    CHECK(exp.estimates[0].forecaster_id != exp.estimates[1].forecaster_id);
}

TEST_CASE("guessing file failure modes") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_guessing_file(empty), SchemaError);

    std::istringstream no_truth("# indicator=jar\n10\n11\n");
    CHECK_THROWS_AS(parse_guessing_file(no_truth), SchemaError);

    std::istringstream no_indicator("# truth=5\n10\n11\n");
    CHECK_THROWS_AS(parse_guessing_file(no_indicator), SchemaError);

    std::istringstream truth_only("# truth=5 indicator=jar\n");
    CHECK_THROWS_AS(parse_guessing_file(truth_only), DataError);

    std::istringstream bad_value("# truth=5 indicator=jar\n10\nxyz\n");
    CHECK_THROWS_AS(parse_guessing_file(bad_value), RowError);
}

TEST_CASE("bundled candies file loads with the published shape") {
    std::ifstream in(data_path("candies.txt"));
    REQUIRE(in.good());
    const auto exp = parse_guessing_file(in);
    CHECK(exp.size() == 105);
    CHECK(exp.truth == 636.0);
    CHECK(exp.indicator == "candies");
}

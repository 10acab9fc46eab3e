#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crowdcheck/errors.hpp"
#include "crowdcheck/format.hpp"
#include "crowdcheck/inference.hpp"
#include "crowdcheck/null_models.hpp"
#include "crowdcheck/panel.hpp"
#include "crowdcheck/report.hpp"
#include "crowdcheck/stats.hpp"

namespace cc = crowdcheck;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- shared input handling ------------------------------------------------

struct InputOpts {
    std::string forecasts;
    std::string truths;
    std::vector<std::string> guessing;
    std::vector<int> horizons;
    std::size_t min_n = 2;
    std::string sentinel = "#N/A";
};

struct LoadedData {
    cc::Dataset dataset;
    std::vector<cc::DropRecord> dropped;
    std::size_t skipped_missing = 0;
};

void add_input_options(CLI::App* sub, InputOpts& in, bool allow_guessing = true) {
    sub->add_option("forecasts", in.forecasts, "forecast CSV file");
    sub->add_option("--truths", in.truths, "realized-values CSV file");
    sub->add_option("--horizon", in.horizons, "keep only these horizons (repeatable)");
    sub->add_option("--min-n", in.min_n, "minimum panel size")->check(CLI::Range(2, 1000000));
    sub->add_option("--missing-sentinel", in.sentinel, "estimate value treated as missing");
    if (allow_guessing)
        sub->add_option("--guessing", in.guessing,
                        "guessing-game file: \"# truth=<v> indicator=<name>\" then one "
                        "estimate per line (repeatable)");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cc::DataError("cannot open input file " + path);
    return in;
}

LoadedData load_inputs(const InputOpts& in) {
    LoadedData out;
    if (!in.guessing.empty()) {
        if (!in.forecasts.empty())
            throw CLI::ValidationError("--guessing cannot be combined with a forecast file");
        for (const auto& path : in.guessing) {
            auto stream = open_input(path);
            out.dataset.experiments.push_back(cc::parse_guessing_file(stream));
        }
        out.dataset.provenance = "guessing files";
        out.dataset.canonicalize();
        return out;
    }
    if (in.forecasts.empty() || in.truths.empty())
        throw CLI::ValidationError(
            "provide a forecast file with --truths, or --guessing files");

    cc::CsvSchema schema;
    schema.missing_sentinel = in.sentinel;
    auto fstream = open_input(in.forecasts);
    const auto parsed = cc::parse_forecast_csv(fstream, schema);
    auto tstream = open_input(in.truths);
    const auto truths = cc::parse_truth_csv(tstream);

    std::set<int> horizons(in.horizons.begin(), in.horizons.end());
    auto assembled = cc::assemble_experiments(parsed.records, truths, in.min_n,
                                              horizons.empty() ? nullptr : &horizons);
    out.dataset = std::move(assembled.dataset);
    out.dataset.provenance = in.forecasts;
    out.dropped = std::move(assembled.dropped);
    out.skipped_missing = parsed.skipped_missing;
    return out;
}

json input_config_json(const InputOpts& in) {
    json cfg;
    if (!in.guessing.empty()) {
        cfg["guessing"] = in.guessing;
    } else {
        cfg["forecasts"] = in.forecasts;
        cfg["truths"] = in.truths;
        cfg["horizons"] = in.horizons;
        cfg["min_n"] = in.min_n;
        cfg["missing_sentinel"] = in.sentinel;
    }
    return cfg;
}

// --- output handling --------------------------------------------------------

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        fs::create_directories(dir_);
    }

    template <typename WriteFn>
    void emit(const std::string& name, WriteFn&& write) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw cc::DataError("cannot write output file " + (dir_ / name).string());
        write(out);
        names_.push_back(name);
    }

    void emit_manifest(json manifest) {
        manifest["outputs"] = names_;
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        if (!out)
            throw cc::DataError("cannot write output file " +
                                (dir_ / "manifest.json").string());
        out << manifest.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

json markers_json(const cc::HistogramTable& hist) {
    json m;
    for (const auto& [name, value] : hist.markers) m[name] = value;
    return m;
}

json correlation_json(const cc::CorrelationResult& corr, cc::CorrelationStat stat) {
    return json{{"rho", corr.rho},
                {"p_value", corr.p_value},
                {"n_pairs", corr.n_pairs},
                {"n_perm", corr.n_perm},
                {"method", cc::to_string(corr.method)},
                {"stat", cc::to_string(stat)}};
}

// --- subcommands -------------------------------------------------------------

struct IngestOpts {
    InputOpts in;
    std::string out = ".";
};

void run_ingest(const IngestOpts& o) {
    const auto data = load_inputs(o.in);
    OutputDir out(o.out);
    out.emit("dataset.csv", [&](std::ostream& s) { cc::write_dataset_csv(s, data.dataset); });
    out.emit("truths.csv",
             [&](std::ostream& s) { cc::write_dataset_truths_csv(s, data.dataset); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });
    out.emit_manifest(json{{"command", "ingest"},
                           {"config", input_config_json(o.in)},
                           {"counts",
                            {{"experiments", data.dataset.experiments.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct SummarizeOpts {
    InputOpts in;
    std::string out = ".";
};

void run_summarize(const SummarizeOpts& o) {
    const auto data = load_inputs(o.in);
    const auto rows = cc::summarize_dataset(data.dataset);
    OutputDir out(o.out);
    out.emit("summary.csv", [&](std::ostream& s) { cc::write_summary_csv(s, rows); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });
    out.emit_manifest(json{{"command", "summarize"},
                           {"config", input_config_json(o.in)},
                           {"counts",
                            {{"experiments", rows.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct ScatterOpts {
    InputOpts in;
    std::string x, y;
    std::string stat = "spearman";
    std::uint64_t n_perm = 100000;
    std::uint64_t seed = 0;
    std::string out = ".";
};

void run_scatter(const ScatterOpts& o) {
    const auto data = load_inputs(o.in);
    const auto xf = cc::parse_stat_field(o.x);
    const auto yf = cc::parse_stat_field(o.y);
    const auto stat = cc::parse_correlation_stat(o.stat);
    const auto table = cc::make_scatter(data.dataset, xf, yf, o.n_perm, o.seed, stat);

    OutputDir out(o.out);
    out.emit("scatter.csv",
             [&](std::ostream& s) { cc::write_scatter_csv(s, table, xf, yf); });
    out.emit("skipped.csv", [&](std::ostream& s) { cc::write_drops_csv(s, table.skipped); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });

    json cfg = input_config_json(o.in);
    cfg["x"] = o.x;
    cfg["y"] = o.y;
    cfg["n_perm"] = o.n_perm;
    cfg["stat"] = o.stat;
    out.emit_manifest(json{{"command", "scatter"},
                           {"config", cfg},
                           {"seed", o.seed},
                           {"correlation", correlation_json(table.corr, stat)},
                           {"moments",
                            {{"x_mean", table.x_mean},
                             {"x_sd", table.x_sd},
                             {"y_mean", table.y_mean},
                             {"y_sd", table.y_sd}}},
                           {"counts",
                            {{"experiments", data.dataset.experiments.size()},
                             {"points", table.points.size()},
                             {"skipped_undefined", table.skipped.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct HistOpts {
    InputOpts in;
    std::size_t bins = 20;
    std::string out = ".";
};

void run_xi_hist(const HistOpts& o) {
    const auto data = load_inputs(o.in);
    const auto hist = cc::xi_histogram(data.dataset, o.bins);
    OutputDir out(o.out);
    out.emit("hist.csv", [&](std::ostream& s) { cc::write_histogram_csv(s, hist); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });
    json cfg = input_config_json(o.in);
    cfg["bins"] = o.bins;
    out.emit_manifest(json{{"command", "xi-hist"},
                           {"config", cfg},
                           {"markers", markers_json(hist)},
                           {"counts",
                            {{"experiments", data.dataset.experiments.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct BiasHistOpts {
    InputOpts in;
    std::size_t bins = 20;
    std::string null_deltas;
    std::string out = ".";
};

std::map<std::string, double> parse_null_deltas(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw cc::SchemaError("null-delta file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "experiment_id,delta")
        throw cc::SchemaError("null-delta file must start with \"experiment_id,delta\"");
    std::map<std::string, double> deltas;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw cc::RowError(lineno, "expected 2 fields");
        deltas[line.substr(0, comma)] = cc::parse_double(line.substr(comma + 1), lineno);
    }
    return deltas;
}

void run_bias_hist(const BiasHistOpts& o) {
    const auto data = load_inputs(o.in);
    std::map<std::string, double> deltas;
    if (!o.null_deltas.empty()) deltas = parse_null_deltas(o.null_deltas);
    const auto result =
        cc::bias_histogram(data.dataset, o.bins, o.null_deltas.empty() ? nullptr : &deltas);

    OutputDir out(o.out);
    out.emit("pvalues.csv",
             [&](std::ostream& s) { cc::write_bias_pvalues_csv(s, result.pvalues); });
    out.emit("hist.csv", [&](std::ostream& s) { cc::write_histogram_csv(s, result.hist); });
    out.emit("skipped.csv",
             [&](std::ostream& s) { cc::write_drops_csv(s, result.skipped); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });
    json cfg = input_config_json(o.in);
    cfg["bins"] = o.bins;
    if (!o.null_deltas.empty()) cfg["null_deltas"] = o.null_deltas;
    out.emit_manifest(json{{"command", "bias-hist"},
                           {"config", cfg},
                           {"markers", markers_json(result.hist)},
                           {"counts",
                            {{"experiments", data.dataset.experiments.size()},
                             {"tested", result.pvalues.size()},
                             {"skipped_zero_diversity", result.skipped.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct EstHistOpts {
    InputOpts in;
    std::string experiment;
    std::size_t bins = 20;
    std::string out = ".";
};

void run_est_hist(const EstHistOpts& o) {
    const auto data = load_inputs(o.in);
    std::string id = o.experiment;
    if (id.empty()) {
        if (data.dataset.experiments.size() != 1)
            throw cc::DataError("--experiment is required when the dataset has more than "
                                "one experiment");
        id = data.dataset.experiments.front().id;
    }
    const auto hist = cc::estimates_histogram(data.dataset, id, o.bins);
    OutputDir out(o.out);
    out.emit("hist.csv", [&](std::ostream& s) { cc::write_histogram_csv(s, hist); });
    out.emit("drops.csv", [&](std::ostream& s) { cc::write_drops_csv(s, data.dropped); });
    json cfg = input_config_json(o.in);
    cfg["experiment"] = id;
    cfg["bins"] = o.bins;
    out.emit_manifest(json{{"command", "est-hist"},
                           {"config", cfg},
                           {"markers", markers_json(hist)},
                           {"counts",
                            {{"experiments", data.dataset.experiments.size()},
                             {"dropped", data.dropped.size()},
                             {"skipped_missing_rows", data.skipped_missing}}}});
}

struct SimUnbiasedOpts {
    std::string input;
    std::string truths;
    std::string sentinel = "#N/A";
    double truth = 100.0;
    double delta = 25.0;
    std::size_t n = 0;
    std::size_t n_min = 9;
    std::size_t n_max = 87;
    std::size_t panels = 0;
    std::uint64_t seed = 0;
    std::string out = ".";
};

void run_simulate_unbiased(const SimUnbiasedOpts& o) {
    cc::ReplicationResult result;
    json cfg;
    if (!o.input.empty()) {
        if (o.truths.empty())
            throw CLI::ValidationError("--input also needs --truths");
        InputOpts in;
        in.forecasts = o.input;
        in.truths = o.truths;
        in.sentinel = o.sentinel;
        const auto data = load_inputs(in);
        result = cc::replicate_dataset_unbiased(data.dataset, o.seed);
        cfg["mode"] = "replicate";
        cfg["input"] = o.input;
        cfg["truths"] = o.truths;
    } else {
        if (o.panels == 0)
            throw CLI::ValidationError("synthetic mode needs --panels (or use --input)");
        cc::UnbiasedEnsembleConfig config;
        config.truth = o.truth;
        config.delta = o.delta;
        if (o.n > 0) {
            config.n_min = o.n;
            config.n_max = o.n;
        } else {
            config.n_min = o.n_min;
            config.n_max = o.n_max;
        }
        result = cc::unbiased_ensemble(config, o.panels, o.seed);
        cfg["mode"] = "synthetic";
        cfg["truth"] = config.truth;
        cfg["delta"] = config.delta;
        cfg["n_min"] = config.n_min;
        cfg["n_max"] = config.n_max;
        cfg["panels"] = o.panels;
    }

    OutputDir out(o.out);
    out.emit("dataset.csv",
             [&](std::ostream& s) { cc::write_dataset_csv(s, result.dataset); });
    out.emit("truths.csv",
             [&](std::ostream& s) { cc::write_dataset_truths_csv(s, result.dataset); });
    out.emit("nulldeltas.csv", [&](std::ostream& s) {
        s << "experiment_id,delta\n";
        for (const auto& [id, delta] : result.generator_deltas)
            s << id << ',' << cc::to_sig15(delta) << '\n';
    });
    out.emit("skipped.csv",
             [&](std::ostream& s) { cc::write_drops_csv(s, result.skipped); });
    out.emit_manifest(json{{"command", "simulate-unbiased"},
                           {"config", cfg},
                           {"seed", o.seed},
                           {"counts",
                            {{"experiments", result.dataset.experiments.size()},
                             {"skipped_zero_diversity", result.skipped.size()}}}});
}

struct SimQuincunxOpts {
    cc::QuincunxEnsembleConfig config;
    std::size_t experiments = 500;
    std::size_t n_per = 40;
    std::uint64_t seed = 0;
    std::string out = ".";
};

void run_simulate_quincunx(const SimQuincunxOpts& o) {
    const auto dataset =
        cc::quincunx_ensemble(o.config, o.experiments, o.n_per, o.seed);
    OutputDir out(o.out);
    out.emit("dataset.csv", [&](std::ostream& s) { cc::write_dataset_csv(s, dataset); });
    out.emit("truths.csv",
             [&](std::ostream& s) { cc::write_dataset_truths_csv(s, dataset); });
    out.emit_manifest(json{{"command", "simulate-quincunx"},
                           {"config",
                            {{"g_hat", o.config.g_hat},
                             {"cues", o.config.n_cues},
                             {"cue_min", o.config.cue_min},
                             {"cue_max", o.config.cue_max},
                             {"p_cue", o.config.p_cue},
                             {"zero_sum_cues", o.config.zero_sum_cues},
                             {"experiments", o.experiments},
                             {"n_per", o.n_per}}},
                           {"seed", o.seed},
                           {"counts", {{"experiments", dataset.experiments.size()}}}});
}

void add_out_option(CLI::App* sub, std::string& out) {
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--config")
        ->description("key=value file of long-option defaults; explicit flags override it");
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

// CLI11 only reads config files for the app it parses directly, not for
// subcommands, so --config is spliced into the argument list up front. Keys
// are long option names without the dashes; values given explicitly on the
// command line win because their keys are never injected.
std::vector<std::string> expand_config_args(const CLI::App& app,
                                            std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(std::string("--config=").size());
    }
    if (path.empty() || args.empty() || args.front().empty() ||
        args.front().front() == '-')
        return args;
    const CLI::App* sub = app.get_subcommand_no_throw(args.front());
    if (sub == nullptr) return args;

    std::ifstream file(path);
    if (!file) throw CLI::FileError::Missing(path);

    const auto given = [&args](const std::string& name) {
        return std::any_of(args.begin(), args.end(), [&name](const std::string& arg) {
            return arg == name || arg.rfind(name + "=", 0) == 0;
        });
    };

    std::vector<std::string> inject;
    std::string line;
    while (std::getline(file, line)) {
        const auto text = trimmed(line);
        if (text.empty() || text.front() == '#' || text.front() == ';') continue;
        const auto eq = text.find('=');
        const auto key = eq == std::string::npos ? "" : trimmed(text.substr(0, eq));
        if (key.empty())
            throw CLI::ConfigError(path + ": expected key=value, got \"" + text + "\"");
        if (key == "config") continue;
        const auto value = trimmed(text.substr(eq + 1));
        const std::string name = "--" + key;
        const CLI::Option* op = sub->get_option_no_throw(name);
        if (op == nullptr)
            throw CLI::ConfigError(path + ": " + sub->get_name() +
                                   " has no option " + name);
        if (given(name)) continue;
        if (op->get_expected_min() == 0) {
            if (value == "true" || value == "1")
                inject.push_back(name);
            else if (value != "false" && value != "0")
                throw CLI::ConfigError(path + ": flag " + name +
                                       " takes true or false");
            continue;
        }
        inject.push_back(name);
        inject.push_back(value);
    }
    args.insert(args.begin() + 1, inject.begin(), inject.end());
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wisdom-of-crowds diagnostics for forecast panels"};
    app.require_subcommand(1);

    auto ingest = std::make_shared<IngestOpts>();
    {
        auto* sub = app.add_subcommand("ingest",
                                       "normalize forecasts and truths into a dataset");
        add_input_options(sub, ingest->in, false);
        add_out_option(sub, ingest->out);
        sub->callback([ingest] { run_ingest(*ingest); });
    }

    auto summarize = std::make_shared<SummarizeOpts>();
    {
        auto* sub =
            app.add_subcommand("summarize", "per-experiment crowd statistics table");
        add_input_options(sub, summarize->in);
        add_out_option(sub, summarize->out);
        sub->callback([summarize] { run_summarize(*summarize); });
    }

    auto scatter = std::make_shared<ScatterOpts>();
    {
        auto* sub = app.add_subcommand(
            "scatter", "pair two summary statistics across experiments and correlate");
        add_input_options(sub, scatter->in);
        sub->add_option("--x", scatter->x, "x-axis field")->required();
        sub->add_option("--y", scatter->y, "y-axis field")->required();
        sub->add_option("--stat", scatter->stat, "spearman or pearson")
            ->capture_default_str();
        sub->add_option("--n-perm", scatter->n_perm, "permutations for the p-value")
            ->check(CLI::Range(std::uint64_t(1000), std::uint64_t(100000000)))
            ->capture_default_str();
        sub->add_option("--seed", scatter->seed, "permutation stream seed")
            ->capture_default_str();
        add_out_option(sub, scatter->out);
        sub->callback([scatter] { run_scatter(*scatter); });
    }

    auto xi = std::make_shared<HistOpts>();
    {
        auto* sub =
            app.add_subcommand("xi-hist", "histogram of the beat-the-crowd fraction");
        add_input_options(sub, xi->in);
        sub->add_option("--bins", xi->bins, "bin count when panel sizes vary")
            ->check(CLI::Range(2, 100000))
            ->capture_default_str();
        add_out_option(sub, xi->out);
        sub->callback([xi] { run_xi_hist(*xi); });
    }

    auto bias = std::make_shared<BiasHistOpts>();
    {
        auto* sub = app.add_subcommand("bias-hist",
                                       "per-experiment crowd-bias p-values and histogram");
        add_input_options(sub, bias->in);
        sub->add_option("--bins", bias->bins, "bin count")
            ->check(CLI::Range(2, 100000))
            ->capture_default_str();
        sub->add_option("--null-deltas", bias->null_deltas,
                        "CSV experiment_id,delta giving the null variance per experiment");
        add_out_option(sub, bias->out);
        sub->callback([bias] { run_bias_hist(*bias); });
    }

    auto est = std::make_shared<EstHistOpts>();
    {
        auto* sub = app.add_subcommand(
            "est-hist", "histogram of relative estimates for one experiment");
        add_input_options(sub, est->in);
        sub->add_option("--experiment", est->experiment, "experiment id");
        sub->add_option("--bins", est->bins, "bin count")
            ->check(CLI::Range(2, 100000))
            ->capture_default_str();
        add_out_option(sub, est->out);
        sub->callback([est] { run_est_hist(*est); });
    }

    auto simu = std::make_shared<SimUnbiasedOpts>();
    {
        auto* sub = app.add_subcommand(
            "simulate-unbiased",
            "draw panels from the unbiased null, fresh or replicating a dataset");
        sub->add_option("--input", simu->input, "dataset to replicate (forecast CSV)");
        sub->add_option("--truths", simu->truths, "realized values for --input");
        sub->add_option("--missing-sentinel", simu->sentinel,
                        "estimate value treated as missing");
        sub->add_option("--truth", simu->truth, "realized value (synthetic mode)")
            ->capture_default_str();
        sub->add_option("--delta", simu->delta, "estimate variance (synthetic mode)")
            ->capture_default_str();
        sub->add_option("--n", simu->n, "fixed panel size (synthetic mode)");
        sub->add_option("--n-min", simu->n_min, "smallest panel size")
            ->capture_default_str();
        sub->add_option("--n-max", simu->n_max, "largest panel size")
            ->capture_default_str();
        sub->add_option("--panels", simu->panels, "number of panels (synthetic mode)");
        sub->add_option("--seed", simu->seed, "master seed")->capture_default_str();
        add_out_option(sub, simu->out);
        sub->callback([simu] { run_simulate_unbiased(*simu); });
    }

    auto simq = std::make_shared<SimQuincunxOpts>();
    {
        auto* sub = app.add_subcommand("simulate-quincunx",
                                       "draw an ensemble of quincunx experiments");
        sub->add_option("--g-hat", simq->config.g_hat, "anchor value")
            ->capture_default_str();
        sub->add_option("--cues", simq->config.n_cues, "cues per experiment")
            ->capture_default_str();
        sub->add_option("--cue-min", simq->config.cue_min, "smallest cue magnitude")
            ->capture_default_str();
        sub->add_option("--cue-max", simq->config.cue_max, "largest cue magnitude")
            ->capture_default_str();
        sub->add_option("--p-cue", simq->config.p_cue,
                        "probability a cue is read with the correct sign")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        sub->add_flag("--zero-sum-cues", simq->config.zero_sum_cues,
                      "recenter cues so the truth equals the anchor");
        sub->add_option("--experiments", simq->experiments, "ensemble size")
            ->capture_default_str();
        sub->add_option("--n-per", simq->n_per, "panel size per experiment")
            ->capture_default_str();
        sub->add_option("--seed", simq->seed, "master seed")->capture_default_str();
        add_out_option(sub, simq->out);
        sub->callback([simq] { run_simulate_quincunx(*simq); });
    }

    try {
        app.name(argv[0]);
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config_args(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const cc::Error& e) {
        std::cerr << json{{"error", "data"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }
    return 0;
}

// Command-line front end: generate -> label -> features -> train ->
// predict -> solve -> benchmark -> compare, plus small stats utilities.
// Exit codes: 0 success, 1 usage, 2 data error, 3 partial benchmark failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlaco/aco.hpp"
#include "mlaco/classifier.hpp"
#include "mlaco/error.hpp"
#include "mlaco/exact.hpp"
#include "mlaco/features.hpp"
#include "mlaco/instance.hpp"
#include "mlaco/parallel.hpp"
#include "mlaco/rng.hpp"
#include "mlaco/sampler.hpp"
#include "mlaco/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlaco;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- small shared helpers ----------------------------------------------------

InstanceFormat format_from_flag(const std::string& flag, const std::string& path) {
    if (flag == "json") return InstanceFormat::Json;
    if (flag == "oplib") return InstanceFormat::Oplib;
    if (flag == "chao") return InstanceFormat::Chao;
    if (flag != "auto") {
        throw InvalidArgumentError("unknown format '" + flag +
                                   "' (supported: auto, json, oplib, chao)");
    }
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".json") return InstanceFormat::Json;
    if (ext == ".oplib" || ext == ".op" || ext == ".tsp") return InstanceFormat::Oplib;
    return InstanceFormat::Chao;
}

Instance load_instance(const std::string& path, const std::string& format_flag) {
    return parse_instance(path, format_from_flag(format_flag, path));
}

bool wildcard_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t] || pattern[p] == '?')) {
            ++p, ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<std::string> glob_files(const std::string& pattern) {
    const fs::path full(pattern);
    const fs::path dir = full.parent_path().empty() ? fs::path(".") : full.parent_path();
    const std::string name_pattern = full.filename().string();
    std::vector<std::string> matches;
    if (!fs::is_directory(dir)) return matches;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (wildcard_match(name_pattern, entry.path().filename().string())) {
            matches.push_back(entry.path().string());
        }
    }
    std::sort(matches.begin(), matches.end());
    return matches;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ParseError(tmp + ": cannot open for writing");
        out << content;
    }
    fs::rename(tmp, path);
}

// --- config (de)serialization -------------------------------------------------

json config_to_json(const AcoConfig& config, const std::string& name) {
    json j;
    j["name"] = name;
    j["variant"] = to_string(config.variant);
    j["integration"] = to_string(config.integration);
    j["alpha"] = config.alpha;
    j["beta"] = config.beta;
    j["rho"] = config.rho;
    j["delta"] = config.delta;
    j["t_pts"] = config.t_pts;
    j["c_scale"] = config.c_scale;
    j["ants"] = config.ants;
    j["constructions"] = config.budget;
    j["update_rule"] = config.update_rule == UpdateRule::IterationBest ? "iteration-best"
                                                                       : "global-best";
    j["termination"] =
        config.termination == Termination::ConstructionBudget ? "construction-budget" : "no-improve";
    j["t_ter"] = config.t_ter;
    j["local_search"] = config.local_search;
    j["deposit"] = config.deposit == DepositRule::Paper ? "paper" : "proportional";
    j["eta_floor"] = config.eta_floor;
    return j;
}

AcoConfig config_from_json(const json& j, std::string& name) {
    AcoConfig config;
    if (j.value("preset", "") == "sota") config = sota_preset();
    name = j.value("name", std::string("config"));
    if (j.contains("variant")) config.variant = variant_from_string(j.at("variant"));
    if (j.contains("integration")) config.integration = integration_from_string(j.at("integration"));
    config.alpha = j.value("alpha", config.alpha);
    config.beta = j.value("beta", config.beta);
    config.rho = j.value("rho", config.rho);
    config.delta = j.value("delta", config.delta);
    config.t_pts = j.value("t_pts", config.t_pts);
    config.c_scale = j.value("c_scale", config.c_scale);
    config.ants = j.value("ants", config.ants);
    config.budget = j.value("constructions", config.budget);
    if (j.contains("update_rule")) {
        const std::string rule = j.at("update_rule");
        if (rule == "iteration-best") {
            config.update_rule = UpdateRule::IterationBest;
        } else if (rule == "global-best") {
            config.update_rule = UpdateRule::GlobalBest;
        } else {
            throw ParseError("unknown update_rule '" + rule + "'");
        }
    }
    if (j.contains("termination")) {
        const std::string rule = j.at("termination");
        if (rule == "construction-budget") {
            config.termination = Termination::ConstructionBudget;
        } else if (rule == "no-improve") {
            config.termination = Termination::NoImprove;
        } else {
            throw ParseError("unknown termination '" + rule + "'");
        }
    }
    config.t_ter = j.value("t_ter", config.t_ter);
    config.local_search = j.value("local_search", config.local_search);
    if (j.contains("deposit")) {
        const std::string rule = j.at("deposit");
        if (rule == "paper") {
            config.deposit = DepositRule::Paper;
        } else if (rule == "proportional") {
            config.deposit = DepositRule::Proportional;
        } else {
            throw ParseError("unknown deposit rule '" + rule + "'");
        }
    }
    config.eta_floor = j.value("eta_floor", config.eta_floor);
    validate(config);
    return config;
}

// --- instance set resolution ---------------------------------------------------

struct InstanceSet {
    std::vector<Instance> instances;
    std::vector<std::string> paths;  // empty entries for unwritten instances
};

InstanceSet resolve_instances(const json& spec, const fs::path& write_dir) {
    InstanceSet set;
    if (spec.contains("glob")) {
        const auto files = glob_files(spec.at("glob").get<std::string>());
        if (files.empty()) {
            throw InvalidArgumentError("instance glob '" + spec.at("glob").get<std::string>() +
                                       "' matched no files");
        }
        const std::string format = spec.value("format", "auto");
        for (const auto& file : files) {
            set.instances.push_back(load_instance(file, format));
            set.paths.push_back(file);
        }
        return set;
    }
    if (spec.contains("generate")) {
        const auto& g = spec.at("generate");
        GenerateParams params;
        params.n = g.value("n", 50);
        const int count = g.value("count", 1);
        const std::uint64_t seed = g.value("seed", 0);
        if (g.contains("budget")) {
            params.budget_lo = g.at("budget").at(0).get<double>();
            params.budget_hi = g.at("budget").at(1).get<double>();
        }
        fs::create_directories(write_dir);
        for (int k = 0; k < count; ++k) {
            params.seed = stream_seed(seed, static_cast<std::uint64_t>(k));
            Instance inst = generate_random(params);
            inst.name += "-i" + std::to_string(k);
            const fs::path path = write_dir / (inst.name + ".json");
            write_json(inst, path.string());
            set.instances.push_back(std::move(inst));
            set.paths.push_back(path.string());
        }
        return set;
    }
    throw InvalidArgumentError("instance spec needs either 'glob' or 'generate'");
}

// --- subcommand: generate ------------------------------------------------------

int cmd_generate(Index n, int count, std::uint64_t seed, const std::string& budget,
                 const std::string& out_dir) {
    GenerateParams params;
    params.n = n;
    const auto colon = budget.find(':');
    if (colon == std::string::npos) {
        throw InvalidArgumentError("budget must be 'lo:hi', got '" + budget + "'");
    }
    params.budget_lo = std::stod(budget.substr(0, colon));
    params.budget_hi = std::stod(budget.substr(colon + 1));

    fs::create_directories(out_dir);
    std::vector<std::string> files;
    for (int k = 0; k < count; ++k) {
        params.seed = stream_seed(seed, static_cast<std::uint64_t>(k));
        Instance inst = generate_random(params);
        inst.name += "-i" + std::to_string(k);
        const fs::path path = fs::path(out_dir) / (inst.name + ".json");
        write_json(inst, path.string());
        files.push_back(path.string());
    }
    json stub;
    stub["instances"] = {{"glob", (fs::path(out_dir) / "*.json").string()}};
    stub["seeds"] = {1, 2, 3, 4, 5};
    stub["runs_per_config"] = 5;
    std::cout << "wrote " << files.size() << " instances under " << out_dir << "\n"
              << "manifest stub:\n"
              << stub.dump(2) << "\n";
    return 0;
}

// --- subcommand: label -----------------------------------------------------------

int cmd_label(const std::vector<std::string>& patterns, const std::string& format,
              double time_limit, int sample_m, std::uint64_t seed, const std::string& out_dir) {
    std::vector<std::string> files;
    for (const auto& pattern : patterns) {
        if (fs::is_regular_file(pattern)) {
            files.push_back(pattern);
        } else {
            const auto matched = glob_files(pattern);
            files.insert(files.end(), matched.begin(), matched.end());
        }
    }
    if (files.empty()) throw InvalidArgumentError("label: no instance files matched");

    std::vector<Instance> instances;
    for (const auto& file : files) instances.push_back(load_instance(file, format));

    const TrainingSet training = build_training_set(instances, time_limit, sample_m, seed);

    fs::create_directories(out_dir);
    int solved = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const ExactResult& result = training.results[i];
        json j;
        j["instance"] = instances[i].name;
        j["objective"] = result.objective;
        j["proved"] = result.proved_optimal;
        j["nodes_explored"] = result.nodes_explored;
        j["wall_time"] = result.wall_time;
        std::vector<Index> route_1based;
        for (const Index v : result.route.vertices) route_1based.push_back(v + 1);
        j["optimal_route"] = route_1based;
        atomic_write((fs::path(out_dir) / (instances[i].name + ".label.json")).string(),
                     j.dump(2) + "\n");
        solved += result.proved_optimal ? 1 : 0;
    }

    // Concatenated labeled rows for the trainer.
    std::ostringstream csv;
    csv << "i,j,f1,f2,f3,f4,f5,label\n";
    csv.precision(std::numeric_limits<double>::max_digits10);
    for (Index r = 0; r < training.x.rows(); ++r) {
        csv << "0,0";  // vertex ids are per-instance; rows are training points
        for (int k = 0; k < kFeatureCount; ++k) csv << ',' << training.x(r, k);
        csv << ',' << training.label(r) << '\n';
    }
    atomic_write((fs::path(out_dir) / "training.csv").string(), csv.str());
    std::cout << "solved " << solved << "/" << instances.size() << " instances; " << training.x.rows()
              << " labeled rows -> " << (fs::path(out_dir) / "training.csv").string() << "\n";
    return 0;
}

// --- subcommand: features ---------------------------------------------------------

int cmd_features(const std::string& instance_path, const std::string& format, int sample_m,
                 std::uint64_t seed, const std::string& out_path, const std::string& label_path,
                 const std::string& dump_samples) {
    const Instance inst = load_instance(instance_path, format);
    const int m = sample_m > 0 ? sample_m : static_cast<int>(100 * inst.n);
    const SampleSet samples = sample(inst, m, seed);
    if (!dump_samples.empty()) dump_samples_jsonl(samples, dump_samples);

    std::optional<Route> optimal;
    if (!label_path.empty()) {
        std::ifstream in(label_path);
        if (!in) throw ParseError(label_path + ": cannot open");
        json j;
        in >> j;
        std::vector<Index> vertices;
        for (const auto& v : j.at("optimal_route")) vertices.push_back(v.get<Index>() - 1);
        optimal = make_route(inst, vertices);
    }
    const EdgeFeatures features = assemble(inst, samples, optimal);
    write_feature_csv(features, out_path);
    std::cout << "wrote " << features.edge_count() << " feature rows -> " << out_path << "\n";
    return 0;
}

// --- subcommand: train --------------------------------------------------------------

int cmd_train(const std::string& manifest_path, const std::string& data_path,
              const std::string& kind_flag, int epochs, std::uint64_t seed,
              const std::string& out_path) {
    const ModelKind kind = model_kind_from_string(kind_flag);
    TrainOptions options;
    options.epochs = epochs;
    options.seed = seed;

    Matrix x;
    IntVector labels;
    if (!data_path.empty()) {
        const FeatureRows rows = read_feature_csv(data_path);
        if (rows.label.size() == 0) {
            throw InvalidArgumentError(data_path + ": training data has no label column");
        }
        x = rows.x;
        labels = rows.label;
    } else if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in) throw ParseError(manifest_path + ": cannot open");
        json manifest;
        in >> manifest;
        const auto label_started = Clock::now();
        InstanceSet set = resolve_instances(manifest.at("instances"),
                                            fs::path(out_path).parent_path() / "train_instances");
        const TrainingSet training =
            build_training_set(set.instances, manifest.value("time_limit", 60.0),
                               manifest.value("sample_m", 0), manifest.value("seed", seed));
        std::cout << "labeling stage: " << seconds_since(label_started) << " s ("
                  << training.x.rows() << " rows)\n";
        x = training.x;
        labels = training.label;
    } else {
        throw InvalidArgumentError("train: need --data or --manifest");
    }

    const auto train_started = Clock::now();
    const LinearModel model = train(x, labels, kind, options);
    std::cout << "training stage: " << seconds_since(train_started) << " s (loss "
              << model.meta.final_loss << ")\n";

    const Metrics metrics = evaluate(model, x, labels);
    std::cout << "training accuracy " << metrics.accuracy << ", balanced "
              << metrics.balanced_accuracy << ", positive recall " << metrics.positive_recall
              << "\n";
    atomic_write(out_path, to_json_string(model));
    std::cout << "model -> " << out_path << "\n";
    return 0;
}

// --- subcommand: predict ---------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& instance_path,
                const std::string& format, int sample_m, std::uint64_t seed,
                const std::string& out_path) {
    const LinearModel model = load_model(model_path);
    const Instance inst = load_instance(instance_path, format);
    const int m = sample_m > 0 ? sample_m : static_cast<int>(100 * inst.n);
    const auto started = Clock::now();
    const SampleSet samples = sample(inst, m, seed);
    const EdgeFeatures features = assemble(inst, samples);
    const Prediction prediction = predict(model, features);
    std::cout << "prediction time " << seconds_since(started) << " s\n";

    std::ofstream out(out_path);
    if (!out) throw ParseError(out_path + ": cannot open for writing");
    out << "i,j,p\n";
    out.precision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < inst.n; ++i) {
        for (Index j = 0; j < inst.n; ++j) {
            if (i != j) out << i + 1 << ',' << j + 1 << ',' << prediction.p(i, j) << '\n';
        }
    }
    std::cout << "wrote " << inst.n * (inst.n - 1) << " probabilities -> " << out_path << "\n";
    return 0;
}

// --- subcommand: solve ------------------------------------------------------------------

int cmd_solve(const std::string& instance_path, const std::string& format,
              const std::string& model_path, const AcoConfig& base_config, int sample_m,
              std::uint64_t sample_seed, bool exact, double time_limit,
              const std::string& trace_path) {
    const Instance inst = load_instance(instance_path, format);

    if (exact) {
        const ExactResult result = solve_bnb(inst, time_limit);
        std::cout << "objective " << result.objective << (result.proved_optimal ? " (proved)" : " (time limit)")
                  << " nodes " << result.nodes_explored << " time " << result.wall_time << " s\n";
        std::cout << "route:";
        for (const Index v : result.route.vertices) std::cout << ' ' << v + 1;
        std::cout << "\n";
        return 0;
    }

    AcoConfig config = base_config;
    std::optional<Prediction> prediction;
    if (config.integration != Integration::None) {
        if (model_path.empty()) {
            throw InvalidArgumentError("solve: integration mode requires --model");
        }
        const LinearModel model = load_model(model_path);
        const int m = sample_m > 0 ? sample_m : static_cast<int>(100 * inst.n);
        prediction = predict(model, assemble(inst, sample(inst, m, sample_seed)));
    }

    const RunTrace trace = run(inst, config, prediction ? &*prediction : nullptr);
    std::cout << "best objective " << trace.best_route.objective << " cost "
              << trace.best_route.cost << "/" << inst.t_max << " constructions "
              << trace.checkpoints.back().constructions << " time " << trace.wall_time << " s\n";
    std::cout << "route:";
    for (const Index v : trace.best_route.vertices) std::cout << ' ' << v + 1;
    std::cout << "\n";
    if (!trace_path.empty()) write_trace_csv(trace, trace_path);
    return 0;
}

// --- subcommand: benchmark ---------------------------------------------------------------

struct Cell {
    std::size_t config_idx;
    std::size_t instance_idx;
    std::uint64_t seed;
};

int cmd_benchmark(const std::string& manifest_path, const std::string& out_override,
                  bool paper_scale) {
    std::ifstream in(manifest_path);
    if (!in) throw ParseError(manifest_path + ": cannot open");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ParseError(manifest_path + ": " + e.what());
    }

    const fs::path out_dir =
        out_override.empty() ? fs::path(manifest.value("output", "bench_out")) : fs::path(out_override);
    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "traces");
    fs::create_directories(out_dir / "curves");

    InstanceSet set = resolve_instances(manifest.at("instances"), out_dir / "instances");

    int runs = manifest.value("runs_per_config", 5);
    std::vector<std::uint64_t> seeds;
    if (manifest.contains("seeds")) {
        for (const auto& s : manifest.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
    }
    if (paper_scale) runs = 25;
    while (static_cast<int>(seeds.size()) < runs) {
        seeds.push_back(seeds.size() + 1);
    }
    if (static_cast<int>(seeds.size()) < runs) {
        throw InvalidArgumentError("manifest: seed list shorter than runs_per_config");
    }

    long constructions = manifest.value("constructions", 0L);

    std::vector<AcoConfig> configs;
    std::vector<std::string> config_names;
    for (const auto& cj : manifest.at("configs")) {
        std::string name;
        AcoConfig config = config_from_json(cj, name);
        config.threads = 1;  // cells run in parallel instead
        configs.push_back(config);
        config_names.push_back(name);
    }
    if (configs.empty()) throw InvalidArgumentError("manifest: no configs");

    const std::string baseline_name = manifest.value("baseline", config_names.front());
    const auto baseline_it = std::find(config_names.begin(), config_names.end(), baseline_name);
    if (baseline_it == config_names.end()) {
        throw InvalidArgumentError("manifest: baseline '" + baseline_name + "' not in configs");
    }
    const std::size_t baseline_idx =
        static_cast<std::size_t>(baseline_it - config_names.begin());

    // One prediction per instance, shared by every ML config and run.
    const bool needs_model = std::any_of(configs.begin(), configs.end(), [](const AcoConfig& c) {
        return c.integration != Integration::None;
    });
    std::vector<Prediction> predictions;
    if (needs_model) {
        if (!manifest.contains("model")) {
            throw InvalidArgumentError("manifest: ML configs need a 'model' path");
        }
        const LinearModel model = load_model(manifest.at("model").get<std::string>());
        const int sample_m = manifest.value("sample_m", 0);
        const std::uint64_t sample_seed = manifest.value("sample_seed", 0);
        predictions.resize(set.instances.size());
        parallel_for(0, static_cast<long>(set.instances.size()), worker_count(), [&](long i) {
            const Instance& inst = set.instances[static_cast<std::size_t>(i)];
            const int m = sample_m > 0 ? sample_m : static_cast<int>(100 * inst.n);
            predictions[static_cast<std::size_t>(i)] = predict(
                model, assemble(inst, sample(inst, m, stream_seed(sample_seed,
                                                                  static_cast<std::uint64_t>(i)))));
        });
    }

    std::vector<Cell> cells;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        for (std::size_t i = 0; i < set.instances.size(); ++i) {
            for (int r = 0; r < runs; ++r) {
                cells.push_back({c, i, seeds[static_cast<std::size_t>(r)]});
            }
        }
    }

    struct CellResult {
        bool ok = false;
        std::string error;
        double best = 0;
        long constructions = 0;
        double wall_time = 0;
        RunTrace trace;
    };
    std::vector<CellResult> results(cells.size());
    std::mutex log_mutex;

    parallel_for(0, static_cast<long>(cells.size()), worker_count(), [&](long idx) {
        const Cell& cell = cells[static_cast<std::size_t>(idx)];
        CellResult& result = results[static_cast<std::size_t>(idx)];
        try {
            const Instance& inst = set.instances[cell.instance_idx];
            AcoConfig config = configs[cell.config_idx];
            config.seed = cell.seed;
            if (paper_scale) {
                config.budget = 10000 * inst.n;
            } else if (constructions > 0) {
                config.budget = constructions;
            }
            const Prediction* prediction = config.integration != Integration::None
                                               ? &predictions[cell.instance_idx]
                                               : nullptr;
            result.trace = run(inst, config, prediction);
            result.best = result.trace.best_route.objective;
            result.constructions = result.trace.checkpoints.back().constructions;
            result.wall_time = result.trace.wall_time;
            result.ok = true;
        } catch (const std::exception& e) {
            result.error = e.what();
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "cell failed (" << config_names[cell.config_idx] << ", instance "
                      << cell.instance_idx << ", seed " << cell.seed << "): " << e.what() << "\n";
        }
    });

    // Per-run traces and the flat summary.
    std::ostringstream summary;
    summary << "config,instance,seed,best,constructions,wall_time,config_hash,trace\n";
    std::vector<std::string> config_hashes;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        config_hashes.push_back(hex64(fnv1a(config_to_json(configs[c], config_names[c]).dump())));
        fs::create_directories(out_dir / "traces" / config_names[c]);
    }
    bool any_failed = false;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const Cell& cell = cells[idx];
        const CellResult& result = results[idx];
        if (!result.ok) {
            any_failed = true;
            continue;
        }
        const std::string trace_rel = (fs::path("traces") / config_names[cell.config_idx] /
                                       (set.instances[cell.instance_idx].name + "_s" +
                                        std::to_string(cell.seed) + ".csv"))
                                          .string();
        write_trace_csv(result.trace, (out_dir / trace_rel).string());
        summary << config_names[cell.config_idx] << ',' << set.instances[cell.instance_idx].name
                << ',' << cell.seed << ',' << result.best << ',' << result.constructions << ','
                << result.wall_time << ',' << config_hashes[cell.config_idx] << ',' << trace_rel
                << "\n";
    }
    atomic_write((out_dir / "summary.csv").string(), summary.str());

    // Wilcoxon against the baseline, paired over (instance, seed) cells.
    auto cell_key = [&](const Cell& cell) {
        return std::to_string(cell.instance_idx) + ":" + std::to_string(cell.seed);
    };
    std::map<std::string, double> baseline_best;
    std::vector<RunTrace> baseline_traces;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (cells[idx].config_idx == baseline_idx && results[idx].ok) {
            baseline_best[cell_key(cells[idx])] = results[idx].best;
            baseline_traces.push_back(results[idx].trace);
        }
    }

    std::ostringstream comparison;
    comparison << "config,baseline,mean,std,baseline_mean,baseline_std,p_value,significant\n";
    std::cout << "config          vs " << baseline_name << ": mean  std  p-value  significant\n";
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::vector<double> own, base;
        std::vector<RunTrace> own_traces, base_traces;
        for (std::size_t idx = 0; idx < cells.size(); ++idx) {
            if (cells[idx].config_idx != c || !results[idx].ok) continue;
            const auto found = baseline_best.find(cell_key(cells[idx]));
            if (found == baseline_best.end()) continue;
            own.push_back(results[idx].best);
            base.push_back(found->second);
            own_traces.push_back(results[idx].trace);
        }
        if (own.empty()) continue;
        const Vector own_v = Eigen::Map<const Vector>(own.data(), static_cast<Index>(own.size()));
        const Vector base_v =
            Eigen::Map<const Vector>(base.data(), static_cast<Index>(base.size()));
        const double mean = own_v.mean();
        const double sd = own.size() > 1
                              ? std::sqrt((own_v.array() - mean).square().sum() /
                                          (static_cast<double>(own.size()) - 1))
                              : 0.0;
        const double base_mean = base_v.mean();
        const double base_sd = base.size() > 1
                                   ? std::sqrt((base_v.array() - base_mean).square().sum() /
                                               (static_cast<double>(base.size()) - 1))
                                   : 0.0;
        double p = 1.0;
        bool significant = false;
        if (c != baseline_idx) {
            const PairedComparison comp = wilcoxon_signed_rank(own_v, base_v);
            p = comp.p_value;
            significant = p < 0.05 && mean > base_mean;
        }
        comparison << config_names[c] << ',' << baseline_name << ',' << mean << ',' << sd << ','
                   << base_mean << ',' << base_sd << ',' << p << ',' << (significant ? 1 : 0)
                   << "\n";
        std::cout << config_names[c] << ": " << mean << " " << sd << " " << p << " "
                  << (significant ? "*" : "-") << "\n";

        // Normalized convergence curve against the baseline runs.
        if (own_traces.size() == baseline_traces.size() && !baseline_traces.empty()) {
            const auto curve = normalize_curves(own_traces, baseline_traces);
            std::ofstream curve_out(out_dir / "curves" / (config_names[c] + ".csv"));
            curve_out << "constructions,normalized_best\n";
            for (const auto& point : curve) {
                curve_out << point.constructions << ',' << point.best << "\n";
            }
        }
    }
    atomic_write((out_dir / "comparison.csv").string(), comparison.str());

    // Effective manifest for provenance.
    json effective = manifest;
    effective["resolved_instances"] = set.paths;
    effective["runs_per_config"] = runs;
    effective["seeds"] = seeds;
    effective["configs"] = json::array();
    for (std::size_t c = 0; c < configs.size(); ++c) {
        json cj = config_to_json(configs[c], config_names[c]);
        cj["hash"] = config_hashes[c];
        effective["configs"].push_back(cj);
    }
    if (paper_scale) effective["paper_scale"] = true;
    atomic_write((out_dir / "manifest.effective.json").string(), effective.dump(2) + "\n");

    std::cout << "report -> " << out_dir.string() << "\n";
    return any_failed ? 3 : 0;
}

// --- subcommand: compare / stats -----------------------------------------------------------

struct SummaryRow {
    std::string config, instance;
    std::uint64_t seed;
    double best;
};

std::vector<SummaryRow> read_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<SummaryRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream ss(line);
        SummaryRow row;
        std::string field;
        std::getline(ss, row.config, ',');
        std::getline(ss, row.instance, ',');
        std::getline(ss, field, ',');
        row.seed = std::strtoull(field.c_str(), nullptr, 10);
        std::getline(ss, field, ',');
        row.best = std::strtod(field.c_str(), nullptr);
        rows.push_back(row);
    }
    return rows;
}

int cmd_compare(const std::string& summary_path, const std::string& method,
                const std::string& baseline) {
    const auto rows = read_summary(summary_path);
    std::map<std::string, double> base_values;
    for (const auto& row : rows) {
        if (row.config == baseline) base_values[row.instance + ":" + std::to_string(row.seed)] = row.best;
    }
    std::vector<double> a, b;
    for (const auto& row : rows) {
        if (row.config != method) continue;
        const auto found = base_values.find(row.instance + ":" + std::to_string(row.seed));
        if (found != base_values.end()) {
            a.push_back(row.best);
            b.push_back(found->second);
        }
    }
    if (a.empty()) throw InvalidArgumentError("compare: no paired cells for the given names");
    const Vector av = Eigen::Map<const Vector>(a.data(), static_cast<Index>(a.size()));
    const Vector bv = Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size()));
    const PairedComparison comp = wilcoxon_signed_rank(av, bv);
    std::cout << method << " mean " << av.mean() << " vs " << baseline << " mean " << bv.mean()
              << " over " << a.size() << " pairs\n";
    std::cout << "wilcoxon: W " << comp.w_statistic << " p " << comp.p_value
              << (comp.p_value < 0.05 ? " (significant)" : "") << "\n";
    return 0;
}

Vector read_number_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    if (values.empty()) throw ParseError(path + ": no numbers");
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orienteering solver toolkit: prediction-guided ant colony optimization"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "write random instances as JSON");
    Index gen_n = 50;
    int gen_count = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_budget = "100:400";
    std::string gen_out = "instances";
    generate->add_option("--n", gen_n, "vertex count")->check(CLI::Range(Index{2}, Index{100000}));
    generate->add_option("--count", gen_count, "number of instances")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen_seed, "base seed");
    generate->add_option("--budget", gen_budget, "budget range lo:hi");
    generate->add_option("--out", gen_out, "output directory");

    // label
    auto* label = app.add_subcommand("label", "solve instances exactly and emit labeled features");
    std::vector<std::string> label_patterns;
    std::string label_format = "auto";
    double label_time_limit = 60;
    int label_m = 0;
    std::uint64_t label_seed = 0;
    std::string label_out = "labels";
    label->add_option("instances", label_patterns, "instance files or globs")->required();
    label->add_option("--format", label_format, "instance format (auto|json|oplib|chao)");
    label->add_option("--time-limit", label_time_limit, "seconds per instance");
    label->add_option("--m", label_m, "samples per instance (0: 100n)");
    label->add_option("--seed", label_seed, "sampling seed");
    label->add_option("--out", label_out, "output directory");

    // features
    auto* features = app.add_subcommand("features", "extract per-edge features to CSV");
    std::string feat_instance, feat_format = "auto", feat_out = "features.csv", feat_label,
                feat_dump;
    int feat_m = 0;
    std::uint64_t feat_seed = 0;
    features->add_option("instance", feat_instance, "instance file")->required();
    features->add_option("--format", feat_format, "instance format");
    features->add_option("--m", feat_m, "sample count (0: 100n)");
    features->add_option("--seed", feat_seed, "sampling seed");
    features->add_option("--out", feat_out, "output CSV");
    features->add_option("--optimal", feat_label, "label JSON from the label subcommand");
    features->add_option("--dump-samples", feat_dump, "debug sample dump (JSON lines)");

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a linear model on labeled features");
    std::string train_manifest, train_data, train_kind = "svm", train_out = "model.json";
    int train_epochs = 0;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--manifest", train_manifest, "training manifest JSON");
    train_cmd->add_option("--data", train_data, "labeled feature CSV");
    train_cmd->add_option("--kind", train_kind, "svm or logreg");
    train_cmd->add_option("--epochs", train_epochs, "descent steps (0: kind default)");
    train_cmd->add_option("--seed", train_seed, "seed recorded with the model");
    train_cmd->add_option("--out", train_out, "model output path");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "write per-edge probabilities");
    std::string pred_model, pred_instance, pred_format = "auto", pred_out = "prediction.csv";
    int pred_m = 0;
    std::uint64_t pred_seed = 0;
    predict_cmd->add_option("--model", pred_model, "model JSON")->required();
    predict_cmd->add_option("instance", pred_instance, "instance file")->required();
    predict_cmd->add_option("--format", pred_format, "instance format");
    predict_cmd->add_option("--m", pred_m, "sample count (0: 100n)");
    predict_cmd->add_option("--seed", pred_seed, "sampling seed");
    predict_cmd->add_option("--out", pred_out, "output CSV");

    // solve
    auto* solve = app.add_subcommand("solve", "run the optimizer on one instance");
    std::string solve_instance, solve_format = "auto", solve_model, solve_variant = "mmas",
                solve_integration = "none", solve_trace, solve_preset;
    AcoConfig solve_config;
    int solve_m = 0;
    std::uint64_t solve_sample_seed = 0;
    bool solve_exact = false;
    bool solve_ls = false;
    double solve_time_limit = 600;
    long solve_budget = 0;
    int solve_ants = 0;
    std::uint64_t solve_seed = 0;
    solve->add_option("instance", solve_instance, "instance file")->required();
    solve->add_option("--format", solve_format, "instance format");
    solve->add_option("--model", solve_model, "model JSON for ML integrations");
    solve->add_option("--variant", solve_variant, "as or mmas");
    solve->add_option("--integration", solve_integration, "none|eta|eta_hat|tau_seed");
    solve->add_option("--preset", solve_preset, "named profile (sota)");
    solve->add_option("--alpha", solve_config.alpha, "pheromone exponent");
    solve->add_option("--beta", solve_config.beta, "desirability exponent");
    solve->add_option("--rho", solve_config.rho, "evaporation rate");
    solve->add_option("--ants", solve_ants, "population size (0: variant default)");
    solve->add_option("--constructions", solve_budget, "total constructions (0: 1000n)");
    solve->add_option("--seed", solve_seed, "run seed");
    solve->add_option("--m", solve_m, "feature sample count (0: 100n)");
    solve->add_option("--sample-seed", solve_sample_seed, "feature sampling seed");
    solve->add_flag("--local-search", solve_ls, "2-opt the iteration best");
    solve->add_flag("--exact", solve_exact, "branch and bound instead of ants");
    solve->add_option("--time-limit", solve_time_limit, "exact solve time limit (s)");
    solve->add_option("--trace", solve_trace, "write convergence trace CSV");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "run a manifest of configs x instances x seeds");
    std::string bench_manifest, bench_out;
    bool bench_paper_scale = false;
    benchmark->add_option("manifest", bench_manifest, "benchmark manifest JSON")->required();
    benchmark->add_option("--out", bench_out, "output directory override");
    benchmark->add_flag("--paper-scale", bench_paper_scale,
                        "10000n constructions and 25 runs per config");

    // compare
    auto* compare = app.add_subcommand("compare", "paired test between two configs of a summary");
    std::string cmp_summary, cmp_method, cmp_baseline;
    compare->add_option("summary", cmp_summary, "summary.csv from benchmark")->required();
    compare->add_option("--method", cmp_method, "config name")->required();
    compare->add_option("--baseline", cmp_baseline, "baseline config name")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "small statistics utilities");
    auto* stats_wilcoxon = stats->add_subcommand("wilcoxon", "signed-rank test on two files");
    std::string sw_a, sw_b;
    stats_wilcoxon->add_option("--a", sw_a, "first value file")->required();
    stats_wilcoxon->add_option("--b", sw_b, "second value file")->required();
    auto* stats_gap = stats->add_subcommand("gap", "optimality gap");
    double sg_found = 0, sg_opt = 0;
    stats_gap->add_option("--found", sg_found, "found objective")->required();
    stats_gap->add_option("--opt", sg_opt, "proven optimum")->required();
    stats->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(generate)) {
            return cmd_generate(gen_n, gen_count, gen_seed, gen_budget, gen_out);
        }
        if (app.got_subcommand(label)) {
            return cmd_label(label_patterns, label_format, label_time_limit, label_m, label_seed,
                             label_out);
        }
        if (app.got_subcommand(features)) {
            return cmd_features(feat_instance, feat_format, feat_m, feat_seed, feat_out,
                                feat_label, feat_dump);
        }
        if (app.got_subcommand(train_cmd)) {
            return cmd_train(train_manifest, train_data, train_kind, train_epochs, train_seed,
                             train_out);
        }
        if (app.got_subcommand(predict_cmd)) {
            return cmd_predict(pred_model, pred_instance, pred_format, pred_m, pred_seed,
                               pred_out);
        }
        if (app.got_subcommand(solve)) {
            AcoConfig config = solve_config;
            if (solve_preset == "sota") {
                config = sota_preset();
                if (solve_m == 0) solve_m = 10;  // sample_m scales with n below
            } else if (!solve_preset.empty()) {
                throw InvalidArgumentError("unknown preset '" + solve_preset + "'");
            }
            if (solve->count("--variant") || solve_preset.empty()) {
                config.variant = variant_from_string(solve_variant);
            }
            if (solve->count("--integration") || solve_preset.empty()) {
                config.integration = integration_from_string(solve_integration);
            }
            if (solve->count("--alpha")) config.alpha = solve_config.alpha;
            if (solve->count("--beta")) config.beta = solve_config.beta;
            if (solve->count("--rho")) config.rho = solve_config.rho;
            if (solve->count("--local-search")) config.local_search = solve_ls;
            if (solve_ants > 0) config.ants = solve_ants;
            if (solve_budget > 0) config.budget = solve_budget;
            config.seed = solve_seed;
            int sample_m = solve_m;
            if (solve_preset == "sota" && solve_m == 10) sample_m = -10;  // 10n marker
            return cmd_solve(solve_instance, solve_format, solve_model, config, sample_m,
                             solve_sample_seed, solve_exact, solve_time_limit, solve_trace);
        }
        if (app.got_subcommand(benchmark)) {
            return cmd_benchmark(bench_manifest, bench_out, bench_paper_scale);
        }
        if (app.got_subcommand(compare)) {
            return cmd_compare(cmp_summary, cmp_method, cmp_baseline);
        }
        if (app.got_subcommand(stats)) {
            if (stats->got_subcommand(stats_wilcoxon)) {
                const Vector a = read_number_file(sw_a);
                const Vector b = read_number_file(sw_b);
                const PairedComparison comp = wilcoxon_signed_rank(a, b);
                std::cout << "n_effective " << comp.n_effective << " W " << comp.w_statistic
                          << " p " << comp.p_value << (comp.exact ? " (exact)" : " (normal)")
                          << "\n";
                return 0;
            }
            bool beaten = false;
            const double gap = optimality_gap(sg_found, sg_opt, &beaten);
            std::cout << "gap " << gap << "%" << (beaten ? " (found beats declared optimum)" : "")
                      << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

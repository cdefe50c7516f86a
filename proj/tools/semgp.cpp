// Command-line front end: train/predict/evaluate single schemes, run
// multi-scheme benchmarks, and inspect datasets or saved models.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "semgp/semgp.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SEMGP_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw semgp::Error("SEMGP_SEED is not an integer");
        }
    }
    return 1;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw semgp::Error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

struct CommonTrainFlags {
    std::size_t pop = 500;
    std::size_t early_stop = 500;
    std::size_t models = 5;
    int tournament = 2;
    int novelty_k = 15;
    bool paper_defaults = false;
    bool no_intercept = false;
    bool protected_ops = false;
    CLI::Option* pop_opt = nullptr;
    CLI::Option* early_opt = nullptr;
    CLI::Option* models_opt = nullptr;

    void attach(CLI::App* cmd) {
        pop_opt = cmd->add_option("--pop", pop, "population size (desk-scale default 500)");
        early_opt = cmd->add_option("--early-stop", early_stop, "evaluations without validation improvement before stopping");
        models_opt = cmd->add_option("--models", models, "bagged models per ensemble");
        cmd->add_option("--tournament", tournament, "tournament size");
        cmd->add_option("--novelty-k", novelty_k, "nearest neighbors for novelty scoring");
        cmd->add_flag("--paper-defaults", paper_defaults,
                      "pop 4000, early-stop 4000, 30 models (explicit flags still win)");
        cmd->add_flag("--no-intercept", no_intercept, "fit transform scaling without an intercept");
        cmd->add_flag("--protected", protected_ops, "use |x| under square roots instead of discarding");
    }

    semgp::EvolveConfig config(const std::string& scheme_text) const {
        semgp::EvolveConfig cfg;
        cfg.scheme = semgp::parse_scheme(scheme_text);
        cfg.scheme.tournament_size = tournament;
        cfg.scheme.novelty_k = novelty_k;
        cfg.population_size = paper_defaults && pop_opt->count() == 0 ? 4000 : pop;
        cfg.early_stop = paper_defaults && early_opt->count() == 0 ? 4000 : early_stop;
        cfg.transform_intercept = !no_intercept;
        cfg.protected_ops = protected_ops;
        return cfg;
    }

    std::size_t model_count() const { return paper_defaults && models_opt->count() == 0 ? 30 : models; }
};

std::optional<int> parse_int(const std::string& s) {
    int value = 0;
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

semgp::CsvOptions csv_options(bool header, const std::string& label) {
    semgp::CsvOptions opts;
    opts.header = header;
    if (!label.empty()) {
        if (const auto index = parse_int(label))
            opts.label_index = *index;
        else
            opts.label_name = label;
    }
    return opts;
}

// ---------------------------------------------------------------------------

int cmd_train(const std::string& data_path, const std::string& scheme, const CommonTrainFlags& flags,
              std::uint64_t seed, std::size_t jobs, bool header, const std::string& label,
              const std::string& out_path, const std::string& report_path) {
    const auto ds = semgp::load_csv(data_path, csv_options(header, label));
    auto cfg = flags.config(scheme);
    cfg.seed = seed;

    const auto start = Clock::now();
    const auto em = semgp::train_ensemble(ds, cfg, flags.model_count(), seed, jobs);
    const double wall = seconds_since(start);

    semgp::save_ensemble(em, out_path);

    std::ostringstream report;
    report << "dataset=" << ds.name << " n=" << ds.rows << " m=" << ds.cols << " k=" << ds.num_classes() << "\n";
    report << "scheme=" << em.scheme << " pop=" << cfg.population_size << " early_stop=" << cfg.early_stop
           << " models=" << em.models.size() << " seed=" << seed << "\n";
    for (std::size_t b = 0; b < em.models.size(); ++b)
        report << "bag " << (b + 1) << ": seed=" << em.seeds[b] << " val_macro_f1=" << em.validation_scores[b]
               << "\n";
    report << "train_seconds=" << wall << " time_per_sample=" << semgp::time_per_sample(wall, ds.rows) << "\n";
    report << "model=" << out_path << "\n";

    std::cout << report.str();
    if (!report_path.empty()) write_atomic(report_path, report.str());
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, bool header,
                const std::string& out_path, bool vote) {
    const auto em = semgp::load_ensemble(model_path);
    const auto rows = semgp::load_feature_csv(data_path, header);

    std::ostringstream out;
    if (!rows.empty()) {
        const auto X = rows_to_matrix(rows);
        const auto pred = semgp::predict_ensemble(em, X, vote);
        for (int l : pred.labels) out << em.class_names[static_cast<std::size_t>(l)] << "\n";
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_atomic(out_path, out.str());
    return 0;
}

std::vector<std::string> read_label_file(const std::string& path, bool header, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw semgp::Error("cannot open '" + path + "'");
    std::vector<std::string> labels;
    std::string line;
    bool first = true;
    int label_col = -1;
    while (std::getline(in, line)) {
        if (semgp::detail::trim(line).empty()) continue;
        auto cells = semgp::detail::split_csv_line(line);
        if (first && header) {
            if (!label.empty()) {
                auto it = std::find(cells.begin(), cells.end(), label);
                if (it != cells.end()) label_col = static_cast<int>(it - cells.begin());
            }
            first = false;
            continue;
        }
        first = false;
        int col = label_col;
        if (col < 0) {
            if (const auto index = label.empty() ? std::nullopt : parse_int(label))
                col = *index;
            else
                col = static_cast<int>(cells.size()) - 1;
        }
        if (col < 0 || col >= static_cast<int>(cells.size())) throw semgp::Error("label column out of range");
        labels.push_back(cells[static_cast<std::size_t>(col)]);
    }
    return labels;
}

int cmd_evaluate(const std::string& truth_path, const std::string& pred_path, bool header,
                 const std::string& label, const std::string& classes_csv, const std::string& report_path) {
    const auto truth_names = read_label_file(truth_path, header, label);
    const auto pred_names = read_label_file(pred_path, false, "");
    if (truth_names.size() != pred_names.size())
        throw semgp::Error("truth has " + std::to_string(truth_names.size()) + " rows, predictions " +
                           std::to_string(pred_names.size()));
    if (truth_names.empty()) throw semgp::Error("no rows to evaluate");

    std::vector<std::string> catalog;
    if (!classes_csv.empty()) {
        for (auto cell : semgp::detail::split_csv_line(classes_csv)) catalog.push_back(std::string(cell));
    } else {
        for (const auto& name : truth_names)
            if (std::find(catalog.begin(), catalog.end(), name) == catalog.end()) catalog.push_back(name);
    }
    auto index_of = [&](const std::string& name) {
        const auto it = std::find(catalog.begin(), catalog.end(), name);
        if (it == catalog.end()) throw semgp::Error("label '" + name + "' outside the class catalog");
        return static_cast<int>(it - catalog.begin());
    };

    std::vector<int> y_true, y_pred;
    for (const auto& n : truth_names) y_true.push_back(index_of(n));
    for (const auto& n : pred_names) y_pred.push_back(index_of(n));

    const std::size_t k = catalog.size();
    const auto f1 = semgp::per_class_f1(y_true, y_pred, k);
    const auto cm = semgp::confusion_matrix(y_true, y_pred, k);

    std::ostringstream report;
    report << "macro_f1=" << semgp::macro_f1(y_true, y_pred, k) << "\n";
    report << "accuracy=" << semgp::accuracy(y_true, y_pred) << "\n";
    for (std::size_t c = 0; c < k; ++c) report << "f1[" << catalog[c] << "]=" << f1[c] << "\n";
    report << "confusion (rows=truth, cols=prediction):\n";
    report << ";";
    for (std::size_t c = 0; c < k; ++c) report << catalog[c] << (c + 1 < k ? ";" : "\n");
    for (std::size_t r = 0; r < k; ++r) {
        report << catalog[r] << ";";
        for (std::size_t c = 0; c < k; ++c) report << cm[r][c] << (c + 1 < k ? ";" : "\n");
    }
    std::cout << report.str();
    if (!report_path.empty()) write_atomic(report_path, report.str());
    return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct CellKey {
    std::string dataset;
    std::string scheme;
    std::uint64_t seed;

    bool operator<(const CellKey& o) const {
        return std::tie(dataset, scheme, seed) < std::tie(o.dataset, o.scheme, o.seed);
    }
};

struct CellResult {
    std::optional<double> macro_f1;
    double seconds = 0.0;
    std::size_t train_rows = 0;
};

int cmd_benchmark(const std::vector<std::string>& data_paths, const std::vector<std::string>& schemes,
                  std::vector<std::uint64_t> seeds, const CommonTrainFlags& flags, double split_fraction,
                  double alpha, const std::string& out_dir, std::size_t jobs, bool header,
                  const std::string& label) {
    if (data_paths.empty() || schemes.empty()) throw semgp::Error("benchmark needs datasets and schemes");
    if (seeds.empty()) seeds.push_back(default_seed());
    for (const auto& s : schemes) semgp::parse_scheme(s); // fail fast on typos

    fs::create_directories(out_dir);
    const fs::path ledger_path = fs::path(out_dir) / "progress.csv";

    // resume: previously completed cells are skipped
    std::map<CellKey, CellResult> done;
    const bool fresh_ledger = !fs::exists(ledger_path) || fs::file_size(ledger_path) == 0;
    if (!fresh_ledger) {
        std::ifstream in(ledger_path);
        std::string line;
        while (std::getline(in, line)) {
            const auto cells = semgp::detail::split_csv_line(line);
            if (cells.size() < 6 || cells[0] == "dataset") continue;
            CellKey key{cells[0], cells[1], std::stoull(cells[2])};
            CellResult res;
            if (cells[3] != "-") res.macro_f1 = std::stod(cells[3]);
            res.seconds = std::stod(cells[4]);
            res.train_rows = std::stoull(cells[5]);
            done[key] = res;
        }
    }
    std::ofstream ledger(ledger_path, std::ios::app);
    if (!ledger) throw semgp::Error("cannot open ledger '" + ledger_path.string() + "'");
    if (fresh_ledger) ledger << "dataset,scheme,seed,macro_f1,train_seconds,train_rows\n";

    std::map<std::string, semgp::Dataset> datasets;
    std::vector<std::string> dataset_names;
    for (const auto& path : data_paths) {
        auto ds = semgp::load_csv(path, csv_options(header, label));
        if (datasets.count(ds.name)) throw semgp::Error("duplicate dataset name '" + ds.name + "'");
        dataset_names.push_back(ds.name);
        datasets.emplace(ds.name, std::move(ds));
    }

    struct Job {
        CellKey key;
    };
    std::vector<Job> jobs_todo;
    for (const auto& name : dataset_names)
        for (const auto& scheme : schemes)
            for (std::uint64_t seed : seeds) {
                const CellKey key{name, scheme, seed};
                if (!done.count(key)) jobs_todo.push_back({key});
            }

    std::mutex mu;
    std::size_t next_job = 0;
    auto run_cell = [&](const CellKey& key) -> CellResult {
        const semgp::Dataset& ds = datasets.at(key.dataset);
        CellResult res;
        const auto start = Clock::now();
        try {
            std::optional<std::pair<semgp::Dataset, semgp::Dataset>> split;
            for (std::uint64_t attempt = 0; attempt < 10 && !split; ++attempt) {
                auto parts = semgp::random_split(ds, split_fraction, key.seed + attempt);
                if (semgp::has_all_classes(parts.first)) split = std::move(parts);
            }
            if (!split) throw semgp::Error("no train split with full class coverage");
            auto cfg = flags.config(key.scheme);
            cfg.seed = key.seed;
            const auto em = semgp::train_ensemble(split->first, cfg, flags.model_count(), key.seed, 1);
            res.train_rows = split->first.rows;
            const auto pred = semgp::predict_ensemble(em, semgp::to_matrix(split->second));
            res.macro_f1 = semgp::macro_f1(split->second.labels, pred.labels, ds.num_classes());
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            std::cerr << "cell " << key.dataset << "/" << key.scheme << "/" << key.seed << " failed: " << e.what()
                      << "\n";
            res.macro_f1 = std::nullopt; // ranked worst downstream
            res.train_rows = ds.rows;
        }
        res.seconds = seconds_since(start);
        return res;
    };

    auto worker = [&] {
        while (true) {
            CellKey key;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next_job >= jobs_todo.size()) return;
                key = jobs_todo[next_job++].key;
            }
            const CellResult res = run_cell(key);
            {
                std::lock_guard<std::mutex> lock(mu);
                done[key] = res;
                ledger << key.dataset << "," << key.scheme << "," << key.seed << ","
                       << (res.macro_f1 ? std::to_string(*res.macro_f1) : std::string("-")) << "," << res.seconds
                       << "," << res.train_rows << "\n";
                ledger.flush();
                std::cout << key.dataset << "/" << key.scheme << "/seed" << key.seed << ": "
                          << (res.macro_f1 ? std::to_string(*res.macro_f1) : std::string("failed")) << " ("
                          << res.seconds << "s)\n";
            }
        }
    };

    {
        std::vector<std::thread> pool;
        const std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, jobs_todo.size()));
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // one ranking block per (dataset, seed) pair
    semgp::ScoreTable table;
    table.systems = schemes;
    for (const auto& name : dataset_names)
        for (std::uint64_t seed : seeds) table.datasets.push_back(name + "#s" + std::to_string(seed));
    table.values.assign(schemes.size(), {});
    for (std::size_t s = 0; s < schemes.size(); ++s)
        for (const auto& name : dataset_names)
            for (std::uint64_t seed : seeds) {
                const auto it = done.find(CellKey{name, schemes[s], seed});
                table.values[s].push_back(it == done.end() ? std::nullopt : it->second.macro_f1);
            }

    std::ostringstream scores_csv;
    scores_csv << "scheme";
    for (const auto& d : table.datasets) scores_csv << "," << d;
    scores_csv << "\n";
    for (std::size_t s = 0; s < table.systems.size(); ++s) {
        scores_csv << table.systems[s];
        for (const auto& v : table.values[s]) scores_csv << "," << (v ? std::to_string(*v) : std::string("-"));
        scores_csv << "\n";
    }
    write_atomic(fs::path(out_dir) / "score_table.csv", scores_csv.str());

    const auto ranks = semgp::rank_scores(table);
    std::ostringstream ranks_csv;
    ranks_csv << "scheme";
    for (const auto& d : ranks.datasets) ranks_csv << "," << d;
    ranks_csv << ",mean_rank\n";
    for (std::size_t s = 0; s < ranks.systems.size(); ++s) {
        ranks_csv << ranks.systems[s];
        for (double r : ranks.ranks[s]) ranks_csv << "," << r;
        ranks_csv << "," << ranks.mean_rank[s] << "\n";
    }
    write_atomic(fs::path(out_dir) / "rank_table.csv", ranks_csv.str());

    std::ostringstream report;
    report << "systems ordered by mean macro-F1 rank (" << ranks.datasets.size() << " blocks):\n";
    std::vector<std::size_t> order(schemes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks.mean_rank[a] < ranks.mean_rank[b];
    });
    for (std::size_t i : order) report << "  " << ranks.systems[i] << ": " << ranks.mean_rank[i] << "\n";

    if (schemes.size() >= 2 && ranks.datasets.size() >= 2) {
        const auto fr = semgp::friedman_test(ranks);
        report << "friedman_statistic=" << fr.statistic << " p_value=" << fr.p_value << "\n";
        const auto nem = semgp::nemenyi_groups(ranks, alpha);
        report << "nemenyi_critical_difference=" << nem.critical_difference << " (alpha=" << alpha << ")\n";
        for (std::size_t g = 0; g < nem.groups.size(); ++g) {
            report << "group " << (g + 1) << ":";
            for (const auto& s : nem.groups[g]) report << " " << s;
            report << "\n";
        }
    }
    write_atomic(fs::path(out_dir) / "report.txt", report.str());
    std::cout << report.str();
    return 0;
}

int cmd_inspect(const std::string& data_path, const std::string& model_path, int model_index,
                const std::string& dot_path, bool header, const std::string& label) {
    if (!data_path.empty()) {
        const auto ds = semgp::load_csv(data_path, csv_options(header, label));
        char line[128];
        std::snprintf(line, sizeof line, "n=%zu m=%zu k=%zu entropy=%.2f", ds.rows, ds.cols, ds.num_classes(),
                      semgp::class_entropy(ds));
        std::cout << line << "\n";
        std::cout << "classes:";
        for (const auto& c : ds.class_names) std::cout << " " << c;
        std::cout << "\n";
        return 0;
    }

    const auto em = semgp::load_ensemble(model_path);
    std::cout << "scheme=" << em.scheme << " models=" << em.models.size() << " m=" << em.num_features
              << " k=" << em.class_names.size() << "\n";
    for (std::size_t b = 0; b < em.models.size(); ++b)
        std::cout << "model " << b << ": nodes=" << em.models[b].nodes.size()
                  << " val_macro_f1=" << em.models[b].val_fitness << "\n";

    if (!dot_path.empty()) {
        if (model_index < 0 || static_cast<std::size_t>(model_index) >= em.models.size())
            throw semgp::Error("model index out of range");
        const auto& model = em.models[static_cast<std::size_t>(model_index)];
        std::ostringstream dot;
        dot << "digraph model {\n  rankdir=BT;\n";
        for (std::size_t i = 0; i < model.nodes.size(); ++i) {
            const auto& n = model.nodes[i];
            std::string name = n.fn == semgp::FunctionKind::Terminal
                                   ? "x" + std::to_string(n.feature)
                                   : std::string(semgp::kind_name(n.fn));
            dot << "  n" << i << " [label=\"" << name << "\"];\n";
            for (auto a : n.args) {
                if (a >= i) throw semgp::Error("model graph has a forward edge"); // acyclicity guard
                dot << "  n" << a << " -> n" << i << ";\n";
            }
        }
        dot << "  out [shape=plaintext,label=\"output\"];\n";
        dot << "  n" << model.output << " -> out;\n";
        dot << "}\n";
        write_atomic(dot_path, dot.str());
        std::cout << "graph=" << dot_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic GP classification engine"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train a bagged ensemble on a CSV dataset");
    std::string train_data, train_scheme, train_out, train_report, train_label;
    std::uint64_t train_seed = default_seed();
    std::size_t train_jobs = 1;
    bool train_header = false;
    CommonTrainFlags train_flags;
    train->add_option("--data", train_data, "training CSV")->required();
    train->add_option("--scheme", train_scheme, "selection scheme, e.g. agr-rnd")->required();
    train->add_option("--out", train_out, "model file to write")->required();
    train->add_option("--seed", train_seed, "random seed (SEMGP_SEED as fallback)");
    train->add_option("--jobs", train_jobs, "parallel bag training");
    train->add_option("--label", train_label, "label column name or zero-based index (default: last)");
    train->add_flag("--header", train_header, "first CSV row is a header");
    train->add_option("--report", train_report, "also write the training report here");
    train_flags.attach(train);

    // predict
    auto* predict = app.add_subcommand("predict", "predict labels for a feature CSV");
    std::string pred_model, pred_data, pred_out;
    bool pred_header = false, pred_vote = false;
    predict->add_option("--model", pred_model, "model file")->required();
    predict->add_option("--data", pred_data, "feature CSV (no label column)")->required();
    predict->add_option("--out", pred_out, "write predictions here (default stdout)");
    predict->add_flag("--header", pred_header, "first CSV row is a header");
    predict->add_flag("--vote", pred_vote, "majority vote instead of score averaging");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against the truth");
    std::string eval_truth, eval_pred, eval_label, eval_classes, eval_report;
    bool eval_header = false;
    evaluate->add_option("--truth", eval_truth, "CSV with true labels (label list or dataset CSV)")->required();
    evaluate->add_option("--pred", eval_pred, "predictions, one label per line")->required();
    evaluate->add_option("--label", eval_label, "label column in the truth file");
    evaluate->add_option("--classes", eval_classes, "comma-separated class catalog override");
    evaluate->add_flag("--header", eval_header, "truth file has a header row");
    evaluate->add_option("--report", eval_report, "also write the metrics report here");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "train scheme x dataset x seed cells and rank them");
    std::vector<std::string> bench_data, bench_schemes;
    std::vector<std::uint64_t> bench_seeds;
    std::string bench_out = "benchmark_out", bench_label;
    double bench_split = 0.7, bench_alpha = 0.10;
    std::size_t bench_jobs = 1;
    bool bench_header = false;
    CommonTrainFlags bench_flags;
    benchmark->add_option("--data", bench_data, "dataset CSVs")->required()->expected(-1);
    benchmark->add_option("--schemes", bench_schemes, "selection schemes")->required()->expected(-1);
    benchmark->add_option("--seeds", bench_seeds, "seeds (one cell per dataset x scheme x seed)")->expected(-1);
    benchmark->add_option("--split", bench_split, "train fraction of the outer split");
    benchmark->add_option("--alpha", bench_alpha, "significance level for the group report (0.05 or 0.10)");
    benchmark->add_option("--out-dir", bench_out, "output directory");
    benchmark->add_option("--jobs", bench_jobs, "parallel cells");
    benchmark->add_option("--label", bench_label, "label column name or zero-based index");
    benchmark->add_flag("--header", bench_header, "CSV files have header rows");
    bench_flags.attach(benchmark);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "summarize a dataset or a model file");
    std::string ins_data, ins_model, ins_dot, ins_label;
    int ins_index = 0;
    bool ins_header = false;
    inspect->add_option("--data", ins_data, "dataset CSV");
    inspect->add_option("--model", ins_model, "model file");
    inspect->add_option("--model-index", ins_index, "which model to export as a graph");
    inspect->add_option("--dot", ins_dot, "write a DOT graph of the model here");
    inspect->add_option("--label", ins_label, "label column name or zero-based index");
    inspect->add_flag("--header", ins_header, "CSV has a header row");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cmd_train(train_data, train_scheme, train_flags, train_seed, train_jobs, train_header,
                             train_label, train_out, train_report);
        if (predict->parsed()) return cmd_predict(pred_model, pred_data, pred_header, pred_out, pred_vote);
        if (evaluate->parsed())
            return cmd_evaluate(eval_truth, eval_pred, eval_header, eval_label, eval_classes, eval_report);
        if (benchmark->parsed())
            return cmd_benchmark(bench_data, bench_schemes, bench_seeds, bench_flags, bench_split, bench_alpha,
                                 bench_out, bench_jobs, bench_header, bench_label);
        if (inspect->parsed()) {
            if (ins_data.empty() == ins_model.empty())
                throw semgp::Error("inspect needs exactly one of --data or --model");
            return cmd_inspect(ins_data, ins_model, ins_index, ins_dot, ins_header, ins_label);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

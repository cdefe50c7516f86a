#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "semgp/error.hpp"
#include "semgp/rng.hpp"

namespace semgp {

/// A classification problem: n rows of m numeric features plus a dense
/// class index per row. Immutable after construction; safe to share
/// read-only between threads.
struct Dataset {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> features; // row-major, rows x cols
    std::vector<int> labels;      // values in [0, num_classes)
    std::vector<std::string> class_names;

    double feature(std::size_t i, std::size_t j) const { return features[i * cols + j]; }
    std::size_t num_classes() const { return class_names.size(); }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = feature(i, j);
        return out;
    }
};

/// One-vs-rest targets: per class a length-n vector over {-1, +1}.
struct OvrTargets {
    std::vector<std::vector<double>> targets;

    std::size_t num_classes() const { return targets.size(); }
    std::size_t size() const { return targets.empty() ? 0 : targets[0].size(); }
};

enum class MissingPolicy { Reject, ImputeMean };

struct CsvOptions {
    bool header = false;
    std::optional<int> label_index;       // zero-based; default: last column
    std::optional<std::string> label_name; // requires header
    MissingPolicy missing = MissingPolicy::Reject;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.emplace_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

inline bool is_missing_token(std::string_view s) {
    if (s.empty() || s == "?") return true;
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "na" || lower == "nan";
}

inline std::optional<double> parse_double(std::string_view s) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

} // namespace detail

/// Parses comma-separated rows with one label column (default: the last).
/// Label strings are mapped to dense indices in order of first appearance.
inline Dataset load_csv_stream(std::istream& in, const CsvOptions& opts, const std::string& name) {
    std::vector<std::vector<std::string>> raw;
    std::vector<std::string> header_cells;
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (opts.header && !saw_header) {
            header_cells = std::move(cells);
            saw_header = true;
            continue;
        }
        raw.push_back(std::move(cells));
    }
    if (raw.empty()) throw Error("dataset '" + name + "' has no data rows");

    const std::size_t width = raw.front().size();
    if (width < 2) throw Error("dataset '" + name + "' needs at least one feature and one label column");

    int label_col = static_cast<int>(width) - 1;
    if (opts.label_name) {
        if (!opts.header) throw Error("label column by name requires a header row");
        auto it = std::find(header_cells.begin(), header_cells.end(), *opts.label_name);
        if (it == header_cells.end()) throw Error("label column '" + *opts.label_name + "' not found in header");
        label_col = static_cast<int>(it - header_cells.begin());
    } else if (opts.label_index) {
        label_col = *opts.label_index;
    }
    if (label_col < 0 || label_col >= static_cast<int>(width)) throw Error("label column index out of range");

    Dataset ds;
    ds.name = name;
    ds.rows = raw.size();
    ds.cols = width - 1;
    ds.features.resize(ds.rows * ds.cols);
    ds.labels.resize(ds.rows);

    std::vector<bool> missing_mask(ds.rows * ds.cols, false);
    const std::size_t first_data_row = opts.header ? 2 : 1;

    for (std::size_t i = 0; i < ds.rows; ++i) {
        const auto& cells = raw[i];
        const std::size_t file_row = first_data_row + i;
        if (cells.size() != width)
            throw ParseError("inconsistent column count (expected " + std::to_string(width) + ", got " + std::to_string(cells.size()) + ")", file_row, 1);
        std::size_t j = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (static_cast<int>(c) == label_col) {
                const std::string& label = cells[c];
                if (label.empty()) throw ParseError("empty label", file_row, c + 1);
                auto it = std::find(ds.class_names.begin(), ds.class_names.end(), label);
                if (it == ds.class_names.end()) {
                    ds.class_names.push_back(label);
                    ds.labels[i] = static_cast<int>(ds.class_names.size()) - 1;
                } else {
                    ds.labels[i] = static_cast<int>(it - ds.class_names.begin());
                }
                continue;
            }
            auto parsed = detail::parse_double(cells[c]);
            bool bad = !parsed || !std::isfinite(*parsed);
            if (bad) {
                if (opts.missing == MissingPolicy::Reject) {
                    if (detail::is_missing_token(cells[c]) || (parsed && !std::isfinite(*parsed)))
                        throw ParseError("missing feature value", file_row, c + 1);
                    throw ParseError("non-numeric feature value '" + cells[c] + "'", file_row, c + 1);
                }
                missing_mask[i * ds.cols + j] = true;
                ds.features[i * ds.cols + j] = 0.0;
            } else {
                ds.features[i * ds.cols + j] = *parsed;
            }
            ++j;
        }
    }

    if (opts.missing == MissingPolicy::ImputeMean) {
        for (std::size_t j = 0; j < ds.cols; ++j) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < ds.rows; ++i) {
                if (!missing_mask[i * ds.cols + j]) {
                    sum += ds.feature(i, j);
                    ++count;
                }
            }
            const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
            for (std::size_t i = 0; i < ds.rows; ++i)
                if (missing_mask[i * ds.cols + j]) ds.features[i * ds.cols + j] = mean;
        }
    }

    if (ds.class_names.size() < 2) throw Error("dataset '" + name + "' has a single class");
    return ds;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string name = path;
    if (auto pos = name.find_last_of("/\\"); pos != std::string::npos) name = name.substr(pos + 1);
    if (auto pos = name.rfind(".csv"); pos != std::string::npos && pos == name.size() - 4) name = name.substr(0, pos);
    return load_csv_stream(in, opts, name);
}

/// Feature-only CSV (no label column); every cell must be numeric.
inline std::vector<std::vector<double>> load_feature_csv(const std::string& path, bool header = false) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<std::vector<double>> out;
    std::string line;
    std::size_t lineno = 0;
    bool skipped_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        auto cells = detail::split_csv_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            auto parsed = detail::parse_double(cells[c]);
            if (!parsed || !std::isfinite(*parsed))
                throw ParseError("non-numeric feature value '" + cells[c] + "'", lineno, c + 1);
            row.push_back(*parsed);
        }
        if (!out.empty() && row.size() != out.front().size())
            throw ParseError("inconsistent column count", lineno, 1);
        out.push_back(std::move(row));
    }
    return out;
}

/// Row subset preserving the class catalog. The result may miss classes;
/// callers that require full class coverage must check.
inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.name = ds.name;
    out.rows = indices.size();
    out.cols = ds.cols;
    out.class_names = ds.class_names;
    out.features.resize(out.rows * out.cols);
    out.labels.resize(out.rows);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t i = indices[r];
        std::copy(ds.features.begin() + static_cast<std::ptrdiff_t>(i * ds.cols),
                  ds.features.begin() + static_cast<std::ptrdiff_t>((i + 1) * ds.cols),
                  out.features.begin() + static_cast<std::ptrdiff_t>(r * out.cols));
        out.labels[r] = ds.labels[i];
    }
    return out;
}

inline bool has_all_classes(const Dataset& ds) {
    std::vector<bool> seen(ds.num_classes(), false);
    for (int l : ds.labels) seen[static_cast<std::size_t>(l)] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

/// Deterministic disjoint partition; the first part receives
/// round(fraction * n) rows. Does not check class coverage of the parts.
inline std::pair<Dataset, Dataset> random_split(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split fraction must be in (0, 1)");
    const std::size_t n = ds.rows;
    const std::size_t n_first = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_first == 0 || n_first == n) throw Error("split fraction produces an empty part");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);

    std::vector<std::size_t> first(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_first));
    std::vector<std::size_t> second(idx.begin() + static_cast<std::ptrdiff_t>(n_first), idx.end());
    return {subset(ds, first), subset(ds, second)};
}

/// Shannon entropy of the class distribution, log base = number of classes,
/// so a perfectly balanced problem scores exactly 1.
inline double class_entropy(const Dataset& ds) {
    const std::size_t k = ds.num_classes();
    if (k < 2) throw Error("class entropy needs at least two classes");
    std::vector<std::size_t> counts(k, 0);
    for (int l : ds.labels) ++counts[static_cast<std::size_t>(l)];
    const double n = static_cast<double>(ds.rows);
    const double logk = std::log(static_cast<double>(k));
    double h = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        const double p = static_cast<double>(counts[c]) / n;
        h -= p * std::log(p) / logk;
    }
    return h;
}

inline OvrTargets ovr_targets(const Dataset& ds) {
    OvrTargets t;
    t.targets.assign(ds.num_classes(), std::vector<double>(ds.rows, -1.0));
    for (std::size_t i = 0; i < ds.rows; ++i)
        t.targets[static_cast<std::size_t>(ds.labels[i])][i] = 1.0;
    return t;
}

} // namespace semgp

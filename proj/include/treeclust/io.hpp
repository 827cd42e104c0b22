#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeclust/anytime.hpp"
#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/random.hpp"

namespace treeclust {

namespace detail {

/// Shortest decimal form that parses back to the identical double.
inline std::string fmt_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ParseError("bad number: '" + std::string(s) + "'");
    return v;
}

inline Label parse_label(std::string_view s) {
    Label v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ParseError("bad label: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Splits into lines, tolerating CRLF and a trailing newline.
inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

} // namespace detail

// --- files ----------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

// --- dataset CSV ------------------------------------------------------------

/// Header "label,c1,...,cm", one point per row, '.' decimal separator.
inline std::string write_dataset_csv(const Dataset& data) {
    std::string out = "label";
    for (std::size_t c = 0; c < data.dimension(); ++c)
        out += ",c" + std::to_string(c + 1);
    out += '\n';
    for (Label l : data.labels()) {
        out += std::to_string(l);
        for (double v : data.point(l)) out += ',' + detail::fmt_double(v);
        out += '\n';
    }
    return out;
}

inline Dataset read_dataset_csv(const std::string& text,
                                Dissimilarity kind = Dissimilarity::euclidean) {
    const auto lines = detail::lines_of(text);
    if (lines.empty()) throw ParseError("empty dataset");
    if (detail::split(lines[0], ',').at(0) != "label")
        throw ParseError("dataset header must start with 'label'");

    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = detail::split(lines[i], ',');
        if (cells.size() < 2) throw ParseError("dataset row needs a label and coordinates");
        labels.push_back(detail::parse_label(cells[0]));
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c)
            row.push_back(detail::parse_double(cells[c]));
        rows.push_back(std::move(row));
    }
    return Dataset(std::move(labels), std::move(rows), kind);
}

// --- Newick -----------------------------------------------------------------

/// "((1,2),3);" with children in canonical (smaller-min-label first) order.
inline std::string to_newick(const BinaryHierarchy& tree) {
    std::string out;
    const auto emit = [&](auto&& self, int id) -> void {
        const auto& n = tree.node(id);
        if (n.is_leaf()) {
            out += std::to_string(n.cluster[0]);
            return;
        }
        out += '(';
        self(self, n.left);
        out += ',';
        self(self, n.right);
        out += ')';
    };
    emit(emit, tree.root());
    out += ';';
    return out;
}

inline BinaryHierarchy from_newick(const std::string& text) {
    std::size_t pos = 0;
    const auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    };
    const auto expect = [&](char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw ParseError("expected '" + std::string(1, c) + "' at offset " +
                             std::to_string(pos));
        ++pos;
    };

    std::vector<Cluster> clusters;
    IndexSet seen;
    const auto parse_node = [&](auto&& self) -> Cluster {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of tree text");
        if (text[pos] == '(') {
            ++pos;
            const Cluster left = self(self);
            expect(',');
            const Cluster right = self(self);
            expect(')');
            Cluster joint = cluster_union(left, right);
            clusters.push_back(joint);
            return joint;
        }
        std::size_t end = pos;
        if (end < text.size() && text[end] == '-') ++end;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
        if (end == pos) throw ParseError("expected a label at offset " + std::to_string(pos));
        const Label label = detail::parse_label({text.data() + pos, end - pos});
        pos = end;
        if (std::find(seen.begin(), seen.end(), label) != seen.end())
            throw ParseError("duplicate leaf label " + std::to_string(label));
        seen.push_back(label);
        clusters.push_back({label});
        return {label};
    };

    const Cluster all = parse_node(parse_node);
    expect(';');
    skip_ws();
    if (pos != text.size()) throw ParseError("trailing characters after ';'");
    return from_cluster_set(all, clusters);
}

// --- JSON -------------------------------------------------------------------

inline std::string to_json(const BinaryHierarchy& tree) {
    nlohmann::json j;
    j["index_set"] = tree.index_set();
    j["clusters"] = tree.cluster_set();
    return j.dump();
}

inline BinaryHierarchy from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        const auto index_set = j.at("index_set").get<IndexSet>();
        const auto clusters = j.at("clusters").get<std::vector<Cluster>>();
        return from_cluster_set(index_set, clusters);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad tree json: ") + e.what());
    }
}

// --- trace and matrix CSV -----------------------------------------------------

inline std::string join_labels(const Cluster& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(c[i]);
    }
    return out;
}

inline std::string write_trace_csv(const AnytimeTrace& trace) {
    std::string out = "iteration,objective_h,violating_cluster,swapped_cluster\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        out += std::to_string(i + 1) + ',' + detail::fmt_double(s.objective_h) + ',' +
               join_labels(s.violating_cluster) + ',' + join_labels(s.swapped_grandchild) +
               '\n';
    }
    return out;
}

/// Square matrix in sorted-label order, labels on both axes.
inline std::string write_matrix_csv(const std::vector<std::vector<double>>& m,
                                    const IndexSet& labels) {
    std::string out = "label";
    for (Label l : labels) out += ',' + std::to_string(l);
    out += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += std::to_string(labels[i]);
        for (double v : m[i]) out += ',' + detail::fmt_double(v);
        out += '\n';
    }
    return out;
}

// --- IDX / MNIST -------------------------------------------------------------

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw TruncatedFileError(std::string("missing ") + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace detail

/// Images from an IDX stream, each flattened row-major and scaled into [0,1].
inline std::vector<std::vector<double>> parse_idx_images(std::istream& in) {
    if (const auto magic = detail::read_be32(in, "image magic"); magic != 0x00000803u)
        throw BadMagicError("image magic " + std::to_string(magic));
    const auto count = detail::read_be32(in, "image count");
    const auto rows = detail::read_be32(in, "row count");
    const auto cols = detail::read_be32(in, "column count");
    const std::size_t dim = std::size_t(rows) * cols;

    std::vector<std::vector<double>> images;
    images.reserve(count);
    std::vector<unsigned char> pixels(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(pixels.data()),
                     static_cast<std::streamsize>(dim)))
            throw TruncatedFileError("image " + std::to_string(i) + " cut short");
        std::vector<double> img(dim);
        for (std::size_t p = 0; p < dim; ++p) img[p] = pixels[p] / 255.0;
        images.push_back(std::move(img));
    }
    return images;
}

inline std::vector<int> parse_idx_labels(std::istream& in) {
    if (const auto magic = detail::read_be32(in, "label magic"); magic != 0x00000801u)
        throw BadMagicError("label magic " + std::to_string(magic));
    const auto count = detail::read_be32(in, "label count");
    std::vector<unsigned char> raw(count);
    if (count > 0 && !in.read(reinterpret_cast<char*>(raw.data()),
                              static_cast<std::streamsize>(count)))
        throw TruncatedFileError("label data cut short");
    return std::vector<int>(raw.begin(), raw.end());
}

/// Digit images grouped by class, ready for repeated balanced sampling.
struct DigitBank {
    std::array<std::vector<std::vector<double>>, 10> by_digit;
};

inline DigitBank bank_from_streams(std::istream& images_in, std::istream& labels_in) {
    const auto images = parse_idx_images(images_in);
    const auto labels = parse_idx_labels(labels_in);
    if (images.size() != labels.size())
        throw ParseError("image count " + std::to_string(images.size()) +
                         " does not match label count " + std::to_string(labels.size()));
    DigitBank bank;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 9)
            throw ParseError("digit label out of range: " + std::to_string(labels[i]));
        bank.by_digit[static_cast<std::size_t>(labels[i])].push_back(images[i]);
    }
    return bank;
}

inline DigitBank load_digit_bank(const std::string& images_path,
                                 const std::string& labels_path) {
    std::ifstream images_in(images_path, std::ios::binary);
    if (!images_in) throw ConfigError("cannot open " + images_path);
    std::ifstream labels_in(labels_path, std::ios::binary);
    if (!labels_in) throw ConfigError("cannot open " + labels_path);
    return bank_from_streams(images_in, labels_in);
}

/// Balanced sample: per_digit images of every digit, drawn without
/// replacement by a seeded shuffle; labels 1..10*per_digit in digit order.
inline Dataset sample_digits(const DigitBank& bank, std::size_t per_digit,
                             std::uint64_t rng_seed) {
    if (per_digit == 0) throw ConfigError("per_digit must be positive");
    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t d = 0; d < 10; ++d) {
        const auto& pool = bank.by_digit[d];
        if (pool.size() < per_digit)
            throw InsufficientSamplesError("digit " + std::to_string(d) + " has " +
                                           std::to_string(pool.size()) + " images, need " +
                                           std::to_string(per_digit));
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(mix_seed(rng_seed, static_cast<std::uint64_t>(d)));
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[uniform_below(rng, i + 1)]);
        for (std::size_t k = 0; k < per_digit; ++k) {
            labels.push_back(static_cast<Label>(labels.size() + 1));
            rows.push_back(pool[order[k]]);
        }
    }
    return Dataset(std::move(labels), std::move(rows));
}

inline Dataset load_mnist(const std::string& images_path, const std::string& labels_path,
                          std::size_t per_digit, std::uint64_t rng_seed) {
    return sample_digits(load_digit_bank(images_path, labels_path), per_digit, rng_seed);
}

// --- synthetic data -----------------------------------------------------------

/// n points uniform on [0,1]^2, labels 1..n. Redraws the whole set if any
/// two pairwise distances collide exactly, so downstream code can rely on
/// generic (all-distinct) dissimilarities.
inline Dataset gen_uniform_square(std::size_t n, std::uint64_t rng_seed) {
    if (n < 2) throw ConfigError("need at least two points");
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng(mix_seed(rng_seed, attempt));
        std::vector<Label> labels;
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(static_cast<Label>(i + 1));
            rows.push_back({uniform_unit(rng), uniform_unit(rng)});
        }
        std::vector<double> d2;
        d2.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d2.push_back(squared_distance(std::span<const double>(rows[i]),
                                              std::span<const double>(rows[j])));
        std::sort(d2.begin(), d2.end());
        if (std::adjacent_find(d2.begin(), d2.end()) == d2.end())
            return Dataset(std::move(labels), std::move(rows));
    }
}

} // namespace treeclust

#include "fjstooges/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fjstooges/errors.hpp"

namespace fj::io {

namespace {

std::string location(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
    T value{};
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

template <typename T>
T require_number(std::string_view text, const std::string& where, const char* what) {
    auto v = parse_number<T>(text);
    if (!v) throw DataError(where + "expected " + what + ", got '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(*v)) throw DataError(where + what + " is not finite");
    }
    return *v;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::out | mode);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_count(std::size_t got, std::optional<std::size_t> expected, const fs::path& path) {
    if (expected && got != *expected) {
        throw DataError("'" + path.string() + "' has " + std::to_string(got) + " values, expected " +
                        std::to_string(*expected) + " (one per node)");
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError(where + "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

UndirectedGraph read_edge_list(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::pair<std::size_t, std::size_t>> header;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto where = location(source, lineno);
        const auto tok = tokens(line);
        if (tok.size() != 2) throw DataError(where + "expected two integers, got '" + std::string(trim(line)) + "'");
        if (!header) {
            header.emplace(require_number<std::size_t>(tok[0], where, "node count"),
                           require_number<std::size_t>(tok[1], where, "edge count"));
            if (header->first == 0) throw DataError(where + "node count must be >= 1");
            edges.reserve(header->second);
            continue;
        }
        const auto u = require_number<std::uint64_t>(tok[0], where, "node id");
        const auto v = require_number<std::uint64_t>(tok[1], where, "node id");
        if (u >= header->first || v >= header->first) {
            throw DataError(where + "endpoint >= node count " + std::to_string(header->first));
        }
        if (u == v) throw DataError(where + "self-loop on node " + std::to_string(u));
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (!header) throw DataError(source + ": missing 'n m' header");
    if (edges.size() != header->second) {
        throw DataError(source + ": header announces " + std::to_string(header->second) + " edges, found " +
                        std::to_string(edges.size()));
    }
    return UndirectedGraph(header->first, std::move(edges));
}

UndirectedGraph load_edge_list(const fs::path& path) {
    auto in = open_in(path);
    return read_edge_list(in, path.string());
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
    out << g.node_count() << ' ' << g.edge_count() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_edge_list(const fs::path& path, const UndirectedGraph& g) {
    auto out = open_out(path);
    write_edge_list(out, g);
}

std::vector<double> read_opinions(std::istream& in, OpinionScale scale, const std::string& source) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto where = location(source, lineno);
        double value = require_number<double>(trim(line), where, "opinion");
        if (scale == OpinionScale::ZeroTen) value /= 10.0;
        if (value < 0.0 || value > 1.0) {
            const double clamped = std::clamp(value, 0.0, 1.0);
            std::cerr << "warning: " << where << "opinion " << value << " clamped to " << clamped << '\n';
            value = clamped;
        }
        out.push_back(value);
    }
    return out;
}

std::vector<double> load_opinions(const fs::path& path, OpinionScale scale, std::optional<std::size_t> expected_count) {
    auto in = open_in(path);
    auto values = read_opinions(in, scale, path.string());
    check_count(values.size(), expected_count, path);
    return values;
}

std::vector<std::uint64_t> load_tweet_counts(const fs::path& path, std::optional<std::size_t> expected_count) {
    auto in = open_in(path);
    std::vector<std::uint64_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        out.push_back(require_number<std::uint64_t>(trim(line), location(path.string(), lineno), "tweet count"));
    }
    check_count(out.size(), expected_count, path);
    return out;
}

double resistance_from_tweets(std::uint64_t tweets, std::mt19937_64& rng) {
    double low = 0.4;
    if (tweets > 20) {
        low = 0.7;
    } else if (tweets > 10) {
        low = 0.6;
    } else if (tweets > 5) {
        low = 0.5;
    }
    // tweets == 0 falls in the lowest bucket.
    std::uniform_real_distribution<double> dist(low, low + 0.2);
    return std::clamp(dist(rng), low, low + 0.2);
}

std::vector<double> resistances_from_tweets(const std::vector<std::uint64_t>& tweets, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(tweets.size());
    for (auto tw : tweets) out.push_back(resistance_from_tweets(tw, rng));
    return out;
}

DatasetBundle load_dataset(const fs::path& edges, const fs::path& opinions, OpinionScale scale,
                           const std::optional<fs::path>& tweet_counts) {
    DatasetBundle bundle;
    bundle.graph = load_edge_list(edges);
    bundle.opinions = load_opinions(opinions, scale, bundle.graph.node_count());
    if (tweet_counts) bundle.tweet_counts = load_tweet_counts(*tweet_counts, bundle.graph.node_count());
    return bundle;
}

OpinionInstance instance_from_dataset(const DatasetBundle& bundle, std::uint64_t seed, double default_resistance) {
    const std::size_t n = bundle.graph.node_count();
    std::vector<double> alpha = bundle.tweet_counts ? resistances_from_tweets(*bundle.tweet_counts, seed)
                                                    : std::vector<double>(n, default_resistance);
    return OpinionInstance(influence_from_undirected(bundle.graph), std::move(alpha), bundle.opinions);
}

void write_instance(std::ostream& out, const OpinionInstance& inst) {
    const auto triplets = inst.influence.triplets();
    out << "fj-instance 1\n" << inst.size() << ' ' << triplets.size() << '\n';
    for (std::size_t v = 0; v < inst.size(); ++v) {
        out << format_exact(inst.resistance[v]) << ' ' << format_exact(inst.innate[v]) << '\n';
    }
    for (const auto& e : triplets) out << e.source << ' ' << e.target << ' ' << format_exact(e.weight) << '\n';
}

OpinionInstance read_instance(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> std::vector<std::string_view> {
        while (std::getline(in, line)) {
            ++lineno;
            if (!skippable(line)) return tokens(line);
        }
        throw DataError(source + ": unexpected end of instance file");
    };
    auto magic = next();
    if (magic.size() != 2 || magic[0] != "fj-instance" || magic[1] != "1") {
        throw DataError(location(source, lineno) + "not an fj-instance v1 file");
    }
    auto dims = next();
    if (dims.size() != 2) throw DataError(location(source, lineno) + "expected 'n nnz'");
    const auto n = require_number<std::size_t>(dims[0], location(source, lineno), "node count");
    const auto nnz = require_number<std::size_t>(dims[1], location(source, lineno), "nonzero count");
    std::vector<double> alpha(n), s(n);
    for (std::size_t v = 0; v < n; ++v) {
        auto tok = next();
        const auto where = location(source, lineno);
        if (tok.size() != 2) throw DataError(where + "expected 'alpha s'");
        alpha[v] = require_number<double>(tok[0], where, "resistance");
        s[v] = require_number<double>(tok[1], where, "innate opinion");
    }
    std::vector<Influence> entries;
    entries.reserve(nnz);
    for (std::size_t i = 0; i < nnz; ++i) {
        auto tok = next();
        const auto where = location(source, lineno);
        if (tok.size() != 3) throw DataError(where + "expected 'u v weight'");
        const auto u = require_number<std::uint64_t>(tok[0], where, "node id");
        const auto v = require_number<std::uint64_t>(tok[1], where, "node id");
        if (u >= n || v >= n) throw DataError(where + "node id out of range");
        entries.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), require_number<double>(tok[2], where, "weight")});
    }
    return OpinionInstance(InfluenceMatrix(n, std::move(entries)), std::move(alpha), std::move(s));
}

void save_instance(const fs::path& path, const OpinionInstance& inst) {
    auto out = open_out(path);
    write_instance(out, inst);
}

OpinionInstance load_instance(const fs::path& path) {
    auto in = open_in(path);
    return read_instance(in, path.string());
}

void save_vector(const fs::path& path, const std::vector<double>& values) {
    auto out = open_out(path);
    for (double x : values) out << format_exact(x) << '\n';
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string encode_stooges(const StoogeAssignment& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(a[i].node);
        out += a[i].beta == Beta::One ? ":1" : ":0";
    }
    return out;
}

StoogeAssignment decode_stooges(std::string_view text) {
    StoogeAssignment out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(';', start), text.size());
        const auto item = text.substr(start, end - start);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) throw DataError("stooge entry '" + std::string(item) + "' lacks ':'");
        const auto node = parse_number<std::uint64_t>(item.substr(0, colon));
        const auto beta = item.substr(colon + 1);
        if (!node || (beta != "0" && beta != "1")) {
            throw DataError("malformed stooge entry '" + std::string(item) + "'");
        }
        out.push_back({static_cast<NodeId>(*node), beta == "1" ? Beta::One : Beta::Zero});
        start = end + 1;
    }
    return out;
}

void write_records(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << csv_field(r.run_id) << ',' << csv_field(r.dataset) << ',' << csv_field(r.algorithm) << ','
            << csv_field(r.objective) << ',' << csv_field(r.direction) << ',' << r.k_step << ',' << r.seed << ','
            << format_real(r.mse) << ',' << format_real(r.polarization) << ',' << format_real(r.bias_sq) << ','
            << format_real(r.theta_hat) << ',' << format_real(r.theta_hat_star) << ','
            << format_real(r.elapsed_ms) << ',' << r.evaluations << ',' << csv_field(r.stooges) << '\n';
    }
}

std::vector<ExperimentRecord> read_records(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<ExperimentRecord> out;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = location(source, lineno);
        if (!header_seen) {
            if (line != kCsvHeader) throw DataError(where + "unexpected CSV header");
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line, where);
        if (f.size() != 15) {
            throw DataError(where + "expected 15 fields, found " + std::to_string(f.size()));
        }
        ExperimentRecord r;
        r.run_id = f[0];
        r.dataset = f[1];
        r.algorithm = f[2];
        r.objective = f[3];
        r.direction = f[4];
        r.k_step = require_number<std::size_t>(f[5], where, "k_step");
        r.seed = require_number<std::uint64_t>(f[6], where, "seed");
        r.mse = require_number<double>(f[7], where, "mse");
        r.polarization = require_number<double>(f[8], where, "polarization");
        r.bias_sq = require_number<double>(f[9], where, "bias_sq");
        r.theta_hat = require_number<double>(f[10], where, "theta_hat");
        r.theta_hat_star = require_number<double>(f[11], where, "theta_hat_star");
        r.elapsed_ms = require_number<double>(f[12], where, "elapsed_ms");
        r.evaluations = require_number<std::size_t>(f[13], where, "evaluations");
        r.stooges = f[14];
        decode_stooges(r.stooges);
        out.push_back(std::move(r));
    }
    if (!header_seen) throw DataError(source + ": missing CSV header");
    return out;
}

void write_records(const fs::path& path, const std::vector<ExperimentRecord>& records) {
    auto out = open_out(path);
    write_records(out, records);
}

void append_records(const fs::path& path, const std::vector<ExperimentRecord>& records) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    if (fresh) {
        write_records(path, records);
        return;
    }
    std::ostringstream buf;
    write_records(buf, records);
    const std::string text = buf.str();
    auto out = open_out(path, std::ios::app);
    out << std::string_view(text).substr(text.find('\n') + 1);
}

std::vector<ExperimentRecord> read_records(const fs::path& path) {
    auto in = open_in(path);
    return read_records(in, path.string());
}

std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw DataError(location(path.string(), lineno) + "expected 'key = value'");
        }
        auto key = trim(view.substr(0, eq));
        auto value = trim(view.substr(eq + 1));
        if (key.empty()) throw DataError(location(path.string(), lineno) + "empty key");
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

} // namespace fj::io

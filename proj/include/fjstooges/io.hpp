#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fjstooges/graph.hpp"
#include "fjstooges/selection.hpp"

namespace fj::io {

namespace fs = std::filesystem;

// Edge list: first line "n m", then m lines "u v" (0-based). Blank lines and
// lines starting with '#' are skipped. Duplicates collapse, self-loops are rejected.
UndirectedGraph read_edge_list(std::istream& in, const std::string& source = "<stream>");
UndirectedGraph load_edge_list(const fs::path& path);
void write_edge_list(std::ostream& out, const UndirectedGraph& g);
void save_edge_list(const fs::path& path, const UndirectedGraph& g);

enum class OpinionScale { ZeroTen, Unit };

/// One decimal per line. ZeroTen divides by 10. Values are clamped to [0, 1]
/// with a warning on stderr. If expected_count is set, a different count is an error.
std::vector<double> load_opinions(const fs::path& path, OpinionScale scale,
                                  std::optional<std::size_t> expected_count = std::nullopt);
std::vector<double> read_opinions(std::istream& in, OpinionScale scale, const std::string& source = "<stream>");

/// One nonnegative integer per line.
std::vector<std::uint64_t> load_tweet_counts(const fs::path& path,
                                             std::optional<std::size_t> expected_count = std::nullopt);

/// Resistance drawn from the bucket of the user's tweet count:
/// [0,5] -> U(0.4,0.6), (5,10] -> U(0.5,0.7), (10,20] -> U(0.6,0.8), >20 -> U(0.7,0.9).
double resistance_from_tweets(std::uint64_t tweets, std::mt19937_64& rng);
std::vector<double> resistances_from_tweets(const std::vector<std::uint64_t>& tweets, std::uint64_t seed);

struct DatasetBundle {
    UndirectedGraph graph;
    std::vector<double> opinions;
    std::optional<std::vector<std::uint64_t>> tweet_counts;
};

DatasetBundle load_dataset(const fs::path& edges, const fs::path& opinions, OpinionScale scale,
                           const std::optional<fs::path>& tweet_counts = std::nullopt);

/// W from the graph; alpha from tweet counts when present (seeded), otherwise uniform.
OpinionInstance instance_from_dataset(const DatasetBundle& bundle, std::uint64_t seed, double default_resistance);

// Instance file:
//   fj-instance 1
//   n nnz
//   alpha_v s_v        (n lines)
//   u v w_uv           (nnz lines)
void write_instance(std::ostream& out, const OpinionInstance& inst);
OpinionInstance read_instance(std::istream& in, const std::string& source = "<stream>");
void save_instance(const fs::path& path, const OpinionInstance& inst);
OpinionInstance load_instance(const fs::path& path);

/// One value per line, 17 significant digits.
void save_vector(const fs::path& path, const std::vector<double>& values);

struct ExperimentRecord {
    std::string run_id;
    std::string dataset;
    std::string algorithm;
    std::string objective;
    std::string direction;
    std::size_t k_step = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;
    double polarization = 0.0;
    double bias_sq = 0.0;
    double theta_hat = 0.0;
    double theta_hat_star = 0.0;
    double elapsed_ms = 0.0;
    std::size_t evaluations = 0;
    std::string stooges;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "run_id,dataset,algorithm,objective,direction,k_step,seed,mse,polarization,bias_sq,theta_hat,"
    "theta_hat_star,elapsed_ms,evaluations,stooges";

/// "%.12g".
std::string format_real(double x);

/// "17:1;42:0".
std::string encode_stooges(const StoogeAssignment& a);
StoogeAssignment decode_stooges(std::string_view text);

void write_records(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records(std::istream& in, const std::string& source = "<stream>");

/// Overwrites path with header plus records.
void write_records(const fs::path& path, const std::vector<ExperimentRecord>& records);
/// Appends rows, writing the header first if the file is missing or empty.
void append_records(const fs::path& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records(const fs::path& path);

/// Flat "key = value" config. '#' starts a comment; blank lines are skipped.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path);

} // namespace fj::io

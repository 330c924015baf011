#pragma once

#include "kikuchi/decompose.hpp"
#include "kikuchi/kikuchi_graph.hpp"
#include "kikuchi/prune.hpp"
#include "kikuchi/refute.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace kikuchi {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "kikuchi";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCertificateSchema = "kikuchi-certificate/1";

/// Unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed JSON with the wrong shape or values.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Files use 1-based vertex, hypergraph and label indices throughout.

[[nodiscard]] Json to_json(const XorInstance& inst);
[[nodiscard]] XorInstance instance_from_json(const Json& j);

[[nodiscard]] Json to_json(const BipartiteXorInstance& inst);
[[nodiscard]] BipartiteXorInstance bipartite_from_json(const Json& j);

[[nodiscard]] Json to_json(const LinearCode& code);
[[nodiscard]] LinearCode code_from_json(const Json& j);

[[nodiscard]] Json to_json(const Thresholds& thr);
[[nodiscard]] Json to_json(const DecomposedInstance& dec, const Thresholds& thr);
[[nodiscard]] DecomposedInstance decomposition_from_json(const Json& j);

[[nodiscard]] Json to_json(const PruneReport& r, const Rational& gamma);
[[nodiscard]] PruneReport prune_report_from_json(const Json& j);

/// Edge list {variant, spaces, edges: [[left_rank, right_rank, label], ...]}.
[[nodiscard]] Json graph_to_json(const KikuchiGraph& g);

[[nodiscard]] Json to_json(const Certificate& cert);
[[nodiscard]] Certificate certificate_from_json(const Json& j);

/// "8", "5/2" or a finite decimal such as "2.5".
[[nodiscard]] Rational parse_rational(const std::string& s);
[[nodiscard]] std::string to_string(const Rational& r);

/// Top-level keys one per line; arrays of arrays (hypergraphs, per-sign
/// records) one element per line. Parsing is ordinary JSON.
[[nodiscard]] std::string dump_lines(const Json& j);

[[nodiscard]] Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Wraps a payload as {tool, config, seed, <payload keys>, metadata}. The
/// metadata field holds the timestamp and is the only run-dependent part.
[[nodiscard]] Json envelope(const Json& payload, const Json& config, std::uint64_t seed, bool timestamp);

/// Drops the envelope's metadata field (for byte comparisons).
[[nodiscard]] Json strip_metadata(Json j);

} // namespace kikuchi

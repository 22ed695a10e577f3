#pragma once

// JSON graph files.
//
//   {"directed": bool, "sink": id, "source": id (optional),
//    "nodes": [{"id": id, "x": real, "y": real}, ...],
//    "edges": [{"u": id, "v": id, "p": real}, ...]}
//
// Interval files give "p_lo" and "p_hi" instead of "p" on every edge. Node ids
// may be integers or strings; they are mapped to dense ids in the order of the
// "nodes" array. Serialization is canonical: sorted keys, edges sorted by
// (u, v), reals printed with 17 significant digits.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel {

struct EdgeRecord {
    NodeId u = 0;
    NodeId v = 0;
    double p = 0.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
};

struct GraphFile {
    bool directed = true;
    bool interval = false;
    NodeId sink = 0;
    std::optional<NodeId> source;
    std::vector<std::optional<Position>> positions;  // one entry per node
    std::vector<EdgeRecord> edges;

    int node_count() const noexcept { return static_cast<int>(positions.size()); }

    ConnectivityGraph to_connectivity() const;
    Dodag to_dodag() const;
    IntervalGraph to_interval() const;

    static GraphFile from(const ConnectivityGraph& g, NodeId sink);
    static GraphFile from(const Dodag& g);
    static GraphFile from(const IntervalGraph& g);
};

GraphFile parse_graph_file(std::string_view text);
std::string serialize_graph_file(const GraphFile& file);

GraphFile read_graph_file(const std::filesystem::path& path);
void write_graph_file(const std::filesystem::path& path, const GraphFile& file);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// printf-style %.{digits}g.
std::string format_real(double value, int digits);

}  // namespace meshrel

#include "meshrel/graph_file.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace meshrel {

using nlohmann::json;

std::string format_real(double value, int digits) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    return fmt::format("{:.{}g}", value, digits);
}

namespace {

[[noreturn]] void bad_file(const std::string& what) {
    throw Error(ErrorCode::validation, "graph file: " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) bad_file(fmt::format("{} is missing \"{}\"", where, key));
    return *it;
}

double real_field(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number()) bad_file(fmt::format("{}: \"{}\" must be a number", where, key));
    return v.get<double>();
}

std::string label_of(const json& id, const std::string& where) {
    if (id.is_number_integer() || id.is_string()) return id.dump();
    bad_file(fmt::format("{}: ids must be integers or strings", where));
}

}  // namespace

GraphFile parse_graph_file(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        bad_file(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad_file("top level must be an object");

    GraphFile file;
    const auto& directed = field(doc, "directed", "document");
    if (!directed.is_boolean()) bad_file("\"directed\" must be true or false");
    file.directed = directed.get<bool>();

    const auto& nodes = field(doc, "nodes", "document");
    if (!nodes.is_array()) bad_file("\"nodes\" must be an array");
    std::map<std::string, NodeId> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto where = fmt::format("node #{}", i);
        const auto& node = nodes[i];
        if (!node.is_object()) bad_file(where + " must be an object");
        const auto label = label_of(field(node, "id", where), where);
        if (!index.emplace(label, static_cast<NodeId>(i)).second) {
            bad_file(fmt::format("duplicate node id {}", label));
        }
        const bool has_x = node.contains("x");
        if (has_x != node.contains("y")) bad_file(where + " must give both x and y or neither");
        if (has_x) {
            file.positions.emplace_back(Position{real_field(node, "x", where), real_field(node, "y", where)});
        } else {
            file.positions.emplace_back();
        }
    }

    auto lookup = [&](const json& id, const std::string& where) {
        const auto it = index.find(label_of(id, where));
        if (it == index.end()) bad_file(fmt::format("{} refers to unknown node {}", where, id.dump()));
        return it->second;
    };

    file.sink = lookup(field(doc, "sink", "document"), "sink");
    if (doc.contains("source") && !doc["source"].is_null()) file.source = lookup(doc["source"], "source");

    const auto& edges = field(doc, "edges", "document");
    if (!edges.is_array()) bad_file("\"edges\" must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto where = fmt::format("edge #{}", i);
        const auto& e = edges[i];
        if (!e.is_object()) bad_file(where + " must be an object");
        EdgeRecord rec;
        rec.u = lookup(field(e, "u", where), where);
        rec.v = lookup(field(e, "v", where), where);
        const bool is_interval = e.contains("p_lo") || e.contains("p_hi");
        if (i == 0) file.interval = is_interval;
        if (is_interval != file.interval) bad_file("edges mix point and interval probabilities");
        if (is_interval) {
            if (e.contains("p")) bad_file(where + " gives both p and p_lo/p_hi");
            rec.p_lo = real_field(e, "p_lo", where);
            rec.p_hi = real_field(e, "p_hi", where);
        } else {
            rec.p = real_field(e, "p", where);
        }
        file.edges.push_back(rec);
    }
    if (file.interval && !file.directed) bad_file("interval probabilities require a directed graph");
    return file;
}

std::string serialize_graph_file(const GraphFile& file) {
    constexpr int digits = 17;
    auto edges = file.edges;
    std::sort(edges.begin(), edges.end(), [&](const EdgeRecord& a, const EdgeRecord& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });

    std::string out = "{\n";
    out += fmt::format("  \"directed\": {},\n", file.directed ? "true" : "false");
    out += "  \"edges\": [";
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        out += i == 0 ? "\n" : ",\n";
        if (file.interval) {
            out += fmt::format("    {{\"p_hi\": {}, \"p_lo\": {}, \"u\": {}, \"v\": {}}}",
                               format_real(e.p_hi, digits), format_real(e.p_lo, digits), e.u, e.v);
        } else {
            out += fmt::format("    {{\"p\": {}, \"u\": {}, \"v\": {}}}", format_real(e.p, digits), e.u, e.v);
        }
    }
    out += edges.empty() ? "],\n" : "\n  ],\n";
    out += "  \"nodes\": [";
    for (std::size_t i = 0; i < file.positions.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        if (const auto& pos = file.positions[i]) {
            out += fmt::format("    {{\"id\": {}, \"x\": {}, \"y\": {}}}", i, format_real(pos->x, digits),
                               format_real(pos->y, digits));
        } else {
            out += fmt::format("    {{\"id\": {}}}", i);
        }
    }
    out += file.positions.empty() ? "],\n" : "\n  ],\n";
    out += fmt::format("  \"sink\": {}", file.sink);
    if (file.source) out += fmt::format(",\n  \"source\": {}", *file.source);
    out += "\n}\n";
    return out;
}

ConnectivityGraph GraphFile::to_connectivity() const {
    if (directed) bad_file("expected an undirected connectivity graph, got a directed one");
    std::vector<UndirectedEdge> list;
    list.reserve(edges.size());
    for (const auto& e : edges) list.push_back({e.u, e.v, e.p});
    return ConnectivityGraph(node_count(), std::move(list), positions);
}

Dodag GraphFile::to_dodag() const {
    if (!directed) bad_file("expected a directed routing topology, got an undirected graph");
    if (interval) bad_file("expected point probabilities, got intervals");
    std::vector<DirectedEdge> list;
    list.reserve(edges.size());
    for (const auto& e : edges) list.push_back({e.u, e.v, e.p});
    return Dodag(node_count(), std::move(list), sink, source);
}

IntervalGraph GraphFile::to_interval() const {
    if (!directed) bad_file("expected a directed routing topology, got an undirected graph");
    std::vector<IntervalEdge> list;
    list.reserve(edges.size());
    for (const auto& e : edges) {
        list.push_back(interval ? IntervalEdge{e.u, e.v, e.p_lo, e.p_hi} : IntervalEdge{e.u, e.v, e.p, e.p});
    }
    return IntervalGraph(node_count(), std::move(list), sink, source);
}

GraphFile GraphFile::from(const ConnectivityGraph& g, NodeId sink) {
    GraphFile file;
    file.directed = false;
    file.sink = sink;
    file.positions = g.positions();
    for (const auto& e : g.edges()) file.edges.push_back({e.u, e.v, e.p, 0.0, 0.0});
    return file;
}

GraphFile GraphFile::from(const Dodag& g) {
    GraphFile file;
    file.sink = g.sink();
    file.source = g.source();
    file.positions.resize(static_cast<std::size_t>(g.node_count()));
    for (const auto& e : g.edges()) file.edges.push_back({e.from, e.to, e.p, 0.0, 0.0});
    return file;
}

GraphFile GraphFile::from(const IntervalGraph& g) {
    GraphFile file;
    file.interval = true;
    file.sink = g.sink();
    file.source = g.source();
    file.positions.resize(static_cast<std::size_t>(g.node_count()));
    for (const auto& e : g.edges()) file.edges.push_back({e.from, e.to, 0.0, e.p_lo, e.p_hi});
    return file;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, fmt::format("cannot open {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::io, fmt::format("error reading {}", path.string()));
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, fmt::format("cannot write {}", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorCode::io, fmt::format("error writing {}", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::io, fmt::format("cannot move output into place at {}", path.string()));
    }
}

GraphFile read_graph_file(const std::filesystem::path& path) {
    return parse_graph_file(read_text_file(path));
}

void write_graph_file(const std::filesystem::path& path, const GraphFile& file) {
    write_file_atomic(path, serialize_graph_file(file));
}

}  // namespace meshrel

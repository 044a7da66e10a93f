#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trackfind/io.hpp"

namespace trackfind {

namespace {

void append_double(std::string& out, double value, int significant_digits = 0) {
    std::array<char, 64> buf;
    const auto result =
        significant_digits > 0
            ? std::to_chars(buf.data(), buf.data() + buf.size(), value,
                            std::chars_format::general, significant_digits)
            : std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), result.ptr);
}

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

// Significant lines only: blank lines and '#' comments are dropped.
std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream stream(text);
    std::string raw;
    int number = 0;
    while (std::getline(stream, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string token;
        while (ls >> token) line.tokens.push_back(token);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("parse error at line " + std::to_string(line) + ": " + what);
}

int parse_int(const Line& line, std::size_t token) {
    const std::string& s = line.tokens[token];
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        parse_fail(line.number, "expected an integer, got '" + s + "'");
    }
    return value;
}

double parse_double(const Line& line, std::size_t token) {
    const std::string& s = line.tokens[token];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        parse_fail(line.number, "expected a number, got '" + s + "'");
    }
    return value;
}

const Line& expect(const std::vector<Line>& lines, std::size_t cursor, const char* context) {
    if (cursor >= lines.size()) {
        const int line = lines.empty() ? 1 : lines.back().number + 1;
        parse_fail(line, std::string("unexpected end of file, expected ") + context);
    }
    return lines[cursor];
}

const Line& expect_section(const std::vector<Line>& lines, std::size_t cursor,
                           const char* keyword) {
    const Line& line = expect(lines, cursor, keyword);
    if (line.tokens.size() != 2 || line.tokens[0] != keyword) {
        parse_fail(line.number, std::string("expected '") + keyword + " <count>'");
    }
    return line;
}

}  // namespace

std::string format_instance(const Instance& inst) {
    std::string out;
    out.reserve(64 * (inst.hits.size() + inst.segments.size() + inst.triplets.size()) + 128);
    out += "TRACKFIND 1\n";
    out += "LAYERS " + std::to_string(inst.num_layers) + "\n";
    out += "HITS " + std::to_string(inst.num_hits()) + "\n";
    for (const Hit& h : inst.hits) {
        out += std::to_string(h.id) + " " + std::to_string(h.layer);
        for (int axis = 0; axis < 3; ++axis) {
            out += ' ';
            append_double(out, h.position[axis]);
        }
        out += '\n';
    }
    out += "SEGMENTS " + std::to_string(inst.num_segments()) + "\n";
    for (const Segment& s : inst.segments) {
        out += std::to_string(s.from) + " " + std::to_string(s.to) + "\n";
    }
    out += "TRIPLETS " + std::to_string(inst.triplets.size()) + "\n";
    for (const Triplet& t : inst.triplets) {
        out += std::to_string(t.i) + " " + std::to_string(t.j) + " " + std::to_string(t.k) + " ";
        append_double(out, t.cost, 17);
        out += '\n';
    }
    if (inst.has_truth()) {
        out += "TRUTH " + std::to_string(inst.truth.size()) + "\n";
        for (const auto& track : inst.truth) {
            for (std::size_t p = 0; p < track.size(); ++p) {
                if (p) out += ' ';
                out += std::to_string(track[p]);
            }
            out += '\n';
        }
    }
    return out;
}

void write_instance(const Instance& inst, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::string text = format_instance(inst);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

Instance parse_instance(const std::string& text) {
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) parse_fail(1, "empty file");
    const Line& magic = lines[0];
    if (magic.tokens[0] != "TRACKFIND") {
        return parse_triplet_table(text);
    }
    if (magic.tokens.size() != 2 || magic.tokens[1] != "1") {
        parse_fail(magic.number, "unsupported instance format version (expected TRACKFIND 1)");
    }

    Instance inst;
    std::size_t cursor = 1;

    const Line& layers = expect_section(lines, cursor++, "LAYERS");
    inst.num_layers = parse_int(layers, 1);

    const Line& hits = expect_section(lines, cursor++, "HITS");
    const int num_hits = parse_int(hits, 1);
    inst.hits.reserve(static_cast<std::size_t>(std::max(num_hits, 0)));
    for (int i = 0; i < num_hits; ++i) {
        const Line& line = expect(lines, cursor++, "a hit line 'id layer x y z'");
        if (line.tokens.size() != 5) parse_fail(line.number, "expected 'id layer x y z'");
        Hit h;
        h.id = parse_int(line, 0);
        h.layer = parse_int(line, 1);
        h.position = Vec3(parse_double(line, 2), parse_double(line, 3), parse_double(line, 4));
        inst.hits.push_back(h);
    }

    const Line& segments = expect_section(lines, cursor++, "SEGMENTS");
    const int num_segments = parse_int(segments, 1);
    for (int i = 0; i < num_segments; ++i) {
        const Line& line = expect(lines, cursor++, "a segment line 'from to'");
        if (line.tokens.size() != 2) parse_fail(line.number, "expected 'from to'");
        Segment s;
        s.from = parse_int(line, 0);
        s.to = parse_int(line, 1);
        if (s.from < 1 || s.from > num_hits || s.to < 1 || s.to > num_hits) {
            parse_fail(line.number, "segment endpoint out of range");
        }
        s.length = segment_length(inst.hit(s.from).position, inst.hit(s.to).position);
        inst.segments.push_back(s);
    }

    const Line& triplets = expect_section(lines, cursor++, "TRIPLETS");
    const int num_triplets = parse_int(triplets, 1);
    for (int i = 0; i < num_triplets; ++i) {
        const Line& line = expect(lines, cursor++, "a triplet line 'i j k cost'");
        if (line.tokens.size() != 4) parse_fail(line.number, "expected 'i j k cost'");
        Triplet t;
        t.i = parse_int(line, 0);
        t.j = parse_int(line, 1);
        t.k = parse_int(line, 2);
        t.cost = parse_double(line, 3);
        if (t.i < 1 || t.i > num_hits || t.j < 1 || t.j > num_hits || t.k < 1 || t.k > num_hits) {
            parse_fail(line.number, "triplet hit id out of range");
        }
        t.turn_cosine = turning_cosine(inst.hit(t.i).position, inst.hit(t.j).position,
                                       inst.hit(t.k).position);
        inst.triplets.push_back(t);
    }

    if (cursor < lines.size() && lines[cursor].tokens[0] == "TRUTH") {
        const Line& truth = expect_section(lines, cursor++, "TRUTH");
        const int num_tracks = parse_int(truth, 1);
        for (int i = 0; i < num_tracks; ++i) {
            const Line& line = expect(lines, cursor++, "a truth track line");
            std::vector<int> track;
            track.reserve(line.tokens.size());
            for (std::size_t t = 0; t < line.tokens.size(); ++t) track.push_back(parse_int(line, t));
            inst.truth.push_back(std::move(track));
        }
    }
    if (cursor < lines.size()) {
        parse_fail(lines[cursor].number, "unexpected trailing content");
    }

    try {
        validate_instance(inst);
    } catch (const std::exception& e) {
        throw std::runtime_error("parse error: " + std::string(e.what()));
    }
    return inst;
}

Instance read_instance(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_instance(buffer.str());
}

Instance parse_triplet_table(const std::string& text) {
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) parse_fail(1, "empty file");

    struct RawTriplet {
        int i, j, k;
        double cost;
    };
    std::vector<RawTriplet> raw;
    raw.reserve(lines.size());
    std::set<int> ids;
    for (const Line& line : lines) {
        if (line.tokens.size() != 4) {
            parse_fail(line.number, "not a triplet table: expected 'i j k cost'");
        }
        RawTriplet t{parse_int(line, 0), parse_int(line, 1), parse_int(line, 2),
                     parse_double(line, 3)};
        if (t.i < 1 || t.j < 1 || t.k < 1 || t.i == t.j || t.j == t.k || t.i == t.k) {
            parse_fail(line.number, "triplet ids must be positive and distinct");
        }
        ids.insert({t.i, t.j, t.k});
        raw.push_back(t);
    }

    std::map<int, int> dense;  // original id -> dense id
    for (int id : ids) dense.emplace(id, static_cast<int>(dense.size()) + 1);
    const int n = static_cast<int>(dense.size());

    std::set<std::pair<int, int>> segment_pairs;
    for (const RawTriplet& t : raw) {
        segment_pairs.emplace(dense.at(t.i), dense.at(t.j));
        segment_pairs.emplace(dense.at(t.j), dense.at(t.k));
    }

    // Layer = longest chain of segments ending at the hit; the listing is a
    // DAG for any layered detector, so a cycle means the heuristic does not
    // apply.
    std::vector<std::vector<int>> preds(static_cast<std::size_t>(n) + 1);
    for (const auto& [from, to] : segment_pairs) {
        preds[static_cast<std::size_t>(to)].push_back(from);
    }
    std::vector<int> layer(static_cast<std::size_t>(n) + 1, 0);
    // Longest-path labeling by iterating until fixpoint; n rounds bound the
    // longest chain, one extra pass detects cycles.
    for (int round = 0; round <= n; ++round) {
        bool advanced = false;
        for (int h = 1; h <= n; ++h) {
            int depth = 1;
            for (int p : preds[static_cast<std::size_t>(h)]) {
                depth = std::max(depth, layer[static_cast<std::size_t>(p)] + 1);
            }
            if (depth > layer[static_cast<std::size_t>(h)]) {
                layer[static_cast<std::size_t>(h)] = depth;
                advanced = true;
            }
        }
        if (!advanced) break;
        if (round == n) parse_fail(lines.front().number, "triplet table contains a cycle");
    }

    Instance inst;
    inst.num_layers = *std::max_element(layer.begin() + 1, layer.end());
    std::vector<int> per_layer(static_cast<std::size_t>(inst.num_layers) + 1, 0);
    inst.hits.reserve(static_cast<std::size_t>(n));
    for (int h = 1; h <= n; ++h) {
        const int l = layer[static_cast<std::size_t>(h)];
        // Placeholder coordinates: layer plane along x, slot along y.
        inst.hits.push_back(
            {h, l, Vec3(100.0 * l, 100.0 * per_layer[static_cast<std::size_t>(l)]++, 0.0)});
    }
    inst.segments.reserve(segment_pairs.size());
    for (const auto& [from, to] : segment_pairs) {
        if (inst.hit(to).layer - inst.hit(from).layer > 3) {
            parse_fail(lines.front().number, "implied segment skips more than two layers");
        }
        inst.segments.push_back(
            {from, to, segment_length(inst.hit(from).position, inst.hit(to).position)});
    }
    std::sort(inst.segments.begin(), inst.segments.end(), [](const Segment& a, const Segment& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    inst.triplets.reserve(raw.size());
    for (const RawTriplet& t : raw) {
        inst.triplets.push_back({dense.at(t.i), dense.at(t.j), dense.at(t.k), 0.0, t.cost});
    }
    std::sort(inst.triplets.begin(), inst.triplets.end(), [](const Triplet& a, const Triplet& b) {
        if (a.i != b.i) return a.i < b.i;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    return inst;
}

}  // namespace trackfind

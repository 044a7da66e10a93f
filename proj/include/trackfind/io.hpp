#pragma once

#include <string>

#include "trackfind/instance.hpp"

namespace trackfind {

/// Serializes an instance to the TRACKFIND 1 text layout. Coordinates are
/// printed as shortest round-trip decimals and costs with 17 significant
/// digits, so writing the same instance always produces identical bytes and
/// parsing them back restores the exact doubles.
std::string format_instance(const Instance& inst);

void write_instance(const Instance& inst, const std::string& path);

/// Parses TRACKFIND 1 text. Errors carry the offending line number. When
/// the magic line is absent the parser falls back to the bare triplet-table
/// reader below.
Instance parse_instance(const std::string& text);

Instance read_instance(const std::string& path);

/// Best-effort ingestion of a foreign listing in which every significant
/// line is "i j k cost": hit ids with a chained-pair cost. Hits get dense
/// ids, layers inferred from longest paths over the implied segments, and
/// placeholder coordinates; the file's costs are kept verbatim. No ground
/// truth, so such instances only support model building and solving.
Instance parse_triplet_table(const std::string& text);

}  // namespace trackfind

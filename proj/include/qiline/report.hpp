#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qiline/actions.hpp"
#include "qiline/generators.hpp"
#include "qiline/ordering.hpp"

namespace qiline::report {

using Json = nlohmann::ordered_json;

/// A JSON number; binary128 values outside the double range become decimal
/// strings, which common JSON parsers would otherwise reject.
Json number(Wide x);
Json number(double x);

/// Serializes with every float at 17 significant digits.
std::string dump(const Json& j, int indent = 2);

std::string fnv1a64_hex(std::string_view data);

/// Writes dir/<stem>-<hash>.<ext> and returns the path.
std::filesystem::path write_artifact(const std::filesystem::path& dir, const std::string& stem,
                                     const std::string& hash, const std::string& ext,
                                     const std::string& content);

Json to_json(const SampleGrid& g);
Json to_json(const RelationReport& r);
Json to_json(const DriftClass& d);
Json to_json(const DistanceVerdict& v);
Json to_json(const QIEstimate& q);
Json to_json(const WitnessSequence& w);
Json to_json(const SignAssignment& a, const std::vector<MapExpr>& fs);
Json to_json(const IndependenceResult& r);
Json to_json(const EscapeResult& r);
Json to_json(const ObstructionReport& r);

}  // namespace qiline::report

#pragma once

#include "wnorm/characteristics.hpp"
#include "wnorm/experiments.hpp"
#include "wnorm/laws.hpp"
#include "wnorm/operators.hpp"
#include "wnorm/weights.hpp"

#include "json.hpp"

#include <string>

namespace wnorm {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "wnorm 0.1.0";

// Parse errors report origin:line:column.
Json parse_json_text(const std::string& text, const std::string& origin = "<input>");
Json load_json_file(const std::string& path);
GridFunction load_grid_csv(const std::string& path);

// Numbers or rational strings ("-1/2").
double json_real(const Json& j, const std::string& key);

WeightPtr weight_from_json(const Json& j, const std::string& base_dir = ".");
MeasurePtr measure_from_json(const Json& j, const std::string& base_dir = ".");
Json to_json(const WeightSpec& w);
Json to_json(const MeasureSpec& mu);

// JSON has no infinities: non-finite values become "inf", "-inf" or "nan".
Json num(double v);

Json to_json(const Real& r);
Json to_json(const ProductIndices& idx);
Json to_json(const Condition& c);
Json to_json(const Verdict& v);
Json to_json(const Cube& c);
Json to_json(const Rectangle& r);
Json to_json(const CharacteristicReport& r);
Json to_json(const ShellSum& s);
Json to_json(const DiracNorm& d);
Json to_json(const ReverseDoubling& r);
Json to_json(const EquivalenceReport& r);
Json to_json(const TestingReport& r);
Json to_json(const MaximalValue& m);
Json to_json(const NormBound& b);
Json to_json(const SimpleReport& r);
Json to_json(const SimpleGrowth& g);
Json to_json(const HalfReport& r);
Json to_json(const SandwichDecomposition& d);
Json to_json(const ExponentFit& f);
Json to_json(const OneTailedReport& r);

}  // namespace wnorm

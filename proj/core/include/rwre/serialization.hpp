#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwre/environment.hpp"
#include "rwre/gibbs.hpp"
#include "rwre/lattice.hpp"
#include "rwre/path_stats.hpp"
#include "rwre/transition.hpp"

namespace rwre {

using Json = nlohmann::json;

/// Read-only view of a JSON value that knows its location, so schema errors
/// name the offending path ("/model/letters/1/probs").
class JsonNode {
 public:
  JsonNode(const Json& value, std::string path = "");

  bool has(std::string_view key) const;
  JsonNode operator[](std::string_view key) const;
  JsonNode operator[](std::size_t index) const;
  std::size_t size() const;

  double as_double() const;
  std::int64_t as_int() const;
  std::uint64_t as_uint64() const;
  std::string as_string() const;
  bool as_bool() const;
  std::vector<double> as_doubles() const;
  std::vector<std::int64_t> as_ints() const;

  double get_or(std::string_view key, double fallback) const;
  std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const;

  const Json& raw() const { return *value_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  const Json* value_;
  std::string path_;
};

Json point_to_json(const Point& p, int dim);
Point point_from_json(const JsonNode& node, int dim);
Json vec_to_json(const Vec& v, int dim);
Vec vec_from_json(const JsonNode& node, int dim);

Json transition_to_json(const TransitionVector& v, int dim);
TransitionVector transition_from_json(const JsonNode& node, int dim);

/// Explicit form: {"dim", "range", "beta", "alphabet", "prior", "interaction"}.
/// The shorthand {"ising": {"coupling", "field"}} replaces "interaction".
Json gibbs_to_json(const GibbsSpec& spec);
GibbsSpec gibbs_from_json(const JsonNode& node);

Json model_to_json(const EnvironmentModel& model);
EnvironmentModel model_from_json(const JsonNode& node);

Json constants_to_json(const MixingConstants& c);
MixingConstants constants_from_json(const JsonNode& node);

/// Alphabet text format: one letter per line, "w=<weight> <offset>:<prob> ...",
/// offsets written as comma-separated coordinates; '#' starts a comment.
std::vector<std::pair<double, TransitionVector>> parse_alphabet(std::string_view text, int dim);

/// Sorted keys, no whitespace.
std::string canonical_dump(const Json& value);

std::string sha256_hex(std::string_view bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace rwre

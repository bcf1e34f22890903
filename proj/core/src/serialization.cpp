#include "rwre/serialization.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rwre/errors.hpp"

namespace rwre {

JsonNode::JsonNode(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

void JsonNode::fail(const std::string& what) const {
  throw ConfigError("config " + (path_.empty() ? std::string("/") : path_) + ": " + what);
}

bool JsonNode::has(std::string_view key) const {
  return value_->is_object() && value_->contains(std::string(key));
}

JsonNode JsonNode::operator[](std::string_view key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(std::string(key));
  if (it == value_->end()) JsonNode(*value_, path_ + "/" + std::string(key)).fail("missing field");
  return JsonNode(*it, path_ + "/" + std::string(key));
}

JsonNode JsonNode::operator[](std::size_t index) const {
  if (!value_->is_array()) fail("expected an array");
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return JsonNode((*value_)[index], path_ + "/" + std::to_string(index));
}

std::size_t JsonNode::size() const {
  if (!value_->is_array()) fail("expected an array");
  return value_->size();
}

double JsonNode::as_double() const {
  if (!value_->is_number()) fail("expected a number");
  return value_->get<double>();
}

std::int64_t JsonNode::as_int() const {
  if (value_->is_number_integer()) return value_->get<std::int64_t>();
  if (value_->is_number_float()) {
    const double d = value_->get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  fail("expected an integer");
}

std::uint64_t JsonNode::as_uint64() const {
  if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
  if (value_->is_number_integer() && value_->get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(value_->get<std::int64_t>());
  fail("expected a non-negative integer");
}

std::string JsonNode::as_string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

bool JsonNode::as_bool() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

std::vector<double> JsonNode::as_doubles() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].as_double());
  return out;
}

std::vector<std::int64_t> JsonNode::as_ints() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].as_int());
  return out;
}

double JsonNode::get_or(std::string_view key, double fallback) const {
  return has(key) ? (*this)[key].as_double() : fallback;
}

std::int64_t JsonNode::get_int_or(std::string_view key, std::int64_t fallback) const {
  return has(key) ? (*this)[key].as_int() : fallback;
}

Json point_to_json(const Point& p, int dim) {
  Json out = Json::array();
  for (int i = 0; i < dim; ++i) out.push_back(p[static_cast<std::size_t>(i)]);
  return out;
}

Point point_from_json(const JsonNode& node, int dim) {
  if (node.raw().is_number() && dim == 1) return Point(node.as_int());
  if (node.size() != static_cast<std::size_t>(dim))
    node.fail("expected " + std::to_string(dim) + " coordinates");
  Point p;
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = node[static_cast<std::size_t>(i)].as_int();
  return p;
}

Json vec_to_json(const Vec& v, int dim) {
  Json out = Json::array();
  for (int i = 0; i < dim; ++i) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

Vec vec_from_json(const JsonNode& node, int dim) {
  if (node.raw().is_number() && dim == 1) return Vec{node.as_double(), 0.0, 0.0};
  if (node.size() != static_cast<std::size_t>(dim))
    node.fail("expected " + std::to_string(dim) + " components");
  Vec v{};
  for (int i = 0; i < dim; ++i)
    v[static_cast<std::size_t>(i)] = node[static_cast<std::size_t>(i)].as_double();
  return v;
}

Json transition_to_json(const TransitionVector& v, int dim) {
  Json offsets = Json::array();
  for (const auto& e : v.offsets) offsets.push_back(point_to_json(e, dim));
  return Json{{"offsets", offsets}, {"probs", v.probs}};
}

TransitionVector transition_from_json(const JsonNode& node, int dim) {
  TransitionVector v;
  if (node.has("p")) {
    if (dim != 1) node.fail("shorthand {\"p\": ...} is one-dimensional");
    return nearest_neighbor_1d(node["p"].as_double());
  }
  const auto offsets = node["offsets"];
  for (std::size_t i = 0; i < offsets.size(); ++i) v.offsets.push_back(point_from_json(offsets[i], dim));
  v.probs = node["probs"].as_doubles();
  if (v.probs.size() != v.offsets.size()) node.fail("offsets and probs differ in length");
  return v;
}

Json gibbs_to_json(const GibbsSpec& spec) {
  Json alphabet = Json::array();
  for (const auto& a : spec.alphabet) alphabet.push_back(transition_to_json(a, spec.dim));
  Json terms = Json::array();
  for (const auto& t : spec.interaction) {
    Json shape = Json::array();
    for (const auto& s : t.shape) shape.push_back(point_to_json(s, spec.dim));
    terms.push_back(Json{{"shape", shape}, {"energy", t.energy}});
  }
  return Json{{"dim", spec.dim},        {"range", spec.range},      {"beta", spec.beta},
              {"alphabet", alphabet},   {"prior", spec.prior},      {"interaction", terms}};
}

GibbsSpec gibbs_from_json(const JsonNode& node) {
  const int dim = static_cast<int>(node.get_int_or("dim", 1));
  std::vector<TransitionVector> alphabet;
  const auto letters = node["alphabet"];
  for (std::size_t i = 0; i < letters.size(); ++i)
    alphabet.push_back(transition_from_json(letters[i], dim));
  std::vector<double> prior;
  if (node.has("prior")) prior = node["prior"].as_doubles();
  const double beta = node["beta"].as_double();

  GibbsSpec spec;
  if (node.has("ising")) {
    const auto ising = node["ising"];
    spec = ising_spec(dim, std::move(alphabet), ising.get_or("coupling", 1.0),
                      ising.get_or("field", 0.0), beta, std::move(prior));
  } else {
    spec.dim = dim;
    spec.alphabet = std::move(alphabet);
    spec.prior = std::move(prior);
    spec.beta = beta;
    spec.range = node.get_int_or("range", 1);
    const auto terms = node["interaction"];
    for (std::size_t i = 0; i < terms.size(); ++i) {
      InteractionTerm t;
      const auto shape = terms[i]["shape"];
      for (std::size_t k = 0; k < shape.size(); ++k) t.shape.push_back(point_from_json(shape[k], dim));
      t.energy = terms[i]["energy"].as_doubles();
      spec.interaction.push_back(std::move(t));
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    node.fail(e.what());
  }
  return spec;
}

namespace {

Json letters_to_json(const std::vector<TransitionVector>& letters, int dim) {
  Json out = Json::array();
  for (const auto& l : letters) out.push_back(transition_to_json(l, dim));
  return out;
}

// "letters" + "weights" inline, or "alphabet_file" in the text format.
std::pair<std::vector<TransitionVector>, std::vector<double>> read_letters(const JsonNode& node,
                                                                          int dim) {
  std::vector<TransitionVector> letters;
  std::vector<double> weights;
  if (node.has("alphabet_file")) {
    for (auto& [w, v] : parse_alphabet(read_text_file(node["alphabet_file"].as_string()), dim)) {
      weights.push_back(w);
      letters.push_back(std::move(v));
    }
    return {letters, weights};
  }
  const auto ls = node["letters"];
  for (std::size_t i = 0; i < ls.size(); ++i) letters.push_back(transition_from_json(ls[i], dim));
  if (node.has("weights")) {
    weights = node["weights"].as_doubles();
  } else {
    weights.assign(letters.size(), 1.0 / static_cast<double>(letters.size()));
  }
  return {letters, weights};
}

}  // namespace

Json model_to_json(const EnvironmentModel& model) {
  const int dim = model.dim;
  Json out{{"kind", model.kind()}, {"dim", dim}, {"range", model.range}, {"seed", model.master_seed}};
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, law::Constant>) {
          out["vector"] = transition_to_json(l.vector, dim);
        } else if constexpr (std::is_same_v<T, law::IidFiniteAlphabet>) {
          out["letters"] = letters_to_json(l.letters, dim);
          out["weights"] = l.weights;
        } else if constexpr (std::is_same_v<T, law::IidDirichlet>) {
          Json offsets = Json::array();
          for (const auto& e : l.offsets) offsets.push_back(point_to_json(e, dim));
          out["offsets"] = offsets;
          out["concentration"] = l.concentration;
        } else if constexpr (std::is_same_v<T, law::LDependent>) {
          out["letters"] = letters_to_json(l.letters, dim);
          out["weights"] = l.weights;
          out["gap"] = l.gap;
          out["coupling"] = l.coupling;
          out["direction"] = point_to_json(l.direction, dim);
        } else if constexpr (std::is_same_v<T, law::GibbsWindow>) {
          out["spec"] = gibbs_to_json(l.spec);
          out["lo"] = point_to_json(l.lo, dim);
          out["hi"] = point_to_json(l.hi, dim);
          out["boundary_letter"] = l.boundary_letter;
          out["burn_in_sweeps"] = l.burn_in_sweeps;
        }
      },
      model.law);
  return out;
}

EnvironmentModel model_from_json(const JsonNode& node) {
  const std::string kind = node["kind"].as_string();
  const int dim = static_cast<int>(node.get_int_or("dim", kind == "deterministic-ne" ? 2 : 1));
  const Coord range = node.get_int_or("range", 1);
  const std::uint64_t seed = node.has("seed") ? node["seed"].as_uint64() : 0;
  EnvironmentModel model;
  try {
    if (kind == "constant") {
      model = constant_model(transition_from_json(node["vector"], dim), dim, range, seed);
    } else if (kind == "iid-finite-alphabet") {
      auto [letters, weights] = read_letters(node, dim);
      model = iid_alphabet_model(std::move(letters), std::move(weights), dim, range, seed);
    } else if (kind == "deterministic-ne") {
      model = northeast_model(seed);
    } else if (kind == "iid-dirichlet") {
      std::vector<Point> offsets;
      const auto os = node["offsets"];
      for (std::size_t i = 0; i < os.size(); ++i) offsets.push_back(point_from_json(os[i], dim));
      model = dirichlet_model(std::move(offsets), node["concentration"].as_doubles(), dim, range, seed);
    } else if (kind == "l-dependent") {
      auto [letters, weights] = read_letters(node, dim);
      Point direction(1);
      if (node.has("direction")) direction = point_from_json(node["direction"], dim);
      model = l_dependent_model(std::move(letters), std::move(weights), node.get_int_or("gap", 1),
                                node.get_or("coupling", 0.5), direction, dim, range, seed);
    } else if (kind == "gibbs-window") {
      GibbsSpec spec = gibbs_from_json(node["spec"]);
      const int sdim = spec.dim;
      model = gibbs_window_model(std::move(spec), point_from_json(node["lo"], sdim),
                                 point_from_json(node["hi"], sdim),
                                 static_cast<int>(node.get_int_or("boundary_letter", 0)),
                                 static_cast<std::size_t>(node.get_int_or("burn_in_sweeps", 1000)),
                                 range, seed);
    } else {
      node["kind"].fail("unknown model kind \"" + kind + "\"");
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("config ", 0) == 0) throw;
    node.fail(what);
  }
  return model;
}

Json constants_to_json(const MixingConstants& c) {
  return Json{{"kappa", c.kappa},
              {"r", c.r},
              {"g", c.g},
              {"c_tilde", c.c_tilde},
              {"mode", c.mode == MixingMode::Gibbs ? "gibbs" : "l-dependent"},
              {"gap", c.gap}};
}

MixingConstants constants_from_json(const JsonNode& node) {
  MixingConstants c;
  c.kappa = node["kappa"].as_double();
  c.r = node.get_int_or("r", 1);
  c.g = node.get_or("g", 1.0);
  c.c_tilde = node.get_or("c_tilde", 1.0);
  const std::string mode = node.has("mode") ? node["mode"].as_string() : "gibbs";
  if (mode == "gibbs") {
    c.mode = MixingMode::Gibbs;
  } else if (mode == "l-dependent") {
    c.mode = MixingMode::LDependent;
  } else {
    node["mode"].fail("expected \"gibbs\" or \"l-dependent\"");
  }
  c.gap = node.get_int_or("gap", 1);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    node.fail(e.what());
  }
  return c;
}

std::vector<std::pair<double, TransitionVector>> parse_alphabet(std::string_view text, int dim) {
  std::vector<std::pair<double, TransitionVector>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    std::optional<double> weight;
    TransitionVector v;
    auto bad = [&](const std::string& what) {
      throw ConfigError("alphabet line " + std::to_string(lineno) + ": " + what);
    };
    while (words >> word) {
      try {
        if (word.rfind("w=", 0) == 0) {
          weight = std::stod(word.substr(2));
          continue;
        }
        const auto colon = word.find(':');
        if (colon == std::string::npos) bad("expected <offset>:<prob>, got \"" + word + "\"");
        v.offsets.push_back(parse_point(std::string_view(word).substr(0, colon), dim));
        v.probs.push_back(std::stod(word.substr(colon + 1)));
      } catch (const std::invalid_argument&) {
        bad("malformed number in \"" + word + "\"");
      }
    }
    if (v.offsets.empty() && !weight) continue;
    if (!weight) bad("missing w=<weight>");
    if (v.offsets.empty()) bad("letter without offsets");
    out.emplace_back(*weight, std::move(v));
  }
  if (out.empty()) throw ConfigError("alphabet: no letters");
  return out;
}

std::string canonical_dump(const Json& value) { return value.dump(); }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace rwre

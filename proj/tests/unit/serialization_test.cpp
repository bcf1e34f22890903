#include <gtest/gtest.h>

#include <string>

#include "rwre/errors.hpp"
#include "rwre/serialization.hpp"

namespace {

using rwre::Json;
using rwre::JsonNode;
using rwre::Point;
using rwre::nearest_neighbor_1d;

std::string error_of(const Json& j) {
  try {
    rwre::model_from_json(JsonNode(j));
  } catch (const rwre::ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Serialization, Sha256KnownVector) {
  EXPECT_EQ(rwre::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(rwre::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Serialization, ModelRoundTrips) {
  const auto gibbs = rwre::ising_spec(1, {nearest_neighbor_1d(0.95), nearest_neighbor_1d(0.45)}, 1.0,
                                      0.1, 0.05, {0.9, 0.1});
  const std::vector<rwre::EnvironmentModel> models{
      rwre::constant_model(nearest_neighbor_1d(0.7), 1, 1, 3),
      rwre::iid_alphabet_model({nearest_neighbor_1d(0.7), nearest_neighbor_1d(0.9)}, {0.25, 0.75}, 1,
                               1, 4),
      rwre::northeast_model(5),
      rwre::dirichlet_model({Point(1, 0), Point(0, 1), Point(-1, 0)}, {1.0, 2.0, 0.5}, 2, 1, 6),
      rwre::l_dependent_model({nearest_neighbor_1d(0.7), nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 2,
                              0.4, Point(1), 1, 1, 7),
      rwre::gibbs_window_model(gibbs, Point(-10), Point(10), 1, 200, 1, 8)};
  for (const auto& m : models) {
    const Json j = rwre::model_to_json(m);
    const auto back = rwre::model_from_json(JsonNode(j));
    EXPECT_EQ(rwre::model_to_json(back), j) << j.dump();
    EXPECT_EQ(back.kind(), m.kind());
    EXPECT_EQ(back.master_seed, m.master_seed);
  }
}

TEST(Serialization, Shorthands) {
  const auto m = rwre::model_from_json(
      JsonNode(Json::parse(R"({"kind": "constant", "dim": 1, "vector": {"p": 0.7}})")));
  rwre::Environment env(m);
  EXPECT_EQ(env.at(Point(0)), nearest_neighbor_1d(0.7));

  const auto g = rwre::gibbs_from_json(JsonNode(Json::parse(
      R"({"dim": 1, "beta": 0.05, "alphabet": [{"p": 0.95}, {"p": 0.45}], "ising": {"coupling": 1.0}})")));
  EXPECT_NEAR(g.c1(), std::exp(0.8), 1e-12);
}

TEST(Serialization, ErrorsNameThePath) {
  const auto bad_probs = Json::parse(
      R"({"kind": "iid-finite-alphabet", "dim": 1,
          "letters": [{"p": 0.7}, {"offsets": [[1], [-1]], "probs": [0.5, "x"]}]})");
  EXPECT_NE(error_of(bad_probs).find("/letters/1/probs/1"), std::string::npos) << error_of(bad_probs);
  const auto bad_kind = Json::parse(R"({"kind": "banana"})");
  EXPECT_NE(error_of(bad_kind).find("banana"), std::string::npos);
  const auto missing = Json::parse(R"({"kind": "constant", "dim": 1})");
  EXPECT_NE(error_of(missing).find("/vector"), std::string::npos) << error_of(missing);
  const auto not_normalized = Json::parse(
      R"({"kind": "constant", "dim": 1, "vector": {"offsets": [[1], [-1]], "probs": [0.5, 0.6]}})");
  EXPECT_FALSE(error_of(not_normalized).empty());
}

TEST(Serialization, AlphabetParser) {
  const auto letters = rwre::parse_alphabet(
      "# comment\n\nw=0.25 1:0.7 -1:0.3\nw=0.75 1:0.9 -1:0.1  # trailing\n", 1);
  ASSERT_EQ(letters.size(), 2u);
  EXPECT_EQ(letters[0].first, 0.25);
  EXPECT_EQ(letters[1].second.prob(Point(-1)), 0.1);
  const auto two_d = rwre::parse_alphabet("w=1 1,0:0.5 0,1:0.5", 2);
  EXPECT_EQ(two_d[0].second.prob(Point(0, 1)), 0.5);
  EXPECT_THROW(rwre::parse_alphabet("1:0.7 -1:0.3", 1), rwre::ConfigError);
  EXPECT_THROW(rwre::parse_alphabet("w=1 1-0.7", 1), rwre::ConfigError);
  EXPECT_THROW(rwre::parse_alphabet("# nothing", 1), rwre::ConfigError);
  try {
    rwre::parse_alphabet("w=1 1:0.5 -1:0.5\nw=1 1:abc", 1);
    FAIL();
  } catch (const rwre::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Serialization, AlphabetFile) {
  const std::string path = std::string(RWRE_SOURCE_DIR) + "/configs/alphabet_1d.txt";
  const Json j{{"kind", "iid-finite-alphabet"}, {"dim", 1}, {"alphabet_file", path}};
  const auto m = rwre::model_from_json(JsonNode(j));
  ASSERT_EQ(m.letters().size(), 2u);
  EXPECT_NEAR(m.letters()[1].prob(Point(1)), 0.9, 1e-15);
  EXPECT_NEAR(m.letters()[1].prob(Point(-1)), 0.1, 1e-15);
  EXPECT_NEAR((*m.marginal_weights())[0], 0.5, 1e-15);
}

TEST(Serialization, ConstantsRoundTrip) {
  rwre::MixingConstants c;
  c.kappa = 0.1;
  c.r = 2;
  c.g = 0.7;
  c.c_tilde = 3.5;
  c.mode = rwre::MixingMode::LDependent;
  c.gap = 3;
  const auto back = rwre::constants_from_json(JsonNode(rwre::constants_to_json(c)));
  EXPECT_EQ(back.kappa, c.kappa);
  EXPECT_EQ(back.r, c.r);
  EXPECT_EQ(back.g, c.g);
  EXPECT_EQ(back.c_tilde, c.c_tilde);
  EXPECT_EQ(back.mode, c.mode);
  EXPECT_EQ(back.gap, c.gap);
}

}  // namespace

#include <gtest/gtest.h>

#include "ideoaudit/canonical_json.hpp"
#include "ideoaudit/errors.hpp"
#include "ideoaudit/text.hpp"
#include "support.hpp"

using namespace ideoaudit;

TEST(CanonicalJson, SortsKeysAndDropsWhitespace) {
  const Json doc = Json::parse(R"({ "b": [1, 2, {"z": 0, "a": 1}], "a": "x" })");
  EXPECT_EQ(canonical_dump(doc), R"({"a":"x","b":[1,2,{"a":1,"z":0}]})");
}

TEST(CanonicalJson, IntegralFloatsPrintAsIntegers) {
  Json doc;
  doc["t"] = 1.0;
  doc["u"] = 0.7;
  doc["v"] = -3.0;
  EXPECT_EQ(canonical_dump(doc), R"({"t":1,"u":0.7,"v":-3})");
}

TEST(CanonicalJson, KeyOrderDoesNotChangeDigest) {
  const Json a = Json::parse(R"({"x":1,"y":{"p":true,"q":null}})");
  const Json b = Json::parse(R"({"y":{"q":null,"p":true},"x":1})");
  EXPECT_EQ(canonical_digest(a), canonical_digest(b));
}

TEST(CanonicalJson, NonAsciiStaysUtf8) {
  const Json doc = {{"k", "Grüße"}};
  EXPECT_EQ(canonical_dump(doc), "{\"k\":\"Grüße\"}");
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Files, ExclusiveWriteRefusesOverwrite) {
  testsupport::TempDir dir;
  const std::string p = dir.str("a/b/c.txt");
  write_file(p, "one", true);
  EXPECT_EQ(read_file(p), "one");
  EXPECT_THROW(write_file(p, "two", true), ArtifactExists);
  EXPECT_EQ(read_file(p), "one");
  write_file(p, "two");
  EXPECT_EQ(read_file(p), "two");
}

TEST(Files, MissingFileThrows) { EXPECT_THROW(read_file("/nonexistent/file"), Error); }

TEST(Text, CanonicalKey) {
  EXPECT_EQ(text::canonical_key("  Rallies! "), "rallies");
  EXPECT_EQ(text::canonical_key("\"Air   Quality\""), "air quality");
  EXPECT_EQ(text::canonical_key("STRASSE"), text::canonical_key("straße"));
  EXPECT_EQ(text::canonical_key("...!?"), "");
}

TEST(Text, WordTokensKeepAlphanumericSegments) {
  const auto t = text::word_tokens("It's GREAT, isn't it? 42 times!");
  const std::vector<std::string> want{"it's", "great", "isn't", "it", "42", "times"};
  EXPECT_EQ(t, want);
}

TEST(Text, Trim) {
  EXPECT_EQ(text::trim("\t a b \n"), "a b");
  EXPECT_EQ(text::trim(" x "), "x");
}

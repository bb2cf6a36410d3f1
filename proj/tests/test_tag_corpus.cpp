#include <sstream>

#include "corpus.hpp"
#include "doctest.h"
#include "tag.hpp"
#include "test_util.hpp"

using namespace mt;

TEST_CASE("parse_feats basics") {
  auto feats = parse_feats("Case=Nom|Number=Sing");
  CHECK(feats.size() == 2);
  CHECK(feats.count({"Case", "Nom"}) == 1);
  CHECK(feats.count({"Number", "Sing"}) == 1);

  CHECK(parse_feats("_").empty());

  CHECK_THROWS_AS(parse_feats("Number=Sing|Number=Plur"), ParseError);
  CHECK_THROWS_AS(parse_feats("Number"), ParseError);
  CHECK_THROWS_AS(parse_feats("=Sing"), ParseError);
}

TEST_CASE("parse_feats is order-insensitive") {
  CHECK(parse_feats("Case=Nom|Number=Sing") ==
        parse_feats("Number=Sing|Case=Nom"));
}

TEST_CASE("canonical tag rendering") {
  MorphTag tag("NOUN", {{"Number", "Sing"}, {"Case", "Nom"}});
  CHECK(tag.canonical() == "NOUN|Case=Nom|Number=Sing");
  CHECK(MorphTag("VERB").canonical() == "VERB");
  CHECK(MorphTag::from_canonical("NOUN|Case=Nom|Number=Sing") == tag);
  CHECK(MorphTag::from_canonical("VERB") == MorphTag("VERB"));
}

TEST_CASE("restricted_to filters features and is idempotent") {
  MorphTag tag("NOUN", {{"Case", "Nom"}, {"Number", "Sing"}});
  MorphTag kept = tag.restricted_to({"Number"});
  CHECK(kept.canonical() == "NOUN|Number=Sing");
  CHECK(kept.restricted_to({"Number"}) == kept);
  CHECK(tag.restricted_to({"Case", "Number"}) == tag);
  CHECK(MorphTag("VERB").restricted_to({"Case"}) == MorphTag("VERB"));
}

TEST_CASE("parse_corpus reads tokens with gold tags") {
  std::string text = "# sent_id = s1\n" + test::token_line(1, "the", "DET", "_") +
                     test::token_line(2, "dog", "NOUN", "Number=Sing") + "\n";
  Corpus corpus = parse_corpus_text(text);
  REQUIRE(corpus.size() == 1);
  REQUIRE(corpus[0].size() == 2);
  CHECK(corpus[0].id == "s1");
  CHECK(corpus[0].tokens[0].surface == "the");
  CHECK(corpus[0].tokens[1].gold->canonical() == "NOUN|Number=Sing");
}

TEST_CASE("parse_corpus skips range and empty-node lines") {
  std::string text = "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                     test::token_line(1, "de", "ADP", "_") +
                     test::token_line(2, "el", "DET", "_") +
                     "2.1\tnull\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
  Corpus corpus = parse_corpus_text(text);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].size() == 2);
}

TEST_CASE("sentence over the length cap is excluded and counted") {
  std::string text;
  for (int i = 1; i <= 81; ++i) text += test::token_line(i, "w", "X", "_");
  text += "\n" + test::token_line(1, "ok", "X", "_") + "\n";
  CorpusReadStats stats;
  Corpus corpus = parse_corpus_text(text, 80, &stats);
  CHECK(corpus.size() == 1);
  CHECK(stats.sentences_excluded == 1);
  CHECK(corpus[0].tokens[0].surface == "ok");
}

TEST_CASE("wrong column count names the line") {
  CHECK_THROWS_AS(parse_corpus_text("1\tdog\tNOUN\n"), ParseError);
}

TEST_CASE("corpus round-trips through write and parse") {
  std::string text = "# sent_id = s1\n" + test::token_line(1, "the", "DET", "_") +
                     test::token_line(2, "dogs", "NOUN", "Number=Plur") + "\n";
  Corpus corpus = parse_corpus_text(text);
  std::ostringstream out;
  write_corpus(out, corpus);
  Corpus again = parse_corpus_text(out.str());
  REQUIRE(again.size() == corpus.size());
  for (size_t s = 0; s < corpus.size(); ++s) {
    REQUIRE(again[s].size() == corpus[s].size());
    for (size_t i = 0; i < corpus[s].size(); ++i) {
      CHECK(again[s].tokens[i].surface == corpus[s].tokens[i].surface);
      CHECK(*again[s].tokens[i].gold == *corpus[s].tokens[i].gold);
    }
  }
  // And the serialized form is a fixed point.
  std::ostringstream out2;
  write_corpus(out2, again);
  CHECK(out2.str() == out.str());
}

TEST_CASE("build_tag_inventory indexes tags in first-occurrence order") {
  std::string text = test::token_line(1, "a", "A", "_") +
                     test::token_line(2, "b", "B", "_") +
                     test::token_line(3, "c", "A", "_") + "\n";
  Corpus corpus = parse_corpus_text(text);
  TagInventory inv = build_tag_inventory(corpus);
  CHECK(inv.size() == 2);
  CHECK(inv.lookup(MorphTag("A")) == 0);
  CHECK(inv.lookup(MorphTag("B")) == 1);
  CHECK(inv.tag_at(0) == MorphTag("A"));

  CHECK_THROWS_AS(build_tag_inventory(Corpus{}), DataError);
}

TEST_CASE("inventory attribute sets") {
  TagInventory inv;
  inv.add(MorphTag("NOUN", {{"Case", "Nom"}, {"Number", "Sing"}}));
  inv.add(MorphTag("VERB", {{"Tense", "Past"}}));
  CHECK(inv.attribute_types() ==
        std::set<std::string>{"Case", "Number", "Tense"});
  CHECK(inv.attribute_values().size() == 3);
}

TEST_CASE("restrict_to_attribute_types filters the corpus") {
  std::string text =
      test::token_line(1, "huset", "NOUN", "Case=Nom|Number=Sing") + "\n";
  Corpus corpus = parse_corpus_text(text);
  Corpus kept = restrict_to_attribute_types(corpus, {"Number"});
  CHECK(kept[0].tokens[0].gold->canonical() == "NOUN|Number=Sing");
  // identity when keeping everything
  Corpus same = restrict_to_attribute_types(corpus, {"Case", "Number"});
  CHECK(same[0].tokens[0].gold->canonical() == "NOUN|Case=Nom|Number=Sing");
}

TEST_CASE("raw corpus format") {
  std::istringstream in("the dog runs\na cat\n");
  Corpus corpus = parse_raw(in);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].size() == 3);
  CHECK(corpus[1].tokens[0].surface == "a");
}

TEST_CASE("attribute values reject separator characters") {
  CHECK_THROWS_AS(parse_feats("Ca|se=Nom"), ParseError);
  CHECK_THROWS_AS(parse_feats("Case=N=om"), ParseError);
}

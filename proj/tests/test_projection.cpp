#include <sstream>

#include "doctest.h"
#include "projection.hpp"

using namespace mt;

namespace {

TagInventory abc_inventory() {
  TagInventory inv;
  inv.add(MorphTag("A"));
  inv.add(MorphTag("B"));
  inv.add(MorphTag("C"));
  inv.add(MorphTag("D"));
  return inv;
}

TagDistribution dist(std::map<std::string, long long> counts) {
  TagDistribution d;
  d.counts = std::move(counts);
  for (const auto& [t, c] : d.counts) d.total += c;
  return d;
}

Sentence tagged_sentence(const std::vector<std::pair<std::string, std::string>>&
                             word_tags) {
  Sentence s;
  for (const auto& [w, t] : word_tags) {
    Token tok;
    tok.surface = w;
    tok.gold = MorphTag::from_canonical(t);
    s.tokens.push_back(std::move(tok));
  }
  return s;
}

Sentence raw_sentence(const std::vector<std::string>& words) {
  Sentence s;
  for (const auto& w : words) {
    Token tok;
    tok.surface = w;
    s.tokens.push_back(std::move(tok));
  }
  return s;
}

}  // namespace

TEST_CASE("select_links keeps one link per target token") {
  std::vector<AlignmentLink> links = {
      {0, 1, 0.9, 0.85},  // min 0.85
      {2, 1, 0.95, 0.9},  // min 0.9 -> wins for tgt 1
      {1, 0, 0.9, 0.9},
  };
  auto kept = select_links(links);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].tgt == 0);
  CHECK(kept[1].tgt == 1);
  CHECK(kept[1].src == 2);

  // Exact tie on min-posterior: the smaller source index wins.
  auto tie = select_links({{3, 0, 0.9, 0.9}, {1, 0, 0.9, 0.9}});
  REQUIRE(tie.size() == 1);
  CHECK(tie[0].src == 1);
}

TEST_CASE("accumulate_type_distributions counts source tags per target type") {
  SentencePair p1;
  p1.source = tagged_sentence({{"house", "NOUN|Number=Sing"}, {"runs", "VERB"}});
  p1.target = raw_sentence({"huis", "rent"});
  p1.links = {{0, 0, 0.9, 0.9}, {1, 1, 0.9, 0.9}};
  SentencePair p2;
  p2.source = tagged_sentence({{"house", "VERB"}});
  p2.target = raw_sentence({"huis"});
  p2.links = {{0, 0, 0.9, 0.9}};

  auto dists = accumulate_type_distributions({p1, p2});
  REQUIRE(dists.count("huis") == 1);
  CHECK(dists.at("huis").total == 2);
  CHECK(dists.at("huis").counts.at("NOUN|Number=Sing") == 1);
  CHECK(dists.at("huis").counts.at("VERB") == 1);
  CHECK(dists.at("rent").total == 1);
  CHECK(dists.count("never_aligned") == 0);
}

TEST_CASE("source_tag prefers the predicted tag") {
  Token tok;
  tok.surface = "w";
  tok.gold = MorphTag("NOUN");
  CHECK(source_tag(tok)->canonical() == "NOUN");
  tok.predicted = MorphTag("VERB");
  CHECK(source_tag(tok)->canonical() == "VERB");
}

TEST_CASE("build_type_dictionary applies the beta threshold inclusively") {
  TagInventory inv = abc_inventory();
  std::map<std::string, TagDistribution> dists;
  dists["w1"] = dist({{"A", 7}, {"B", 2}, {"C", 1}});
  dists["w2"] = dist({{"A", 4}, {"B", 4}, {"C", 2}});
  dists["w3"] = dist({{"A", 1}, {"B", 1}, {"C", 1}, {"D", 1}});
  dists["w4"] = dist({{"A", 3}, {"B", 7}});  // 0.3 exactly -> kept

  TypeDictionary dict = build_type_dictionary(dists, 0.3, inv);
  CHECK(*dict.entry("w1") == std::vector<int>{0});
  CHECK(*dict.entry("w2") == std::vector<int>{0, 1});
  CHECK(dict.entry("w3")->empty());  // all 0.25 < 0.3: too flat
  CHECK(*dict.entry("w4") == std::vector<int>{0, 1});
  CHECK(dict.entry("unseen") == nullptr);
}

TEST_CASE("dictionary entries shrink as beta grows") {
  TagInventory inv = abc_inventory();
  std::map<std::string, TagDistribution> dists;
  dists["w"] = dist({{"A", 5}, {"B", 3}, {"C", 2}});
  for (double lo : {0.1, 0.2, 0.3, 0.5}) {
    auto low = build_type_dictionary(dists, lo, inv);
    auto high = build_type_dictionary(dists, lo + 0.2, inv);
    const auto& le = *low.entry("w");
    const auto& he = *high.entry("w");
    for (int t : he) CHECK(std::count(le.begin(), le.end(), t) == 1);
  }
}

TEST_CASE("make_unambiguous keeps only singleton entries") {
  TagInventory inv = abc_inventory();
  TypeDictionary dict;
  dict.inventory = inv;
  dict.entries = {{"w1", {0}}, {"w2", {0, 1}}, {"w3", {}}};
  TypeDictionary un = make_unambiguous(dict);
  CHECK(un.entries.size() == 1);
  CHECK(*un.entry("w1") == std::vector<int>{0});
}

TEST_CASE("build_oracle_dictionary collects observed gold tags") {
  Corpus corpus = {tagged_sentence({{"dog", "NOUN|Number=Sing"},
                                    {"run", "VERB"}}),
                   tagged_sentence({{"dog", "NOUN|Number=Sing"},
                                    {"run", "NOUN"}})};
  TypeDictionary dict = build_oracle_dictionary(corpus);
  CHECK(dict.entry("dog")->size() == 1);
  CHECK(dict.entry("run")->size() == 2);
  CHECK(dict.entry("cat") == nullptr);
}

TEST_CASE("combine_constraints covers every branch of the combination rule") {
  TagInventory inv = abc_inventory();
  std::vector<int> entry_ab = {0, 1};
  std::vector<int> entry_empty;
  std::vector<int> full = {0, 1, 2, 3};
  auto A = std::optional<MorphTag>(MorphTag("A"));
  auto C = std::optional<MorphTag>(MorphTag("C"));
  auto none = std::optional<MorphTag>();

  // unaligned x {absent, empty, non-empty}
  CHECK(combine_constraints(none, nullptr, inv) == full);
  CHECK(combine_constraints(none, &entry_empty, inv) == full);
  CHECK(combine_constraints(none, &entry_ab, inv) == entry_ab);
  // aligned x {absent, empty, contains, excludes}
  CHECK(combine_constraints(C, nullptr, inv) == std::vector<int>{2});
  CHECK(combine_constraints(C, &entry_empty, inv) == std::vector<int>{2});
  CHECK(combine_constraints(A, &entry_ab, inv) == std::vector<int>{0});
  CHECK(combine_constraints(C, &entry_ab, inv) == entry_ab);

  // Token tag missing from the inventory is an error.
  auto other = std::optional<MorphTag>(MorphTag("ZZZ"));
  CHECK_THROWS_AS(combine_constraints(other, &entry_ab, inv), DataError);
}

TEST_CASE("token_constraint returns the aligned source tag") {
  SentencePair pair;
  pair.source = tagged_sentence({{"a", "A"}, {"b", "B"}});
  pair.target = raw_sentence({"x", "y"});
  pair.links = {{1, 0, 0.9, 0.9}};
  CHECK(token_constraint(pair, 0)->canonical() == "B");
  CHECK(!token_constraint(pair, 1).has_value());
}

TEST_CASE("build_lattice_corpus respects the whole-sentence token budget") {
  TypeDictionary dict;
  dict.inventory = abc_inventory();
  dict.entries = {{"x", {0}}};
  std::vector<SentencePair> pairs;
  for (int k = 0; k < 2; ++k) {
    SentencePair p;
    p.source = tagged_sentence({{"a", "A"}});
    p.target = raw_sentence({"x", "x", "x", "x", "x", "x"});
    pairs.push_back(std::move(p));
  }
  ProjectionConfig config;
  config.max_train_tokens = 10;
  auto lattices = build_lattice_corpus(pairs, dict, config);
  CHECK(lattices.size() == 1);  // 6 fits, 6+6 would overflow
  config.max_train_tokens = 12;
  CHECK(build_lattice_corpus(pairs, dict, config).size() == 2);
}

TEST_CASE("lattice modes: type, type+token, unambiguous") {
  TypeDictionary dict;
  dict.inventory = abc_inventory();
  dict.entries = {{"x", {0, 1}}, {"y", {2}}, {"flat", {}}};

  SentencePair pair;
  pair.source = tagged_sentence({{"s0", "C"}, {"s1", "D"}});
  pair.target = raw_sentence({"x", "y", "flat", "oov"});
  pair.links = {{0, 0, 0.9, 0.9}, {1, 2, 0.9, 0.9}};

  ProjectionConfig config;

  SUBCASE("type mode ignores token constraints") {
    config.constraint_mode = ConstraintMode::kType;
    auto lats = build_lattice_corpus({pair}, dict, config);
    REQUIRE(lats.size() == 1);
    CHECK(lats[0].allowed[0] == std::vector<int>{0, 1});
    CHECK(lats[0].is_example[0]);
    CHECK(lats[0].allowed[1] == std::vector<int>{2});
    CHECK(lats[0].allowed[2].empty());  // flat entry: unconstrained
    CHECK(!lats[0].is_example[2]);
    CHECK(lats[0].allowed[3].empty());  // no entry
    CHECK(!lats[0].is_example[3]);
  }
  SUBCASE("type+token applies the combination rule") {
    config.constraint_mode = ConstraintMode::kTypeAndToken;
    auto lats = build_lattice_corpus({pair}, dict, config);
    // token C not in entry {A,B} -> the entry
    CHECK(lats[0].allowed[0] == std::vector<int>{0, 1});
    // unaligned token with entry {C} -> the entry
    CHECK(lats[0].allowed[1] == std::vector<int>{2});
    // aligned token, flat entry -> token tag D
    CHECK(lats[0].allowed[2] == std::vector<int>{3});
    // unaligned, no entry -> unconstrained
    CHECK(lats[0].allowed[3].empty());
  }
  SUBCASE("unambiguous keeps only singleton dictionary entries") {
    config.constraint_mode = ConstraintMode::kUnambiguousType;
    auto lats = build_lattice_corpus({pair}, dict, config);
    CHECK(lats[0].allowed[0].empty());  // {A,B} dropped
    CHECK(!lats[0].is_example[0]);
    CHECK(lats[0].allowed[1] == std::vector<int>{2});
    CHECK(lats[0].is_example[1]);
  }
}

TEST_CASE("dictionary file round-trip") {
  TypeDictionary dict;
  dict.inventory = abc_inventory();
  dict.entries = {{"w1", {0, 2}}, {"w2", {}}, {"a word", {1}}};
  std::ostringstream out;
  write_dictionary(out, dict);
  std::istringstream in(out.str());
  TypeDictionary again = parse_dictionary(in);
  CHECK(again.entries.size() == 3);
  CHECK(again.inventory.size() == 3);  // only tags used in entries
  const auto* e1 = again.entry("w1");
  REQUIRE(e1 != nullptr);
  REQUIRE(e1->size() == 2);
  CHECK(again.inventory.tag_at((*e1)[0]).canonical() == "A");
  CHECK(again.inventory.tag_at((*e1)[1]).canonical() == "C");
  CHECK(again.entry("w2")->empty());
}

TEST_CASE("lattice file round-trip") {
  TagInventory inv = abc_inventory();
  ConstraintLattice lat;
  lat.sentence = raw_sentence({"x", "y", "z"});
  lat.allowed = {{0, 1}, {}, {2}};
  lat.is_example = {1, 0, 1};
  std::ostringstream out;
  write_lattices(out, inv, {lat});
  std::istringstream in(out.str());
  auto [inv2, lats] = parse_lattices(in);
  CHECK(inv2.size() == inv.size());
  REQUIRE(lats.size() == 1);
  CHECK(lats[0].sentence.tokens[1].surface == "y");
  CHECK(lats[0].allowed == lat.allowed);
  CHECK(lats[0].is_example == lat.is_example);
}

TEST_CASE("lattices_from_gold builds singleton sets") {
  Corpus corpus = {tagged_sentence({{"dog", "NOUN"}, {"runs", "VERB"}})};
  TagInventory inv = build_tag_inventory(corpus);
  auto lats = lattices_from_gold(corpus, inv, 0);
  REQUIRE(lats.size() == 1);
  CHECK(lats[0].allowed[0] == std::vector<int>{0});
  CHECK(lats[0].allowed[1] == std::vector<int>{1});
  CHECK(lats[0].is_example[0]);
}
